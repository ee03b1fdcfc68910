#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chronogate/config.hpp"
#include "chronogate/dga_lab.hpp"
#include "chronogate/domain_age.hpp"
#include "chronogate/entropy_guard.hpp"
#include "chronogate/policy.hpp"
#include "chronogate/resolver_proxy.hpp"

namespace {

using namespace chronogate;

constexpr int kExitOk = 0;
constexpr int kExitOperational = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBlocked = 3;

std::string dirname_of(const std::string& path) {
    auto slash = path.rfind('/');
    return slash == std::string::npos ? std::string() : path.substr(0, slash);
}

// Config file from --config or the CHRONOGATE_CONFIG fallback; explicit
// flags override file values afterwards.
config::KeyValues load_config_or_default(const std::string& config_flag, std::string* dir_out) {
    std::string path = config_flag;
    if (path.empty()) {
        if (const char* env = std::getenv("CHRONOGATE_CONFIG")) path = env;
    }
    if (path.empty()) return {};
    if (dir_out) *dir_out = dirname_of(path);
    return config::load_key_values(path);
}

std::shared_ptr<age::AgeIndex> load_feed_index(const std::string& path, UnixTime now,
                                               bool allow_empty) {
    auto index = std::make_shared<age::AgeIndex>();
    if (path.empty()) {
        if (allow_empty) return index;
        throw std::runtime_error("no feed file configured (use --feed or feed_path)");
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open feed file: " + path);
    try {
        age::ingest_feed_csv(in, now, *index);
    } catch (const age::EmptyFeed&) {
        if (!allow_empty) throw;
    }
    return index;
}

UnixTime resolve_clock(const std::string& at_flag) {
    if (at_flag.empty()) {
        proxy::SystemTimeSource clock;
        return clock.now();
    }
    auto t = parse_iso8601_utc(at_flag);
    if (!t) throw CLI::ValidationError("--at", "expected ISO 8601 UTC timestamp");
    return *t;
}

struct ServeFlags {
    std::string listen, upstream, feed, config, log, blocklist;
    double threshold_hours = -1;
    bool allow_empty_feed = false;
};

int cmd_serve(const ServeFlags& flags) {
    std::string base_dir;
    config::KeyValues kv = load_config_or_default(flags.config, &base_dir);
    if (!flags.listen.empty()) kv["listen"] = flags.listen;
    if (!flags.upstream.empty()) kv["upstream"] = flags.upstream;
    if (flags.threshold_hours >= 0) kv["threshold_hours"] = std::to_string(flags.threshold_hours);

    config::ProxySettings settings = config::proxy_from_key_values(kv, base_dir);
    if (!flags.feed.empty()) settings.feed_path = flags.feed;
    if (!flags.log.empty()) settings.log_path = flags.log;
    if (!flags.blocklist.empty()) settings.blocklist_path = flags.blocklist;

    proxy::ServeOptions options{settings, flags.allow_empty_feed};
    std::cerr << "chronogate: serving on " << settings.listen << ", upstream "
              << settings.upstream << "\n";
    proxy::run(options);
    return kExitOk;
}

struct CheckFlags {
    std::string domain, feed, config, at;
    double threshold_hours = -1;
};

int cmd_check(const CheckFlags& flags) {
    std::string base_dir;
    config::KeyValues kv = load_config_or_default(flags.config, &base_dir);
    if (flags.threshold_hours >= 0) kv["threshold_hours"] = std::to_string(flags.threshold_hours);
    policy::PolicyConfig cfg = config::policy_from_key_values(kv, base_dir);

    std::string feed_path = flags.feed;
    if (feed_path.empty() && kv.count("feed_path")) {
        feed_path = kv.at("feed_path");
        if (!feed_path.empty() && feed_path.front() != '/' && !base_dir.empty()) {
            feed_path = base_dir + "/" + feed_path;
        }
    }

    const UnixTime now = resolve_clock(flags.at);
    auto index = load_feed_index(feed_path, now, /*allow_empty=*/false);

    std::string domain = flags.domain;
    for (auto& c : domain) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (!domain.empty() && domain.back() == '.') domain.pop_back();

    age::AgeVerdict verdict = age::lookup_age(domain, now, *index);
    policy::PolicyVerdict pv = policy::evaluate(domain, verdict, cfg);

    nlohmann::ordered_json j;
    j["domain"] = domain;
    j["checked_at"] = format_iso8601_utc(now);
    j["action"] = policy::to_string(pv.action);
    j["reason"] = policy::to_string(pv.reason);
    if (verdict.known) {
        j["age_hours"] = static_cast<double>(verdict.age_seconds) / kSecondsPerHour;
        j["registered_at"] = format_iso8601_utc(verdict.since);
        j["source"] = verdict.source == age::AgeSource::Feed ? "feed"
                      : verdict.source == age::AgeSource::SoaHeuristic ? "soa_heuristic"
                                                                       : "cache";
    } else {
        j["age_hours"] = nullptr;
    }
    std::cout << j.dump(2) << "\n";
    return pv.action == policy::Action::Block ? kExitBlocked : kExitOk;
}

struct SimulateFlags {
    std::string scenario_file, csv_path, at;
    std::string dga_kind;
    std::optional<unsigned> domains_per_day, registered, queries, horizon;
    std::optional<double> lead_hours, threshold_hours, hazard;
    std::optional<std::uint64_t> seed, dga_seed;
    std::uint64_t trials = 1000;
    bool defense = false, no_defense = false;
    std::vector<double> tradeoff_leads;
};

int cmd_simulate(const SimulateFlags& flags) {
    config::KeyValues kv;
    if (!flags.scenario_file.empty()) kv = config::load_key_values(flags.scenario_file);
    if (!flags.dga_kind.empty()) kv["dga"] = flags.dga_kind;
    if (flags.domains_per_day) kv["domains_per_day"] = std::to_string(*flags.domains_per_day);
    if (flags.registered) kv["registered_count"] = std::to_string(*flags.registered);
    if (flags.queries) kv["agent_queries"] = std::to_string(*flags.queries);
    if (flags.horizon) kv["horizon_days"] = std::to_string(*flags.horizon);
    if (flags.lead_hours) kv["lead_time_hours"] = std::to_string(*flags.lead_hours);
    if (flags.threshold_hours) kv["threshold_hours"] = std::to_string(*flags.threshold_hours);
    if (flags.seed) kv["rng_seed"] = std::to_string(*flags.seed);
    if (flags.dga_seed) kv["dga_seed"] = std::to_string(*flags.dga_seed);
    if (!flags.at.empty()) kv["start_date"] = flags.at;
    if (flags.defense) kv["defense"] = "on";
    if (flags.no_defense) kv["defense"] = "off";

    dga::DgaScenario sc = config::scenario_from_key_values(kv);

    if (flags.hazard) {
        std::vector<std::int64_t> leads;
        for (double h : flags.tradeoff_leads) {
            leads.push_back(static_cast<std::int64_t>(h * kSecondsPerHour));
        }
        if (leads.empty()) {
            for (double h : {1.0, 12.0, 24.0, 48.0, 72.0, 168.0}) {
                leads.push_back(static_cast<std::int64_t>(h * kSecondsPerHour));
            }
        }
        auto table = dga::lead_time_tradeoff(sc, *flags.hazard, leads, flags.trials);
        std::cout << "lead_hours,net_success_rate\n";
        for (const auto& point : table) {
            std::cout << static_cast<double>(point.lead_seconds) / kSecondsPerHour << ","
                      << point.net_success_rate << "\n";
        }
        return kExitOk;
    }

    std::ofstream csv_file;
    std::ostream* csv = &std::cout;
    if (!flags.csv_path.empty()) {
        csv_file.open(flags.csv_path);
        if (!csv_file) throw std::runtime_error("cannot open CSV output: " + flags.csv_path);
        csv = &csv_file;
    }

    *csv << "trial,success,rendezvous_day,queries,blocked\n";
    std::uint64_t successes = 0, query_sum = 0;
    for (std::uint64_t i = 0; i < flags.trials; ++i) {
        dga::DgaScenario trial_sc = sc;
        trial_sc.rng_seed = sc.rng_seed + i;
        dga::SimOutcome outcome = dga::run_scenario(trial_sc);
        *csv << i << "," << (outcome.success ? 1 : 0) << ",";
        if (outcome.rendezvous_day) *csv << *outcome.rendezvous_day;
        *csv << "," << outcome.queries_issued << "," << outcome.blocked_queries << "\n";
        if (outcome.success) {
            ++successes;
            query_sum += outcome.queries_issued;
        }
    }
    const double rate = static_cast<double>(successes) / static_cast<double>(flags.trials);
    std::cout << "trials: " << flags.trials << "\n"
              << "successes: " << successes << "\n"
              << "success_rate: " << rate << "\n";
    if (successes) {
        std::cout << "mean_queries_to_success: "
                  << static_cast<double>(query_sum) / static_cast<double>(successes) << "\n";
    }
    return kExitOk;
}

struct EntropyFlags {
    std::string path;
    double threshold = entropy::kDefaultThreshold;
    std::size_t window = entropy::kDefaultWindow;
};

int cmd_entropy(const EntropyFlags& flags) {
    std::ifstream in(flags.path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + flags.path);
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

    auto report = entropy::classify_stream(data, flags.threshold, flags.window);
    std::cout << "offset,length,bits_per_byte,flagged\n";
    for (const auto& w : report.windows) {
        std::cout << w.offset << "," << w.length << "," << w.bits_per_byte << ","
                  << (w.flagged ? 1 : 0) << "\n";
    }
    nlohmann::ordered_json j;
    j["path"] = flags.path;
    j["length"] = report.overall.length;
    j["bits_per_byte"] = report.overall.bits_per_byte;
    j["threshold"] = report.overall.threshold;
    j["flagged"] = report.overall.flagged;
    j["windows_flagged"] = std::count_if(report.windows.begin(), report.windows.end(),
                                         [](const auto& w) { return w.flagged; });
    j["windows_total"] = report.windows.size();
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_feed_validate(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open feed file: " << path << "\n";
        return kExitOperational;
    }
    proxy::SystemTimeSource clock;
    age::AgeIndex index;
    try {
        auto stats = age::ingest_feed_csv(in, clock.now(), index);
        std::cout << "accepted: " << stats.accepted << "\n"
                  << "rejected: " << stats.rejected << "\n"
                  << "duplicates: " << stats.duplicates << "\n"
                  << "distinct_domains: " << index.size() << "\n";
        for (const auto& w : stats.warnings) std::cout << "warning: " << w << "\n";
        return kExitOk;
    } catch (const age::EmptyFeed& e) {
        std::cerr << "invalid feed: " << e.what() << "\n";
        return kExitOperational;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chronogate: delayed-DNS filtering forwarder and DGA rendezvous lab"};
    app.require_subcommand(1);

    ServeFlags serve_flags;
    auto* serve = app.add_subcommand("serve", "Run the filtering DNS forwarder");
    serve->add_option("--listen", serve_flags.listen, "Listen endpoint, ipv4:port");
    serve->add_option("--upstream", serve_flags.upstream, "Upstream resolver, ipv4:port");
    serve->add_option("--feed", serve_flags.feed, "NRD feed CSV path");
    serve->add_option("--config", serve_flags.config, "Config file path");
    serve->add_option("--log", serve_flags.log, "JSONL decision log path");
    serve->add_option("--blocklist", serve_flags.blocklist, "Plain-text blocklist dump path");
    serve->add_option("--threshold-hours", serve_flags.threshold_hours, "Age threshold in hours");
    serve->add_flag("--allow-empty-feed", serve_flags.allow_empty_feed,
                    "Start even when the feed is missing or empty");

    CheckFlags check_flags;
    auto* check = app.add_subcommand("check", "Evaluate the policy for one domain");
    check->add_option("domain", check_flags.domain, "Domain to check")->required();
    check->add_option("--feed", check_flags.feed, "NRD feed CSV path");
    check->add_option("--config", check_flags.config, "Config file path");
    check->add_option("--at", check_flags.at, "Override the clock (ISO 8601 UTC)");
    check->add_option("--threshold-hours", check_flags.threshold_hours, "Age threshold in hours");

    SimulateFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "Run DGA rendezvous trials");
    simulate->add_option("--scenario", sim_flags.scenario_file, "Scenario key=value file");
    simulate->add_option("--csv", sim_flags.csv_path, "Write per-trial CSV here");
    simulate->add_option("--dga", sim_flags.dga_kind, "toy_date or seeded_hash");
    simulate->add_option("--domains-per-day", sim_flags.domains_per_day, "D");
    simulate->add_option("--registered", sim_flags.registered, "Domains the CNC registers");
    simulate->add_option("--queries", sim_flags.queries, "Queries the agent issues per day");
    simulate->add_option("--lead-hours", sim_flags.lead_hours, "Registration lead time");
    simulate->add_option("--threshold-hours", sim_flags.threshold_hours, "Defense threshold");
    simulate->add_option("--horizon-days", sim_flags.horizon, "Days to simulate");
    simulate->add_option("--trials", sim_flags.trials, "Trial count");
    simulate->add_option("--seed", sim_flags.seed, "Base RNG seed");
    simulate->add_option("--dga-seed", sim_flags.dga_seed, "DGA seed (seeded_hash)");
    simulate->add_option("--at", sim_flags.at, "Scenario start date (ISO 8601)");
    simulate->add_flag("--defense", sim_flags.defense, "Enable the delayed-DNS defense");
    simulate->add_flag("--no-defense", sim_flags.no_defense, "Disable the defense");
    simulate->add_option("--hazard", sim_flags.hazard,
                         "Per-day detection probability; switches to tradeoff-table output");
    simulate->add_option("--leads", sim_flags.tradeoff_leads,
                         "Lead times in hours for the tradeoff table");

    EntropyFlags entropy_flags;
    auto* ent = app.add_subcommand("entropy", "Shannon-entropy window scan of a file");
    ent->add_option("path", entropy_flags.path, "File to scan")->required();
    ent->add_option("--threshold", entropy_flags.threshold, "Flag threshold, bits per byte");
    ent->add_option("--window", entropy_flags.window, "Window size in bytes");

    auto* feed = app.add_subcommand("feed", "Feed utilities");
    feed->require_subcommand(1);
    std::string feed_path;
    auto* feed_validate = feed->add_subcommand("validate", "Validate a feed CSV");
    feed_validate->add_option("path", feed_path, "Feed CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*serve) return cmd_serve(serve_flags);
        if (*check) return cmd_check(check_flags);
        if (*simulate) return cmd_simulate(sim_flags);
        if (*ent) return cmd_entropy(entropy_flags);
        if (*feed_validate) return cmd_feed_validate(feed_path);
    } catch (const config::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOperational;
    }
    return kExitUsage;
}
