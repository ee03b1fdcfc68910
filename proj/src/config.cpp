#include "chronogate/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace chronogate::config {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + value + "'");
    }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        std::int64_t v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for " + key + ": '" + value + "'");
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    std::int64_t v = parse_int(key, value);
    if (v < 0) throw ConfigError(key + " must be non-negative");
    return static_cast<std::uint64_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    std::string v = lower(value);
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError("bad boolean value for " + key + ": '" + value + "'");
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    if (base_dir.empty() || path.empty() || path.front() == '/') return path;
    return base_dir + "/" + path;
}

policy::Action parse_action(const std::string& key, const std::string& value) {
    auto a = policy::action_from_string(lower(value));
    if (!a) throw ConfigError("bad action for " + key + ": '" + value + "'");
    return *a;
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = lower(trim(t.substr(0, eq)));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        }
        kv[key] = value;
    }
    return kv;
}

KeyValues load_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str());
}

std::set<std::string> load_allowlist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open allowlist file: " + path);
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string t = lower(trim(line));
        if (t.empty()) continue;
        if (!t.empty() && t.back() == '.') t.pop_back();
        out.insert(t);
    }
    return out;
}

policy::PolicyConfig policy_from_key_values(const KeyValues& kv, const std::string& base_dir) {
    policy::PolicyConfig cfg;
    for (const auto& [key, value] : kv) {
        if (key == "threshold_hours") {
            cfg.threshold_seconds =
                static_cast<std::int64_t>(parse_double(key, value) * kSecondsPerHour);
        } else if (key == "young_action") {
            cfg.young_action = parse_action(key, value);
        } else if (key == "unknown_action") {
            cfg.unknown_action = parse_action(key, value);
        } else if (key == "trust_soa_heuristic") {
            cfg.soa_heuristic_trusted = parse_bool(key, value);
        } else if (key == "block_ttl_seconds") {
            cfg.block_ttl_seconds = static_cast<std::uint32_t>(parse_uint(key, value));
        } else if (key == "allowlist_path") {
            cfg.allowlist = load_allowlist(resolve_path(base_dir, value));
        }
        // Other keys belong to the enclosing proxy/scenario file.
    }
    if (!cfg.valid()) {
        throw ConfigError("policy invariant violated: threshold > 0 and block_ttl <= threshold");
    }
    return cfg;
}

dga::DgaScenario scenario_from_key_values(const KeyValues& kv) {
    dga::DgaScenario sc;
    bool defense_on = false;
    static const std::set<std::string> known = {
        "dga", "domains_per_day", "tld", "dga_seed", "registered_count", "agent_queries",
        "lead_time_hours", "horizon_days", "rng_seed", "start_date", "query_hour", "defense",
        "threshold_hours", "young_action", "unknown_action", "trust_soa_heuristic",
        "block_ttl_seconds", "allowlist_path"};
    for (const auto& [key, value] : kv) {
        if (!known.count(key)) throw ConfigError("unknown scenario key: " + key);
        if (key == "dga") {
            std::string v = lower(value);
            if (v == "toy_date" || v == "toydate") {
                sc.dga.kind = dga::DgaKind::ToyDate;
            } else if (v == "seeded_hash" || v == "seededhash") {
                sc.dga.kind = dga::DgaKind::SeededHash;
            } else {
                throw ConfigError("bad dga kind: '" + value + "'");
            }
        } else if (key == "domains_per_day") {
            sc.dga.domains_per_day = static_cast<unsigned>(parse_uint(key, value));
        } else if (key == "tld") {
            sc.dga.tld = lower(value);
        } else if (key == "dga_seed") {
            sc.dga.seed = parse_uint(key, value);
        } else if (key == "registered_count") {
            sc.registered_count = static_cast<unsigned>(parse_uint(key, value));
        } else if (key == "agent_queries") {
            sc.agent_queries = static_cast<unsigned>(parse_uint(key, value));
        } else if (key == "lead_time_hours") {
            sc.lead_time_seconds =
                static_cast<std::int64_t>(parse_double(key, value) * kSecondsPerHour);
        } else if (key == "horizon_days") {
            sc.horizon_days = static_cast<unsigned>(parse_uint(key, value));
        } else if (key == "rng_seed") {
            sc.rng_seed = parse_uint(key, value);
        } else if (key == "query_hour") {
            sc.query_hour = parse_int(key, value);
        } else if (key == "start_date") {
            auto t = parse_iso8601_utc(value);
            if (!t) throw ConfigError("bad start_date: '" + value + "'");
            sc.start_date = civil_from_unix_time(*t);
        } else if (key == "defense") {
            defense_on = parse_bool(key, value);
        }
    }
    if (defense_on) sc.defense = policy_from_key_values(kv);
    if (!sc.valid()) {
        throw ConfigError("scenario invariant violated: need 1 <= D, r <= D, q <= D");
    }
    return sc;
}

ProxySettings proxy_from_key_values(const KeyValues& kv, const std::string& base_dir) {
    ProxySettings s;
    for (const auto& [key, value] : kv) {
        if (key == "listen") {
            s.listen = value;
        } else if (key == "upstream") {
            s.upstream = value;
        } else if (key == "upstream_timeout_ms") {
            s.upstream_timeout_ms = parse_int(key, value);
            if (s.upstream_timeout_ms <= 0) throw ConfigError("upstream_timeout_ms must be > 0");
        } else if (key == "feed_path") {
            s.feed_path = resolve_path(base_dir, value);
        } else if (key == "log_path") {
            s.log_path = resolve_path(base_dir, value);
        } else if (key == "blocklist_path") {
            s.blocklist_path = resolve_path(base_dir, value);
        } else if (key == "soa_probe_enabled") {
            s.soa_probe_enabled = parse_bool(key, value);
        } else if (key == "feed_reload_minutes") {
            s.feed_reload_minutes = parse_int(key, value);
        } else if (key == "threshold_hours" || key == "young_action" || key == "unknown_action" ||
                   key == "trust_soa_heuristic" || key == "block_ttl_seconds" ||
                   key == "allowlist_path") {
            // Collected below by policy_from_key_values.
        } else {
            throw ConfigError("unknown proxy key: " + key);
        }
    }
    s.policy = policy_from_key_values(kv, base_dir);
    if (!s.upstream.empty() && s.listen == s.upstream) {
        throw ConfigError("listen and upstream endpoints must differ");
    }
    return s;
}

}  // namespace chronogate::config
