#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chronogate/dga_lab.hpp"
#include "chronogate/domain_age.hpp"
#include "chronogate/entropy_guard.hpp"
#include "chronogate/policy.hpp"

namespace py = pybind11;
using namespace chronogate;

namespace {

std::span<const std::uint8_t> as_span(const py::bytes& data) {
    char* buf = nullptr;
    py::ssize_t len = 0;
    if (PyBytes_AsStringAndSize(data.ptr(), &buf, &len) != 0) {
        throw py::error_already_set();
    }
    return {reinterpret_cast<const std::uint8_t*>(buf), static_cast<std::size_t>(len)};
}

CivilDate parse_date(const std::string& iso_date) {
    auto t = parse_iso8601_utc(iso_date);
    if (!t) throw py::value_error("expected an ISO 8601 date: " + iso_date);
    return civil_from_unix_time(*t);
}

dga::DgaScenario build_scenario(const std::string& kind, unsigned domains_per_day,
                                unsigned registered, unsigned queries, double lead_hours,
                                bool defense, double threshold_hours, unsigned horizon_days,
                                std::uint64_t seed, std::uint64_t dga_seed,
                                const std::string& start_date, const std::string& tld) {
    dga::DgaScenario sc;
    if (kind == "toy_date") {
        sc.dga.kind = dga::DgaKind::ToyDate;
    } else if (kind == "seeded_hash") {
        sc.dga.kind = dga::DgaKind::SeededHash;
    } else {
        throw py::value_error("kind must be 'toy_date' or 'seeded_hash'");
    }
    sc.dga.domains_per_day = domains_per_day;
    sc.dga.tld = tld;
    sc.dga.seed = dga_seed;
    sc.registered_count = registered;
    sc.agent_queries = queries;
    sc.lead_time_seconds = static_cast<std::int64_t>(lead_hours * kSecondsPerHour);
    sc.horizon_days = horizon_days;
    sc.rng_seed = seed;
    sc.start_date = parse_date(start_date);
    if (defense) {
        policy::PolicyConfig cfg;
        cfg.threshold_seconds = static_cast<std::int64_t>(threshold_hours * kSecondsPerHour);
        if (!cfg.valid()) throw py::value_error("threshold_hours must be positive");
        sc.defense = cfg;
    }
    return sc;
}

}  // namespace

PYBIND11_MODULE(_chronogate, m) {
    m.doc() = "Delayed-DNS policy engine and DGA rendezvous simulator";

    m.def(
        "shannon_entropy",
        [](const py::bytes& data) { return entropy::shannon_entropy(as_span(data)); },
        py::arg("data"), "Frequency-based Shannon entropy in bits per byte.");

    m.def(
        "classify_stream",
        [](const py::bytes& data, double threshold, std::size_t window) {
            auto report = entropy::classify_stream(as_span(data), threshold, window);
            py::list windows;
            for (const auto& w : report.windows) {
                py::dict d;
                d["offset"] = w.offset;
                d["length"] = w.length;
                d["bits_per_byte"] = w.bits_per_byte;
                d["flagged"] = w.flagged;
                windows.append(d);
            }
            py::dict overall;
            overall["bits_per_byte"] = report.overall.bits_per_byte;
            overall["length"] = report.overall.length;
            overall["flagged"] = report.overall.flagged;
            py::dict out;
            out["windows"] = windows;
            out["overall"] = overall;
            return out;
        },
        py::arg("data"), py::arg("threshold") = entropy::kDefaultThreshold,
        py::arg("window") = entropy::kDefaultWindow);

    m.def(
        "parse_rfc1912_serial",
        [](std::uint32_t serial) -> py::object {
            auto parsed = age::parse_rfc1912_serial(serial);
            if (!parsed) return py::none();
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", parsed->first.year,
                          parsed->first.month, parsed->first.day);
            return py::make_tuple(std::string(buf), parsed->second);
        },
        py::arg("serial"), "Decode a YYYYMMDDnn serial, or None when not date-shaped.");

    m.def("registrable_domain", &age::registrable_domain, py::arg("domain"));

    m.def(
        "evaluate_policy",
        [](py::object age_hours, double threshold_hours, const std::string& young_action,
           const std::string& unknown_action, const std::string& source) {
            policy::PolicyConfig cfg;
            cfg.threshold_seconds =
                static_cast<std::int64_t>(threshold_hours * kSecondsPerHour);
            if (auto a = policy::action_from_string(young_action)) cfg.young_action = *a;
            if (auto a = policy::action_from_string(unknown_action)) cfg.unknown_action = *a;
            age::AgeVerdict v;
            if (!age_hours.is_none()) {
                v.known = true;
                v.age_seconds = static_cast<std::int64_t>(age_hours.cast<double>() *
                                                          kSecondsPerHour);
                v.source = source == "soa_heuristic" ? age::AgeSource::SoaHeuristic
                                                     : age::AgeSource::Feed;
            }
            auto pv = policy::evaluate("py.test", v, cfg);
            return py::make_tuple(policy::to_string(pv.action), policy::to_string(pv.reason));
        },
        py::arg("age_hours"), py::arg("threshold_hours") = 24.0,
        py::arg("young_action") = "block", py::arg("unknown_action") = "allow",
        py::arg("source") = "feed");

    m.def(
        "generate_domains",
        [](const std::string& kind, unsigned domains_per_day, const std::string& date,
           std::uint64_t seed, const std::string& tld) {
            dga::DgaSpec spec;
            spec.kind = kind == "toy_date" ? dga::DgaKind::ToyDate : dga::DgaKind::SeededHash;
            spec.domains_per_day = domains_per_day;
            spec.seed = seed;
            spec.tld = tld;
            return dga::generate_domains(spec, parse_date(date));
        },
        py::arg("kind"), py::arg("domains_per_day"), py::arg("date"), py::arg("seed") = 0,
        py::arg("tld") = "test");

    m.def(
        "run_trials",
        [](const std::string& kind, unsigned domains_per_day, unsigned registered,
           unsigned queries, double lead_hours, bool defense, double threshold_hours,
           unsigned horizon_days, std::uint64_t seed, std::uint64_t dga_seed,
           const std::string& start_date, const std::string& tld, std::uint64_t trials) {
            auto sc = build_scenario(kind, domains_per_day, registered, queries, lead_hours,
                                     defense, threshold_hours, horizon_days, seed, dga_seed,
                                     start_date, tld);
            auto agg = dga::run_trials(sc, trials);
            py::dict out;
            out["trials"] = agg.trials;
            out["successes"] = agg.successes;
            out["success_rate"] = agg.success_rate;
            if (agg.mean_queries_to_success) {
                out["mean_queries_to_success"] = *agg.mean_queries_to_success;
            } else {
                out["mean_queries_to_success"] = py::none();
            }
            return out;
        },
        py::arg("kind") = "seeded_hash", py::arg("domains_per_day") = 250,
        py::arg("registered") = 3, py::arg("queries") = 100, py::arg("lead_hours") = 3.0,
        py::arg("defense") = false, py::arg("threshold_hours") = 24.0,
        py::arg("horizon_days") = 1, py::arg("seed") = 0, py::arg("dga_seed") = 0,
        py::arg("start_date") = "2017-08-24", py::arg("tld") = "test",
        py::arg("trials") = 1000);

    m.def(
        "brute_force_success_probability",
        [](unsigned domains_per_day, unsigned registered, unsigned queries) {
            dga::DgaScenario sc;
            sc.dga.domains_per_day = domains_per_day;
            sc.registered_count = registered;
            sc.agent_queries = queries;
            auto f = dga::brute_force_success_probability(sc);
            return py::make_tuple(f.num, f.den);
        },
        py::arg("domains_per_day"), py::arg("registered"), py::arg("queries"),
        "Exact single-day rendezvous probability as a reduced fraction.");

    m.def("closed_form_success_rate", &dga::closed_form_success_rate,
          py::arg("domains_per_day"), py::arg("registered"), py::arg("queries"));

    py::register_exception<dga::TooLarge>(m, "TooLarge");
}
