#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chronogate/policy.hpp"
#include "chronogate/time_util.hpp"

namespace chronogate::dga {

enum class DgaKind {
    ToyDate,     // date rendered as English number words plus an index suffix
    SeededHash,  // 12 pseudorandom lowercase letters from (seed, date, index)
};

struct DgaSpec {
    DgaKind kind = DgaKind::SeededHash;
    unsigned domains_per_day = 250;
    std::string tld = "test";
    std::uint64_t seed = 0;
};

// English number words for the ToyDate generator, e.g. 2012-05-06 ->
// "fivesixtwentytwelve" (month, day, year). Years 2000..2099.
std::string date_words(const CivilDate& date);

// Exactly domains_per_day distinct names, stable across runs.
std::vector<std::string> generate_domains(const DgaSpec& spec, const CivilDate& date);

struct DgaScenario {
    DgaSpec dga;
    unsigned registered_count = 0;       // domains the CNC registers per day
    unsigned agent_queries = 0;          // queries the agent issues per day
    std::int64_t lead_time_seconds = 0;  // registration happens this long before the query
    std::optional<policy::PolicyConfig> defense;
    unsigned horizon_days = 1;
    std::uint64_t rng_seed = 0;
    CivilDate start_date{2017, 8, 24};
    std::int64_t query_hour = 12;  // agent query time of day, UTC

    bool valid() const {
        return registered_count <= dga.domains_per_day &&
               agent_queries <= dga.domains_per_day && horizon_days >= 1 &&
               dga.domains_per_day >= 1;
    }
};

struct SimOutcome {
    bool success = false;
    std::optional<unsigned> rendezvous_day;  // 1-based day index
    std::uint64_t queries_issued = 0;
    std::uint64_t blocked_queries = 0;
    std::uint64_t nx_queries = 0;
};

struct TrialAggregate {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double success_rate = 0.0;  // successes / trials exactly
    std::optional<double> mean_queries_to_success;
};

SimOutcome run_scenario(const DgaScenario& sc);

// n independent trials with derived seeds rng_seed + i.
TrialAggregate run_trials(const DgaScenario& sc, std::uint64_t n);

struct Fraction {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Fraction&) const = default;
};

class TooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exact single-day rendezvous probability by full enumeration of
// registration sets x query sets. Guarded: C(D,r) * C(D,q) must be <= 1e7
// and the scenario horizon 1 day. Throws TooLarge otherwise.
Fraction brute_force_success_probability(const DgaScenario& sc);

// Hypergeometric closed form 1 - C(D-r,q)/C(D,q), ignoring any defense.
double closed_form_success_rate(unsigned D, unsigned r, unsigned q);

struct HazardPoint {
    std::int64_t lead_seconds = 0;
    double net_success_rate = 0.0;
};

// Attacker lead-time tradeoff under a per-day detection hazard p: leads
// shorter than the defense threshold are killed by policy; longer leads pay
// (1-p) per full day of advance registration.
std::vector<HazardPoint> lead_time_tradeoff(const DgaScenario& sc, double hazard_p,
                                            const std::vector<std::int64_t>& lead_times,
                                            std::uint64_t trials_per_point);

}  // namespace chronogate::dga
