#include "chronogate/dga_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "chronogate/domain_age.hpp"

namespace chronogate::dga {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Deterministic bounded draw, identical on every platform (unlike
// std::uniform_int_distribution).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return splitmix64(state_); }

    // Uniform in [0, bound) by rejection.
    std::uint64_t bounded(std::uint64_t bound) {
        const std::uint64_t threshold = -bound % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

private:
    std::uint64_t state_;
};

const char* kSmall[] = {"zero",    "one",     "two",       "three",    "four",
                        "five",    "six",     "seven",     "eight",    "nine",
                        "ten",     "eleven",  "twelve",    "thirteen", "fourteen",
                        "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};
const char* kTens[] = {"", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy",
                       "eighty", "ninety"};

std::string number_words(unsigned n) {
    if (n < 20) return kSmall[n];
    std::string out = kTens[n / 10];
    if (n % 10) out += kSmall[n % 10];
    return out;
}

std::string hash_label(std::uint64_t seed, std::int64_t day, unsigned k, unsigned attempt) {
    std::uint64_t state = seed;
    state ^= splitmix64(state) + static_cast<std::uint64_t>(day);
    state ^= splitmix64(state) + k;
    state ^= splitmix64(state) + attempt;
    std::string label(12, 'a');
    for (char& c : label) {
        c = static_cast<char>('a' + splitmix64(state) % 26);
    }
    return label;
}

// Draws `count` distinct indices from [0, n) into out (partial Fisher-Yates
// over a caller-provided permutation buffer).
void sample_indices(Rng& rng, std::vector<std::uint32_t>& perm, unsigned n, unsigned count,
                    std::vector<std::uint32_t>& out) {
    perm.resize(n);
    std::iota(perm.begin(), perm.end(), 0u);
    out.clear();
    for (unsigned i = 0; i < count; ++i) {
        std::uint64_t j = i + rng.bounded(n - i);
        std::swap(perm[i], perm[j]);
        out.push_back(perm[i]);
    }
}

std::uint64_t binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t result = 1;
    for (unsigned i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
    }
    return result;
}

std::uint64_t gcd64(std::uint64_t a, std::uint64_t b) {
    while (b) {
        a %= b;
        std::swap(a, b);
    }
    return a;
}

// Per-trial worker reusing buffers and the per-day domain lists.
class Engine {
public:
    explicit Engine(const DgaScenario& sc) : sc_(sc) {
        if (!sc.valid()) throw std::invalid_argument("scenario violates r<=D, q<=D");
    }

    SimOutcome run(std::uint64_t seed) {
        SimOutcome outcome;
        // Scramble the (typically sequential) trial seed so per-trial streams
        // start at scattered states instead of shifted copies of one stream.
        std::uint64_t state = seed;
        Rng rng(splitmix64(state) ^ (seed << 32));
        const unsigned D = sc_.dga.domains_per_day;
        registered_flag_.assign(D, 0);

        std::int64_t start_day = days_from_civil(sc_.start_date);
        for (unsigned day = 0; day < sc_.horizon_days; ++day) {
            const CivilDate date = civil_from_days(start_day + day);
            const UnixTime query_time =
                (start_day + day) * kSecondsPerDay + sc_.query_hour * kSecondsPerHour;

            sample_indices(rng, perm_, D, sc_.registered_count, registered_);
            std::fill(registered_flag_.begin(), registered_flag_.end(), 0);
            for (auto idx : registered_) registered_flag_[idx] = 1;

            age::AgeIndex index;
            const std::vector<std::string>* names = nullptr;
            if (sc_.defense) {
                names = &day_names(date);
                const UnixTime registered_at = query_time - sc_.lead_time_seconds;
                for (auto idx : registered_) {
                    index.insert((*names)[idx], registered_at);
                }
            }

            sample_indices(rng, perm2_, D, sc_.agent_queries, queries_);
            for (auto idx : queries_) {
                ++outcome.queries_issued;
                if (sc_.defense) {
                    auto verdict = age::lookup_age((*names)[idx], query_time, index);
                    auto pv = policy::evaluate((*names)[idx], verdict, *sc_.defense);
                    if (pv.action == policy::Action::Block) {
                        ++outcome.blocked_queries;
                        continue;
                    }
                }
                if (registered_flag_[idx]) {
                    outcome.success = true;
                    outcome.rendezvous_day = day + 1;
                    return outcome;
                }
                ++outcome.nx_queries;
            }
        }
        return outcome;
    }

private:
    const std::vector<std::string>& day_names(const CivilDate& date) {
        std::int64_t key = days_from_civil(date);
        auto it = name_cache_.find(key);
        if (it == name_cache_.end()) {
            it = name_cache_.emplace(key, generate_domains(sc_.dga, date)).first;
        }
        return it->second;
    }

    const DgaScenario& sc_;
    std::vector<std::uint32_t> perm_, perm2_, registered_, queries_;
    std::vector<std::uint8_t> registered_flag_;
    std::unordered_map<std::int64_t, std::vector<std::string>> name_cache_;
};

// Generates all k-subsets of [0,n) as bitmasks (Gosper's hack).
std::vector<std::uint64_t> subsets(unsigned n, unsigned k) {
    std::vector<std::uint64_t> out;
    if (k == 0) {
        out.push_back(0);
        return out;
    }
    std::uint64_t mask = (1ull << k) - 1;
    const std::uint64_t limit = 1ull << n;
    while (mask < limit) {
        out.push_back(mask);
        std::uint64_t c = mask & -mask;
        std::uint64_t r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
        if (c == 0) break;
    }
    return out;
}

}  // namespace

std::string date_words(const CivilDate& date) {
    if (date.year < 2000 || date.year > 2099) {
        throw std::invalid_argument("ToyDate covers years 2000..2099");
    }
    return number_words(date.month) + number_words(date.day) + "twenty" +
           number_words(static_cast<unsigned>(date.year - 2000));
}

std::vector<std::string> generate_domains(const DgaSpec& spec, const CivilDate& date) {
    std::vector<std::string> out;
    out.reserve(spec.domains_per_day);
    if (spec.kind == DgaKind::ToyDate) {
        const std::string stem = date_words(date);
        for (unsigned k = 1; k <= spec.domains_per_day; ++k) {
            out.push_back(stem + std::to_string(k) + "." + spec.tld);
        }
        return out;
    }
    const std::int64_t day = days_from_civil(date);
    std::unordered_set<std::string> seen;
    for (unsigned k = 1; k <= spec.domains_per_day; ++k) {
        unsigned attempt = 0;
        std::string label;
        do {
            label = hash_label(spec.seed, day, k, attempt++);
        } while (!seen.insert(label).second);
        out.push_back(label + "." + spec.tld);
    }
    return out;
}

SimOutcome run_scenario(const DgaScenario& sc) {
    Engine engine(sc);
    return engine.run(sc.rng_seed);
}

TrialAggregate run_trials(const DgaScenario& sc, std::uint64_t n) {
    if (n < 1) throw std::invalid_argument("trial count must be >= 1");
    Engine engine(sc);
    TrialAggregate agg;
    agg.trials = n;
    std::uint64_t query_sum = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        SimOutcome outcome = engine.run(sc.rng_seed + i);
        if (outcome.success) {
            ++agg.successes;
            query_sum += outcome.queries_issued;
        }
    }
    agg.success_rate = static_cast<double>(agg.successes) / static_cast<double>(n);
    if (agg.successes > 0) {
        agg.mean_queries_to_success =
            static_cast<double>(query_sum) / static_cast<double>(agg.successes);
    }
    return agg;
}

Fraction brute_force_success_probability(const DgaScenario& sc) {
    if (!sc.valid()) throw std::invalid_argument("scenario violates r<=D, q<=D");
    if (sc.horizon_days != 1) throw TooLarge("enumeration oracle is single-day only");
    const unsigned D = sc.dga.domains_per_day;
    const unsigned r = sc.registered_count;
    const unsigned q = sc.agent_queries;
    if (D > 62) throw TooLarge("enumeration limited to D <= 62");
    const std::uint64_t b_reg = binomial(D, r);
    const std::uint64_t b_query = binomial(D, q);
    if (b_reg > 10'000'000ull || b_query > 10'000'000ull ||
        b_reg * b_query > 10'000'000ull) {
        throw TooLarge("C(D,r) * C(D,q) exceeds the desk-scale guard");
    }

    if (sc.defense) {
        // Registered-domain age is lead_time for every candidate; the policy
        // either kills all of them or none.
        age::AgeVerdict v;
        v.known = true;
        v.age_seconds = std::max<std::int64_t>(sc.lead_time_seconds, 0);
        v.source = age::AgeSource::Feed;
        auto pv = policy::evaluate("oracle.test", v, *sc.defense);
        if (pv.action == policy::Action::Block) return Fraction{0, 1};
    }

    const auto reg_sets = subsets(D, r);
    const auto query_sets = subsets(D, q);
    std::uint64_t hits = 0;
    for (std::uint64_t rm : reg_sets) {
        for (std::uint64_t qm : query_sets) {
            if (rm & qm) ++hits;
        }
    }
    const std::uint64_t denom = reg_sets.size() * query_sets.size();
    const std::uint64_t g = hits ? gcd64(hits, denom) : denom;
    return Fraction{hits / g, denom / g};
}

double closed_form_success_rate(unsigned D, unsigned r, unsigned q) {
    if (r > D || q > D) throw std::invalid_argument("requires r<=D and q<=D");
    if (r == 0 || q == 0) return 0.0;
    if (q > D - r) return 1.0;
    long double miss = 1.0L;
    for (unsigned i = 0; i < q; ++i) {
        miss *= static_cast<long double>(D - r - i) / static_cast<long double>(D - i);
    }
    return static_cast<double>(1.0L - miss);
}

std::vector<HazardPoint> lead_time_tradeoff(const DgaScenario& sc, double hazard_p,
                                            const std::vector<std::int64_t>& lead_times,
                                            std::uint64_t trials_per_point) {
    if (hazard_p < 0.0 || hazard_p > 1.0) {
        throw std::invalid_argument("hazard probability must be in [0, 1]");
    }
    std::vector<HazardPoint> out;
    for (std::int64_t lead : lead_times) {
        HazardPoint point;
        point.lead_seconds = lead;
        if (sc.defense && lead < sc.defense->threshold_seconds) {
            point.net_success_rate = 0.0;
        } else {
            DgaScenario varied = sc;
            varied.lead_time_seconds = lead;
            const double base = run_trials(varied, trials_per_point).success_rate;
            const auto advance_days = static_cast<double>(lead / kSecondsPerDay);
            point.net_success_rate = base * std::pow(1.0 - hazard_p, advance_days);
        }
        out.push_back(point);
    }
    return out;
}

}  // namespace chronogate::dga
