#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "chronogate/domain_age.hpp"
#include "chronogate/time_util.hpp"

namespace chronogate::policy {

enum class Action {
    Allow,
    Block,
    AlertOnly,
};

enum class Reason {
    Allowlisted,
    YoungDomain,
    UnknownAge,
    OldDomain,
};

const char* to_string(Action a);
const char* to_string(Reason r);
std::optional<Action> action_from_string(const std::string& s);

struct PolicyConfig {
    std::int64_t threshold_seconds = 24 * kSecondsPerHour;
    Action young_action = Action::Block;
    Action unknown_action = Action::Allow;
    bool soa_heuristic_trusted = false;
    std::set<std::string> allowlist;  // canonical lowercase domains
    std::uint32_t block_ttl_seconds = 60;

    // threshold > 0 and block_ttl <= threshold.
    bool valid() const {
        return threshold_seconds > 0 &&
               static_cast<std::int64_t>(block_ttl_seconds) <= threshold_seconds;
    }
};

struct PolicyVerdict {
    Action action = Action::Allow;
    Reason reason = Reason::UnknownAge;
    std::optional<std::int64_t> age_seconds;
    std::optional<age::AgeSource> source;
};

// The delayed-DNS rule. Allowlist (exact or parent-domain) wins outright;
// otherwise a domain younger than the threshold gets young_action, an old
// one is allowed, and unknown age gets unknown_action. Untrusted
// SOA-heuristic verdicts are treated as unknown for enforcement.
PolicyVerdict evaluate(const std::string& domain, const age::AgeVerdict& verdict,
                       const PolicyConfig& cfg);

bool allowlisted(const std::string& domain, const std::set<std::string>& allowlist);

}  // namespace chronogate::policy
