#pragma once

#include <map>
#include <optional>
#include <string>

#include "chronogate/dga_lab.hpp"
#include "chronogate/policy.hpp"

namespace chronogate::config {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Line-oriented `key = value` files; `#` starts a comment. Unknown keys are
// rejected by the typed loaders below.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
KeyValues load_key_values(const std::string& path);

// Keys: threshold_hours, young_action, unknown_action, trust_soa_heuristic,
// block_ttl_seconds, allowlist_path.
policy::PolicyConfig policy_from_key_values(const KeyValues& kv,
                                            const std::string& base_dir = "");

// One domain per line, `#` comments.
std::set<std::string> load_allowlist(const std::string& path);

// Scenario keys: dga, domains_per_day, tld, dga_seed, registered_count,
// agent_queries, lead_time_hours, horizon_days, rng_seed, start_date,
// query_hour, defense — plus the policy keys above when defense = on.
dga::DgaScenario scenario_from_key_values(const KeyValues& kv);

struct ProxySettings {
    std::string listen = "127.0.0.1:5353";
    std::string upstream;
    std::int64_t upstream_timeout_ms = 2000;
    std::string feed_path;
    std::string log_path;
    std::string blocklist_path;
    bool soa_probe_enabled = true;
    std::int64_t feed_reload_minutes = 60;
    policy::PolicyConfig policy;
};

ProxySettings proxy_from_key_values(const KeyValues& kv, const std::string& base_dir = "");

}  // namespace chronogate::config
