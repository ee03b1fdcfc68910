#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "chronogate/config.hpp"
#include "chronogate/domain_age.hpp"
#include "chronogate/log_event.hpp"
#include "chronogate/policy.hpp"

namespace chronogate::proxy {

using Bytes = std::vector<std::uint8_t>;

// Blocking single-datagram exchange with the upstream resolver; nullopt on
// timeout or transport failure. Tests substitute a scripted fake.
class UpstreamTransport {
public:
    virtual ~UpstreamTransport() = default;
    virtual std::optional<Bytes> exchange(const Bytes& query) = 0;
};

class TimeSource {
public:
    virtual ~TimeSource() = default;
    virtual UnixTime now() = 0;
};

class SystemTimeSource : public TimeSource {
public:
    UnixTime now() override;
};

struct ProxyState {
    std::shared_ptr<const age::AgeIndex> index;
    age::SoaCache soa_cache;
    policy::PolicyConfig policy;
    UpstreamTransport* upstream = nullptr;
    bool soa_probe_enabled = true;
    std::mt19937 id_rng{0xC0FFEE};
};

struct QueryOutcome {
    std::optional<Bytes> response;
    std::vector<LogEvent> events;
    // Registrable domains whose SOA should be probed out of band.
    std::vector<std::string> probe_candidates;
};

// Full decision path for one inbound datagram. Blocked queries never touch
// the upstream; garbage never throws.
QueryOutcome handle_query(std::span<const std::uint8_t> wire, const std::string& client,
                          UnixTime now, ProxyState& state);

// Builds the SOA probe query for a registrable domain.
Bytes build_soa_probe(const std::string& domain, std::uint16_t id);

// Runs one scheduled probe through the transport and, on a date-shaped
// serial, populates the SOA cache; failures set a 1h negative entry.
void run_soa_probe(const std::string& domain, UnixTime now, ProxyState& state);

struct ServeOptions {
    config::ProxySettings settings;
    bool allow_empty_feed = false;
};

// Binds and serves until terminated. Throws on startup failure (bad bind,
// unreadable feed).
void run(const ServeOptions& options, const std::atomic<bool>* stop_flag = nullptr);

}  // namespace chronogate::proxy
