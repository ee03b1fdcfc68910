#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "chronogate/dns_wire.hpp"
#include "chronogate/time_util.hpp"

namespace chronogate::age {

struct FeedRecord {
    std::string domain;  // canonical lowercase
    UnixTime registered_at = 0;
};

enum class AgeSource {
    Feed,
    SoaHeuristic,
    Cache,
};

struct AgeVerdict {
    bool known = false;
    std::int64_t age_seconds = 0;  // clamped to >= 0
    UnixTime since = 0;
    AgeSource source = AgeSource::Feed;
    bool clamped = false;  // registered_at was after the query clock

    static AgeVerdict unknown() { return AgeVerdict{}; }
};

struct IngestStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;   // malformed or future-dated rows
    std::size_t duplicates = 0; // rows for a domain already present
    std::vector<std::string> warnings;
};

class EmptyFeed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Immutable after construction; share via shared_ptr and swap atomically
// on reload.
class AgeIndex {
public:
    std::optional<UnixTime> find(const std::string& canonical_domain) const;
    std::size_t size() const { return registered_.size(); }
    const IngestStats& stats() const { return stats_; }

    // Earliest registered_at wins on duplicates.
    void insert(const std::string& canonical_domain, UnixTime registered_at);

private:
    friend IngestStats ingest_feed_csv(std::istream& in, UnixTime now, AgeIndex& index);

    std::unordered_map<std::string, UnixTime> registered_;
    IngestStats stats_;
};

// Feed CSV: header line `domain,registered_at`, then `<domain>,<ISO 8601 UTC>`
// rows; `#` lines are comments. Malformed rows are counted and skipped.
// Throws EmptyFeed when zero well-formed rows were found.
IngestStats ingest_feed_csv(std::istream& in, UnixTime now, AgeIndex& index);

// Decimal YYYYMMDDnn per the RFC1912 serial convention. Absent unless the
// year is in 1983..2100 and month/day form a real calendar date.
std::optional<std::pair<CivilDate, unsigned>> parse_rfc1912_serial(std::uint32_t serial);

// Registrable domain per a bundled public-suffix snapshot: longest matching
// suffix plus one label. A name at or below a public suffix maps to itself.
std::string registrable_domain(const std::string& canonical_domain);

bool is_public_suffix(const std::string& canonical_domain);

// Caches SOA-derived registration dates plus negative entries for failed
// probes. Concurrent reads, serialized inserts.
class SoaCache {
public:
    std::optional<UnixTime> find(const std::string& canonical_domain) const;
    void insert(const std::string& canonical_domain, UnixTime registered_at);

    void note_probe_failure(const std::string& canonical_domain, UnixTime until);
    bool probe_suppressed(const std::string& canonical_domain, UnixTime now) const;

private:
    mutable std::mutex mu_;
    std::unordered_map<std::string, UnixTime> dates_;
    std::unordered_map<std::string, UnixTime> negative_until_;
};

// Exact-FQDN feed hit wins, then registrable-domain feed hit, then the SOA
// cache, then Unknown.
AgeVerdict lookup_age(const std::string& domain, UnixTime now, const AgeIndex& index,
                      const SoaCache* soa_cache = nullptr);

// Applies the serial heuristic to a freshly extracted SOA: on a date-shaped
// serial, caches midnight UTC of that date and returns the verdict.
std::optional<AgeVerdict> apply_soa_heuristic(const wire::SoaRdata& soa,
                                              const std::string& domain, UnixTime now,
                                              SoaCache& cache);

}  // namespace chronogate::age
