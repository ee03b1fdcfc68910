#include "chronogate/domain_age.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

namespace chronogate::age {

namespace {

// Small public-suffix snapshot bundled with the artifact. Deterministic by
// construction; not a live PSL mirror.
constexpr std::array<const char*, 28> kPublicSuffixes = {
    "com",   "net",   "org",    "edu",    "gov",    "mil",    "int",
    "info",  "biz",   "io",     "co",     "me",     "xyz",    "top",
    "test",  "example", "invalid", "localhost",
    "co.uk", "org.uk", "ac.uk",  "gov.uk",
    "com.au", "net.au", "org.au",
    "co.jp", "ne.jp",  "com.br",
};

bool ends_with_suffix(const std::string& domain, const std::string& suffix) {
    if (domain.size() < suffix.size()) return false;
    if (domain.size() == suffix.size()) return domain == suffix;
    return domain.compare(domain.size() - suffix.size(), suffix.size(), suffix) == 0 &&
           domain[domain.size() - suffix.size() - 1] == '.';
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool valid_feed_domain(const std::string& domain) {
    if (domain.empty() || domain.find('.') == std::string::npos) return false;
    std::size_t encoded = 1, label_len = 0;
    for (char c : domain) {
        if (c == '.') {
            if (label_len == 0 || label_len > 63) return false;
            encoded += 1 + label_len;
            label_len = 0;
        } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') {
            ++label_len;
        } else {
            return false;
        }
    }
    if (label_len == 0 || label_len > 63) return false;
    encoded += 1 + label_len;
    return encoded <= 255;
}

}  // namespace

std::optional<UnixTime> AgeIndex::find(const std::string& canonical_domain) const {
    auto it = registered_.find(canonical_domain);
    if (it == registered_.end()) return std::nullopt;
    return it->second;
}

void AgeIndex::insert(const std::string& canonical_domain, UnixTime registered_at) {
    auto [it, inserted] = registered_.emplace(canonical_domain, registered_at);
    if (!inserted && registered_at < it->second) it->second = registered_at;
}

IngestStats ingest_feed_csv(std::istream& in, UnixTime now, AgeIndex& index) {
    IngestStats stats;
    std::string line;
    bool first = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (first) {
            first = false;
            if (to_lower(t) == "domain,registered_at") continue;
        }
        auto comma = t.find(',');
        if (comma == std::string::npos) {
            ++stats.rejected;
            continue;
        }
        std::string domain = to_lower(trim(t.substr(0, comma)));
        if (!domain.empty() && domain.back() == '.') domain.pop_back();
        auto when = parse_iso8601_utc(trim(t.substr(comma + 1)));
        if (!valid_feed_domain(domain) || !when) {
            ++stats.rejected;
            continue;
        }
        if (*when > now) {
            ++stats.rejected;
            std::ostringstream w;
            w << "line " << lineno << ": registered_at is in the future for " << domain;
            stats.warnings.push_back(w.str());
            continue;
        }
        if (index.find(domain)) ++stats.duplicates;
        index.insert(domain, *when);
        ++stats.accepted;
    }
    index.stats_.accepted += stats.accepted;
    index.stats_.rejected += stats.rejected;
    index.stats_.duplicates += stats.duplicates;
    if (stats.accepted == 0) throw EmptyFeed("feed contained no well-formed rows");
    return stats;
}

std::optional<std::pair<CivilDate, unsigned>> parse_rfc1912_serial(std::uint32_t serial) {
    // YYYYMMDDnn requires all ten decimal digits.
    if (serial < 1983000000u) return std::nullopt;
    unsigned rev = serial % 100;
    std::uint32_t date_part = serial / 100;
    CivilDate d;
    d.day = date_part % 100;
    d.month = (date_part / 100) % 100;
    d.year = static_cast<int>(date_part / 10000);
    if (d.year < 1983 || d.year > 2100) return std::nullopt;
    if (!is_valid_civil_date(d)) return std::nullopt;
    return std::make_pair(d, rev);
}

std::string registrable_domain(const std::string& canonical_domain) {
    std::string best_suffix;
    for (const char* s : kPublicSuffixes) {
        std::string suffix = s;
        if (ends_with_suffix(canonical_domain, suffix) && suffix.size() > best_suffix.size()) {
            best_suffix = suffix;
        }
    }
    if (best_suffix.empty()) {
        // Unknown TLD: treat the last label as the suffix.
        auto dot = canonical_domain.rfind('.');
        if (dot == std::string::npos) return canonical_domain;
        best_suffix = canonical_domain.substr(dot + 1);
    }
    if (best_suffix.size() == canonical_domain.size()) return canonical_domain;
    std::size_t suffix_start = canonical_domain.size() - best_suffix.size();
    auto label_start = canonical_domain.rfind('.', suffix_start - 2);
    if (label_start == std::string::npos) return canonical_domain;
    return canonical_domain.substr(label_start + 1);
}

bool is_public_suffix(const std::string& canonical_domain) {
    return std::any_of(kPublicSuffixes.begin(), kPublicSuffixes.end(),
                       [&](const char* s) { return canonical_domain == s; });
}

std::optional<UnixTime> SoaCache::find(const std::string& canonical_domain) const {
    std::lock_guard lock(mu_);
    auto it = dates_.find(canonical_domain);
    if (it == dates_.end()) return std::nullopt;
    return it->second;
}

void SoaCache::insert(const std::string& canonical_domain, UnixTime registered_at) {
    std::lock_guard lock(mu_);
    dates_[canonical_domain] = registered_at;
}

void SoaCache::note_probe_failure(const std::string& canonical_domain, UnixTime until) {
    std::lock_guard lock(mu_);
    negative_until_[canonical_domain] = until;
}

bool SoaCache::probe_suppressed(const std::string& canonical_domain, UnixTime now) const {
    std::lock_guard lock(mu_);
    if (dates_.count(canonical_domain)) return true;
    auto it = negative_until_.find(canonical_domain);
    return it != negative_until_.end() && now < it->second;
}

namespace {

AgeVerdict known_verdict(UnixTime since, UnixTime now, AgeSource source) {
    AgeVerdict v;
    v.known = true;
    v.since = since;
    v.source = source;
    if (now < since) {
        v.age_seconds = 0;
        v.clamped = true;
    } else {
        v.age_seconds = now - since;
    }
    return v;
}

}  // namespace

AgeVerdict lookup_age(const std::string& domain, UnixTime now, const AgeIndex& index,
                      const SoaCache* soa_cache) {
    if (auto t = index.find(domain)) {
        return known_verdict(*t, now, AgeSource::Feed);
    }
    const std::string apex = registrable_domain(domain);
    if (apex != domain) {
        if (auto t = index.find(apex)) {
            return known_verdict(*t, now, AgeSource::Feed);
        }
    }
    if (soa_cache) {
        if (auto t = soa_cache->find(domain)) {
            return known_verdict(*t, now, AgeSource::Cache);
        }
        if (apex != domain) {
            if (auto t = soa_cache->find(apex)) {
                return known_verdict(*t, now, AgeSource::Cache);
            }
        }
    }
    return AgeVerdict::unknown();
}

std::optional<AgeVerdict> apply_soa_heuristic(const wire::SoaRdata& soa,
                                              const std::string& domain, UnixTime now,
                                              SoaCache& cache) {
    auto parsed = parse_rfc1912_serial(soa.serial);
    if (!parsed) return std::nullopt;
    UnixTime since = unix_time_from_civil(parsed->first);
    cache.insert(domain, since);
    AgeVerdict v = known_verdict(since, now, AgeSource::SoaHeuristic);
    return v;
}

}  // namespace chronogate::age
