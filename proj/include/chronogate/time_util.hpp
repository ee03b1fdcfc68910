#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace chronogate {

// Seconds since the Unix epoch, UTC.
using UnixTime = std::int64_t;

constexpr std::int64_t kSecondsPerDay = 86400;
constexpr std::int64_t kSecondsPerHour = 3600;

struct CivilDate {
    int year = 0;
    unsigned month = 0;  // 1..12
    unsigned day = 0;    // 1..31

    bool operator==(const CivilDate&) const = default;
};

bool is_valid_civil_date(const CivilDate& d);

// Days since 1970-01-01 for a valid proleptic-Gregorian date.
std::int64_t days_from_civil(const CivilDate& d);
CivilDate civil_from_days(std::int64_t days);

// Midnight UTC of the given date.
UnixTime unix_time_from_civil(const CivilDate& d);
CivilDate civil_from_unix_time(UnixTime t);

// Accepts `YYYY-MM-DDTHH:MM:SSZ` and `YYYY-MM-DDTHH:MM:SS+00:00`;
// fractional seconds are not supported.
std::optional<UnixTime> parse_iso8601_utc(const std::string& text);
std::string format_iso8601_utc(UnixTime t);

}  // namespace chronogate
