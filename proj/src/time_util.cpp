#include "chronogate/time_util.hpp"

#include <cstdio>

namespace chronogate {

namespace {

bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

unsigned last_day_of_month(int y, unsigned m) {
    static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return kDays[m - 1];
}

}  // namespace

bool is_valid_civil_date(const CivilDate& d) {
    if (d.month < 1 || d.month > 12) return false;
    if (d.day < 1 || d.day > last_day_of_month(d.year, d.month)) return false;
    return true;
}

// Howard Hinnant's civil-days algorithms.
std::int64_t days_from_civil(const CivilDate& d) {
    std::int64_t y = d.year;
    const unsigned m = d.month;
    const unsigned day = d.day;
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned day = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return CivilDate{static_cast<int>(y + (m <= 2)), m, day};
}

UnixTime unix_time_from_civil(const CivilDate& d) {
    return days_from_civil(d) * kSecondsPerDay;
}

CivilDate civil_from_unix_time(UnixTime t) {
    std::int64_t days = t / kSecondsPerDay;
    if (t < 0 && t % kSecondsPerDay != 0) --days;
    return civil_from_days(days);
}

std::optional<UnixTime> parse_iso8601_utc(const std::string& text) {
    int year = 0;
    unsigned mon = 0, day = 0, hh = 0, mm = 0, ss = 0;
    char zone[8] = {0};
    int n = std::sscanf(text.c_str(), "%d-%2u-%2uT%2u:%2u:%2u%7s",
                        &year, &mon, &day, &hh, &mm, &ss, zone);
    if (n < 6) {
        // Date-only form means midnight UTC.
        if (std::sscanf(text.c_str(), "%d-%2u-%2u", &year, &mon, &day) != 3) return std::nullopt;
        hh = mm = ss = 0;
        zone[0] = 'Z';
        zone[1] = 0;
    }
    const std::string z = zone;
    if (z != "Z" && z != "z" && z != "+00:00" && z != "+0000") return std::nullopt;
    CivilDate d{year, mon, day};
    if (!is_valid_civil_date(d)) return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    return unix_time_from_civil(d) + hh * 3600 + mm * 60 + ss;
}

std::string format_iso8601_utc(UnixTime t) {
    const CivilDate d = civil_from_unix_time(t);
    std::int64_t rem = t - unix_time_from_civil(d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  d.year, d.month, d.day,
                  static_cast<int>(rem / 3600), static_cast<int>((rem / 60) % 60),
                  static_cast<int>(rem % 60));
    return buf;
}

}  // namespace chronogate
