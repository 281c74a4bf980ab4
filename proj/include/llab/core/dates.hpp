// dates.hpp - calendar dates as days since the Unix epoch, UTC only.
#pragma once

#include <cstdint>
#include <string>

namespace llab {

// Days since 1970-01-01. All market data is timestamped in UTC; a "day"
// is the UTC calendar day.
using EpochDay = std::int64_t;

constexpr std::int64_t kMsPerDay = 86'400'000;
constexpr std::int64_t kMsPerMinute = 60'000;
constexpr int kMinutesPerDay = 1440;

struct CivilDate {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
};

EpochDay civil_to_epoch_day(const CivilDate& d);
CivilDate epoch_day_to_civil(EpochDay ed);

// "YYYY-MM-DD". Throws std::invalid_argument on malformed input.
EpochDay parse_date(const std::string& s);
std::string format_date(EpochDay ed);

// Split a millisecond UTC timestamp into (day, minute-of-day).
inline EpochDay ts_to_day(std::int64_t ts_ms) {
    // Floor division; tick feeds are all post-epoch but keep it correct anyway.
    std::int64_t q = ts_ms / kMsPerDay;
    if (ts_ms % kMsPerDay < 0) --q;
    return q;
}

inline int ts_to_minute(std::int64_t ts_ms) {
    std::int64_t rem = ts_ms - ts_to_day(ts_ms) * kMsPerDay;
    return static_cast<int>(rem / kMsPerMinute);
}

}  // namespace llab
