#include "llab/core/dates.hpp"

#include <cstdio>
#include <stdexcept>

namespace llab {

// Howard Hinnant's civil-from-days / days-from-civil algorithms.
EpochDay civil_to_epoch_day(const CivilDate& d) {
    int y = d.year;
    const int m = d.month;
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d.day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate epoch_day_to_civil(EpochDay ed) {
    std::int64_t z = ed + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned day = doy - (153 * mp + 2) / 5 + 1;
    const unsigned month = mp + (mp < 10 ? 3 : -9);
    return CivilDate{static_cast<int>(y + (month <= 2)), static_cast<int>(month),
                     static_cast<int>(day)};
}

EpochDay parse_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
        throw std::invalid_argument("bad date: " + s);
    }
    auto digits = [&](int pos, int len) {
        int v = 0;
        for (int i = 0; i < len; ++i) {
            char c = s[pos + i];
            if (c < '0' || c > '9') throw std::invalid_argument("bad date: " + s);
            v = v * 10 + (c - '0');
        }
        return v;
    };
    CivilDate d{digits(0, 4), digits(5, 2), digits(8, 2)};
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) {
        throw std::invalid_argument("bad date: " + s);
    }
    return civil_to_epoch_day(d);
}

std::string format_date(EpochDay ed) {
    CivilDate d = epoch_day_to_civil(ed);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

}  // namespace llab
