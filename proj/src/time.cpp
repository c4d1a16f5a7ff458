#include "volbench/time.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace volbench {

namespace {

// Howard Hinnant's civil-from-days / days-from-civil algorithms.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
}

// Day of month of the n-th given weekday (0=Mon..6=Sun) in (year, month).
Date nth_weekday_of_month(int year, unsigned month, int weekday, int n) {
    Date first(year, month, 1);
    int delta = (weekday - first.weekday() + 7) % 7 + (n - 1) * 7;
    return Date::from_days(first.days_since_epoch() + delta);
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) : days_(days_from_civil(year, month, day)) {}

Date Date::from_string(const std::string& iso) {
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    if (std::sscanf(iso.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3 || m < 1 || m > 12 ||
        d < 1 || d > 31) {
        throw ParseError("invalid date: '" + iso + "'");
    }
    return Date(y, m, d);
}

int Date::year() const {
    int y;
    unsigned m, d;
    civil_from_days(days_, y, m, d);
    return y;
}

unsigned Date::month() const {
    int y;
    unsigned m, d;
    civil_from_days(days_, y, m, d);
    return m;
}

unsigned Date::day() const {
    int y;
    unsigned m, d;
    civil_from_days(days_, y, m, d);
    return d;
}

int Date::weekday() const {
    // 1970-01-01 was a Thursday (index 3).
    return static_cast<int>(((days_ % 7) + 7 + 3) % 7);
}

std::string Date::to_string() const {
    int y;
    unsigned m, d;
    civil_from_days(days_, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
    return buf;
}

Timestamp Timestamp::parse_rfc3339(const std::string& text) {
    int y = 0;
    unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
    int consumed = 0;
    if (std::sscanf(text.c_str(), "%d-%u-%uT%u:%u:%u%n", &y, &mo, &d, &h, &mi, &s, &consumed) !=
            6 ||
        mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60) {
        throw ParseError("invalid RFC3339 timestamp: '" + text + "'");
    }
    std::size_t pos = static_cast<std::size_t>(consumed);
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    int offset_seconds = 0;
    if (pos >= text.size()) {
        throw ParseError("timestamp missing timezone offset: '" + text + "'");
    }
    if (text[pos] == 'Z' || text[pos] == 'z') {
        // UTC
    } else if (text[pos] == '+' || text[pos] == '-') {
        unsigned oh = 0, om = 0;
        if (std::sscanf(text.c_str() + pos + 1, "%u:%u", &oh, &om) != 2 || oh > 23 || om > 59) {
            throw ParseError("invalid timezone offset in '" + text + "'");
        }
        offset_seconds = static_cast<int>(oh * 3600 + om * 60);
        if (text[pos] == '-') offset_seconds = -offset_seconds;
    } else {
        throw ParseError("invalid timezone offset in '" + text + "'");
    }
    std::int64_t days = days_from_civil(y, mo, d);
    std::int64_t local = days * 86400 + h * 3600 + mi * 60 + s;
    return Timestamp{local - offset_seconds};
}

std::string Timestamp::to_rfc3339_utc() const {
    std::int64_t days = epoch_seconds >= 0 ? epoch_seconds / 86400 : (epoch_seconds - 86399) / 86400;
    int sod = static_cast<int>(epoch_seconds - days * 86400);
    int y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", y, m, d, sod / 3600,
                  (sod / 60) % 60, sod % 60);
    return buf;
}

ExchangeTimezone::ExchangeTimezone(const std::string& name) : name_(name) {
    if (name == "America/New_York") {
        us_eastern_ = true;
    } else if (name == "UTC") {
        fixed_offset_seconds_ = 0;
    } else if ((name.size() == 6) && (name[0] == '+' || name[0] == '-') && name[3] == ':') {
        int oh = std::stoi(name.substr(1, 2));
        int om = std::stoi(name.substr(4, 2));
        fixed_offset_seconds_ = oh * 3600 + om * 60;
        if (name[0] == '-') fixed_offset_seconds_ = -fixed_offset_seconds_;
    } else {
        throw ValidationError("unsupported timezone: '" + name +
                              "' (expected America/New_York, UTC, or +HH:MM)");
    }
}

LocalCivilTime ExchangeTimezone::to_local(Timestamp ts) const {
    int offset = fixed_offset_seconds_;
    if (us_eastern_) {
        // Post-2007 rules: DST from the second Sunday of March 02:00 EST
        // (07:00 UTC) to the first Sunday of November 02:00 EDT (06:00 UTC).
        int year;
        unsigned m, d;
        civil_from_days(ts.epoch_seconds / 86400, year, m, d);
        Date dst_start = nth_weekday_of_month(year, 3, 6, 2);
        Date dst_end = nth_weekday_of_month(year, 11, 6, 1);
        std::int64_t start_utc = dst_start.days_since_epoch() * 86400 + 7 * 3600;
        std::int64_t end_utc = dst_end.days_since_epoch() * 86400 + 6 * 3600;
        bool dst = ts.epoch_seconds >= start_utc && ts.epoch_seconds < end_utc;
        offset = dst ? -4 * 3600 : -5 * 3600;
    }
    std::int64_t local = ts.epoch_seconds + offset;
    std::int64_t days = local >= 0 ? local / 86400 : (local - 86399) / 86400;
    LocalCivilTime out;
    out.date = Date::from_days(days);
    out.seconds_of_day = static_cast<int>(local - days * 86400);
    return out;
}

TradingCalendar::TradingCalendar(std::vector<Date> dates, int cutoff_minutes)
    : dates_(std::move(dates)), cutoff_minutes_(cutoff_minutes) {
    if (dates_.empty()) throw ValidationError("trading calendar is empty");
    for (std::size_t i = 1; i < dates_.size(); ++i) {
        if (!(dates_[i - 1] < dates_[i])) {
            throw ValidationError("calendar dates must be strictly increasing (at " +
                                  dates_[i].to_string() + ")");
        }
    }
}

TradingCalendar TradingCalendar::from_csv(const std::string& path, int cutoff_minutes) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open calendar file: " + path);
    std::vector<Date> dates;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        dates.push_back(Date::from_string(line));
    }
    return TradingCalendar(std::move(dates), cutoff_minutes);
}

TradingCalendar TradingCalendar::weekdays(Date first, Date last, int cutoff_minutes) {
    std::vector<Date> dates;
    for (std::int64_t d = first.days_since_epoch(); d <= last.days_since_epoch(); ++d) {
        Date date = Date::from_days(d);
        if (date.is_weekday()) dates.push_back(date);
    }
    return TradingCalendar(std::move(dates), cutoff_minutes);
}

bool TradingCalendar::contains(Date d) const {
    return std::binary_search(dates_.begin(), dates_.end(), d);
}

std::optional<Date> TradingCalendar::next_after(Date d) const {
    auto it = std::upper_bound(dates_.begin(), dates_.end(), d);
    if (it == dates_.end()) return std::nullopt;
    return *it;
}

std::optional<Date> TradingCalendar::on_or_after(Date d) const {
    auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
    if (it == dates_.end()) return std::nullopt;
    return *it;
}

Date assign_effective_date(Timestamp published_at, const TradingCalendar& calendar,
                           const ExchangeTimezone& tz) {
    LocalCivilTime local = tz.to_local(published_at);
    if (local.seconds_of_day < calendar.cutoff_minutes() * 60 && calendar.contains(local.date)) {
        return local.date;
    }
    auto next = calendar.next_after(local.date);
    if (!next) {
        throw OutOfRangeError("timestamp past the last calendar date: local date " +
                              local.date.to_string());
    }
    return *next;
}

}  // namespace volbench
