#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "volbench/errors.hpp"

namespace volbench {

/// Civil calendar date, stored as days since 1970-01-01.
class Date {
public:
    Date() = default;
    Date(int year, unsigned month, unsigned day);

    static Date from_string(const std::string& iso);  // "YYYY-MM-DD"
    static Date from_days(std::int64_t days) {
        Date d;
        d.days_ = days;
        return d;
    }

    std::int64_t days_since_epoch() const { return days_; }
    int year() const;
    unsigned month() const;
    unsigned day() const;
    /// 0 = Monday .. 6 = Sunday.
    int weekday() const;
    bool is_weekday() const { return weekday() < 5; }

    std::string to_string() const;

    auto operator<=>(const Date&) const = default;

private:
    std::int64_t days_ = 0;
};

/// A UTC instant with second resolution.
struct Timestamp {
    std::int64_t epoch_seconds = 0;

    /// Parses an RFC 3339 timestamp ("2022-01-03T14:59:00-05:00" or trailing
    /// "Z"). Fractional seconds are accepted and truncated.
    static Timestamp parse_rfc3339(const std::string& text);
    /// Renders as "YYYY-MM-DDTHH:MM:SSZ".
    std::string to_rfc3339_utc() const;

    auto operator<=>(const Timestamp&) const = default;
};

struct LocalCivilTime {
    Date date;
    int seconds_of_day = 0;  // 0 .. 86399
};

/// Converts UTC instants to exchange-local civil time. Supports
/// "America/New_York" (US Eastern with post-2007 DST rules), "UTC", and fixed
/// offsets of the form "+HH:MM" / "-HH:MM".
class ExchangeTimezone {
public:
    explicit ExchangeTimezone(const std::string& name = "America/New_York");

    LocalCivilTime to_local(Timestamp ts) const;
    const std::string& name() const { return name_; }

private:
    std::string name_;
    bool us_eastern_ = false;
    int fixed_offset_seconds_ = 0;
};

/// Ordered set of trading dates with a fixed intraday cutoff.
class TradingCalendar {
public:
    TradingCalendar(std::vector<Date> dates, int cutoff_minutes = 15 * 60);

    /// One date per line, ISO-8601.
    static TradingCalendar from_csv(const std::string& path, int cutoff_minutes = 15 * 60);
    /// Fallback when no calendar file is given: every weekday in [first, last].
    static TradingCalendar weekdays(Date first, Date last, int cutoff_minutes = 15 * 60);

    bool contains(Date d) const;
    /// First trading date strictly after `d`; nullopt past the end.
    std::optional<Date> next_after(Date d) const;
    /// First trading date on or after `d`; nullopt past the end.
    std::optional<Date> on_or_after(Date d) const;

    const std::vector<Date>& dates() const { return dates_; }
    int cutoff_minutes() const { return cutoff_minutes_; }
    Date first() const { return dates_.front(); }
    Date last() const { return dates_.back(); }

private:
    std::vector<Date> dates_;
    int cutoff_minutes_;
};

/// Maps a publication instant to its next actionable trading date: strictly
/// before the cutoff on a trading day stays on that day, anything else rolls
/// to the next trading date.
Date assign_effective_date(Timestamp published_at, const TradingCalendar& calendar,
                           const ExchangeTimezone& tz);

}  // namespace volbench
