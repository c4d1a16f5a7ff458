#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "volbench/time.hpp"

namespace volbench {

/// One deduplicated news item, tagged with its actionable trading date.
struct Headline {
    std::string id;  // content hash of (normalized text, published_at)
    std::string text;
    std::set<std::string> tickers;
    Timestamp published_at;
    std::string source;
    Date effective_date;

    bool operator==(const Headline&) const = default;
};

struct PriceBar {
    std::string ticker;
    Date date;
    double close = 0.0;
};

using PriceTable = std::map<std::pair<std::string, Date>, double>;

/// Collapses whitespace runs and trims; the dedup key is the normalized text
/// plus the exact timestamp.
std::string normalize_headline_text(const std::string& text);

std::string headline_id(const std::string& normalized_text, Timestamp published_at);

/// Reads the headline JSONL file, keeps records whose tickers intersect the
/// universe, drops records tagged with more than two tickers or with a
/// prominence below the floor (records without the field are kept), removes
/// duplicates by (normalized text, timestamp) keeping the first occurrence,
/// and assigns effective dates. Output is ordered by (published_at, id).
std::vector<Headline> ingest_headlines(const std::string& path,
                                       const std::set<std::string>& universe,
                                       double prominence_floor, const TradingCalendar& calendar,
                                       const ExchangeTimezone& tz);

/// Loads `ticker,date,close` CSV. Duplicate (ticker, date) or a non-positive
/// close is an error; when a calendar is given, every date must be in it.
PriceTable ingest_prices(const std::string& path, const TradingCalendar* calendar = nullptr);

/// Canonical JSONL serialization of an ingested corpus (round-trips through
/// ingest_headlines unchanged).
void write_headlines_jsonl(const std::vector<Headline>& headlines, const std::string& path);
std::vector<Headline> read_headlines_jsonl(const std::string& path);

}  // namespace volbench
