#include "volbench/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_set>

#include "volbench/digest.hpp"

namespace volbench {

using json = nlohmann::json;

std::string normalize_headline_text(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool in_space = true;  // leading whitespace trimmed
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_space) out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(c);
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

std::string headline_id(const std::string& normalized_text, Timestamp published_at) {
    return sha256_hex(normalized_text + "\n" + published_at.to_rfc3339_utc());
}

namespace {

Headline headline_from_json(const json& rec, std::size_t line_no) {
    if (!rec.is_object() || !rec.contains("text") || !rec.contains("tickers") ||
        !rec.contains("published_at")) {
        throw ParseError("headline line " + std::to_string(line_no) +
                         ": missing required field (text, tickers, published_at)");
    }
    Headline h;
    h.text = normalize_headline_text(rec.at("text").get<std::string>());
    for (const auto& t : rec.at("tickers")) h.tickers.insert(t.get<std::string>());
    h.published_at = Timestamp::parse_rfc3339(rec.at("published_at").get<std::string>());
    h.source = rec.value("source", std::string{});
    return h;
}

}  // namespace

std::vector<Headline> ingest_headlines(const std::string& path,
                                       const std::set<std::string>& universe,
                                       double prominence_floor, const TradingCalendar& calendar,
                                       const ExchangeTimezone& tz) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open headlines file: " + path);

    std::vector<Headline> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("headline line " + std::to_string(line_no) + ": " + e.what());
        }
        Headline h = headline_from_json(rec, line_no);
        if (h.text.empty()) continue;
        if (h.tickers.size() > 2) continue;  // only keep feeds tied to at most two tickers
        if (rec.contains("prominence") && rec.at("prominence").get<double>() < prominence_floor) {
            continue;
        }
        std::set<std::string> kept;
        for (const auto& t : h.tickers) {
            if (universe.empty() || universe.count(t)) kept.insert(t);
        }
        if (kept.empty()) continue;
        h.tickers = std::move(kept);
        h.id = headline_id(h.text, h.published_at);
        if (!seen.insert(h.id).second) continue;  // duplicate by (text, timestamp), first wins
        h.effective_date = assign_effective_date(h.published_at, calendar, tz);
        out.push_back(std::move(h));
    }
    if (out.empty()) throw EmptyCorpusError("no headlines survived ingestion from " + path);
    std::sort(out.begin(), out.end(), [](const Headline& a, const Headline& b) {
        return std::tie(a.published_at, a.id) < std::tie(b.published_at, b.id);
    });
    return out;
}

PriceTable ingest_prices(const std::string& path, const TradingCalendar* calendar) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open prices file: " + path);
    PriceTable table;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        while (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (row == 1 && line.rfind("ticker,", 0) == 0) continue;  // header
        std::istringstream ss(line);
        std::string ticker, date_str, close_str;
        if (!std::getline(ss, ticker, ',') || !std::getline(ss, date_str, ',') ||
            !std::getline(ss, close_str)) {
            throw ParseError("prices row " + std::to_string(row) + ": expected ticker,date,close");
        }
        Date date = Date::from_string(date_str);
        double close = std::stod(close_str);
        if (close <= 0) {
            throw ValidationError("prices row " + std::to_string(row) + ": non-positive close " +
                                  close_str);
        }
        if (calendar && !calendar->contains(date)) {
            throw ValidationError("prices row " + std::to_string(row) + ": date " + date_str +
                                  " not in trading calendar");
        }
        if (!table.emplace(std::make_pair(ticker, date), close).second) {
            throw ValidationError("prices row " + std::to_string(row) + ": duplicate (" + ticker +
                                  ", " + date_str + ")");
        }
    }
    return table;
}

void write_headlines_jsonl(const std::vector<Headline>& headlines, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write headlines file: " + path);
    for (const auto& h : headlines) {
        json rec;
        rec["text"] = h.text;
        rec["tickers"] = std::vector<std::string>(h.tickers.begin(), h.tickers.end());
        rec["published_at"] = h.published_at.to_rfc3339_utc();
        rec["source"] = h.source;
        rec["id"] = h.id;
        rec["effective_date"] = h.effective_date.to_string();
        out << rec.dump() << "\n";
    }
}

std::vector<Headline> read_headlines_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open headlines file: " + path);
    std::vector<Headline> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("headline line " + std::to_string(line_no) + ": " + e.what());
        }
        Headline h = headline_from_json(rec, line_no);
        h.id = rec.at("id").get<std::string>();
        h.effective_date = Date::from_string(rec.at("effective_date").get<std::string>());
        out.push_back(std::move(h));
    }
    return out;
}

}  // namespace volbench
