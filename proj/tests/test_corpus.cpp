#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "volbench/corpus.hpp"

using namespace volbench;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& content, const char* name = "corpus_test.tmp") {
        path = (std::filesystem::temp_directory_path() / name).string();
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

TradingCalendar jan_calendar() {
    return TradingCalendar::weekdays(Date(2022, 1, 3), Date(2022, 1, 31));
}

const ExchangeTimezone kTz("America/New_York");
const std::set<std::string> kUniverse = {"AAPL", "MSFT", "GOOG"};

}  // namespace

TEST_CASE("duplicate (text, timestamp) keeps one headline") {
    TempFile f(
        R"({"text": "Apple beats estimates", "tickers": ["AAPL"], "published_at": "2022-01-04T10:00:00-05:00", "source": "a"})"
        "\n"
        R"({"text": "  Apple   beats estimates ", "tickers": ["AAPL"], "published_at": "2022-01-04T10:00:00-05:00", "source": "b"})"
        "\n");
    auto hs = ingest_headlines(f.path, kUniverse, 0.8, jan_calendar(), kTz);
    REQUIRE(hs.size() == 1);
    CHECK(hs[0].text == "Apple beats estimates");  // whitespace collapsed
    CHECK(hs[0].source == "a");                    // first occurrence wins
    CHECK(hs[0].effective_date == Date(2022, 1, 4));
}

TEST_CASE("record with three tickers is dropped") {
    TempFile f(
        R"({"text": "One", "tickers": ["AAPL", "MSFT", "GOOG"], "published_at": "2022-01-04T10:00:00-05:00"})"
        "\n"
        R"({"text": "Two", "tickers": ["AAPL", "MSFT"], "published_at": "2022-01-04T10:00:00-05:00"})"
        "\n");
    auto hs = ingest_headlines(f.path, kUniverse, 0.8, jan_calendar(), kTz);
    REQUIRE(hs.size() == 1);
    CHECK(hs[0].text == "Two");
    CHECK(hs[0].tickers.size() == 2);
}

TEST_CASE("prominence floor is inclusive and only applies when present") {
    TempFile f(
        R"({"text": "At floor", "tickers": ["AAPL"], "published_at": "2022-01-04T10:00:00-05:00", "prominence": 0.8})"
        "\n"
        R"({"text": "Below floor", "tickers": ["AAPL"], "published_at": "2022-01-04T10:00:00-05:00", "prominence": 0.79})"
        "\n"
        R"({"text": "No field", "tickers": ["AAPL"], "published_at": "2022-01-04T10:00:00-05:00"})"
        "\n");
    auto hs = ingest_headlines(f.path, kUniverse, 0.8, jan_calendar(), kTz);
    REQUIRE(hs.size() == 2);
    std::set<std::string> texts = {hs[0].text, hs[1].text};
    CHECK(texts == std::set<std::string>{"At floor", "No field"});
}

TEST_CASE("tickers outside the universe are stripped") {
    TempFile f(
        R"({"text": "Mixed", "tickers": ["AAPL", "ZZZZ"], "published_at": "2022-01-04T10:00:00-05:00"})"
        "\n"
        R"({"text": "Alien", "tickers": ["ZZZZ"], "published_at": "2022-01-04T10:00:00-05:00"})"
        "\n");
    auto hs = ingest_headlines(f.path, kUniverse, 0.8, jan_calendar(), kTz);
    REQUIRE(hs.size() == 1);
    CHECK(hs[0].tickers == std::set<std::string>{"AAPL"});
}

TEST_CASE("malformed line reports its line number") {
    TempFile f(
        R"({"text": "Fine", "tickers": ["AAPL"], "published_at": "2022-01-04T10:00:00-05:00"})"
        "\n{oops\n");
    try {
        ingest_headlines(f.path, kUniverse, 0.8, jan_calendar(), kTz);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("empty corpus is an explicit error") {
    TempFile f(R"({"text": "Alien", "tickers": ["ZZZZ"], "published_at": "2022-01-04T10:00:00-05:00"})"
               "\n");
    CHECK_THROWS_AS(ingest_headlines(f.path, kUniverse, 0.8, jan_calendar(), kTz),
                    EmptyCorpusError);
}

TEST_CASE("ingest is idempotent over its own serialization") {
    TempFile f(
        R"({"text": "A  spaced   out headline", "tickers": ["AAPL"], "published_at": "2022-01-04T16:30:00-05:00"})"
        "\n"
        R"({"text": "Another one", "tickers": ["MSFT", "AAPL"], "published_at": "2022-01-05T09:00:00-05:00", "prominence": 0.9})"
        "\n");
    auto first = ingest_headlines(f.path, kUniverse, 0.8, jan_calendar(), kTz);
    auto out = (std::filesystem::temp_directory_path() / "corpus_roundtrip.jsonl").string();
    write_headlines_jsonl(first, out);
    auto second = ingest_headlines(out, kUniverse, 0.8, jan_calendar(), kTz);
    CHECK(first == second);
    auto third = read_headlines_jsonl(out);
    CHECK(first == third);
    std::remove(out.c_str());
}

TEST_CASE("price ingestion: happy path, duplicates, and bad closes") {
    TempFile ok("ticker,date,close\nAAPL,2022-01-03,100\nAAPL,2022-01-04,101\nMSFT,2022-01-03,50\n"
                "MSFT,2022-01-04,51\nAAPL,2022-01-05,99\nMSFT,2022-01-05,52\n");
    auto table = ingest_prices(ok.path);
    CHECK(table.size() == 6);
    CHECK(table.at({"AAPL", Date(2022, 1, 4)}) == 101.0);

    TempFile dup("ticker,date,close\nAAPL,2022-01-03,100\nAAPL,2022-01-03,101\n");
    CHECK_THROWS_AS(ingest_prices(dup.path), ValidationError);

    TempFile zero("ticker,date,close\nAAPL,2022-01-03,0\n");
    try {
        ingest_prices(zero.path);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
}

TEST_CASE("price dates must be on the calendar when one is given") {
    TempFile f("ticker,date,close\nAAPL,2022-01-08,100\n");  // a Saturday
    auto cal = jan_calendar();
    CHECK_THROWS_AS(ingest_prices(f.path, &cal), ValidationError);
}
