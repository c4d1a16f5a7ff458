#include <doctest.h>

#include <cmath>
#include <random>

#include "backtest_fixture.hpp"
#include "volbench/strategy.hpp"

using namespace volbench;
using namespace volbench::testfix;

namespace {

TickerDayScore score(const std::string& ticker, Date date, double value, double temp = 0.0,
                     int run = 0) {
    return {ticker, date, temp, run, value};
}

}  // namespace

TEST_CASE("deviation: zero history baseline") {
    auto cal = TradingCalendar::weekdays(Date(2022, 1, 3), Date(2022, 1, 14));
    std::vector<TickerDayScore> scores;
    for (int i = 0; i < 3; ++i) {
        scores.push_back(score("A", cal.dates()[i], 0.0));
        scores.push_back(score("B", cal.dates()[i], 0.0));
    }
    scores.push_back(score("A", cal.dates()[3], 1.0));
    SignalConfig config;
    config.lookback = 3;
    auto devs = deviation_signal(scores, cal, config);
    CHECK(devs.at({"A", cal.dates()[3]}) == 1.0);
}

TEST_CASE("deviation: constant corpus self-cancels (positivity-bias correction)") {
    auto cal = TradingCalendar::weekdays(Date(2022, 1, 3), Date(2022, 2, 28));
    std::vector<TickerDayScore> scores;
    for (std::size_t i = 0; i < cal.dates().size(); ++i) {
        scores.push_back(score("A", cal.dates()[i], 0.7));
        scores.push_back(score("B", cal.dates()[i], 0.7));
    }
    auto devs = deviation_signal(scores, cal, SignalConfig{});
    CHECK(!devs.empty());
    for (const auto& [key, dev] : devs) CHECK(dev == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("deviation: warm-up dates are skipped") {
    auto cal = TradingCalendar::weekdays(Date(2022, 1, 3), Date(2022, 1, 14));
    std::vector<TickerDayScore> scores = {score("A", cal.dates()[0], 1.0),
                                          score("A", cal.dates()[1], 0.5)};
    auto devs = deviation_signal(scores, cal, SignalConfig{});
    CHECK(devs.count({"A", cal.dates()[0]}) == 0);  // nothing strictly before
    CHECK(devs.at({"A", cal.dates()[1]}) == doctest::Approx(-0.5));
}

TEST_CASE("deviation matches an independent rolling recomputation on the fixture") {
    auto cal = fixture_calendar();
    auto devs = deviation_signal(fixture_scores(), cal, fixture_signal_config());
    for (int i = 1; i < kFixtureDays; ++i) {
        int lo = std::max(0, i - kFixtureLookback);
        double sum = 0.0;
        int n = 0;
        for (int k = lo; k < i; ++k) {
            sum += fixture_score("X", k) + fixture_score("Y", k);
            n += 2;
        }
        double baseline = sum / n;
        CHECK(devs.at({"X", cal.dates()[i]}) ==
              doctest::Approx(fixture_score("X", i) - baseline).epsilon(1e-12));
        CHECK(devs.at({"Y", cal.dates()[i]}) ==
              doctest::Approx(fixture_score("Y", i) - baseline).epsilon(1e-12));
    }
}

TEST_CASE("positions: one name per side takes the full gross") {
    auto ps = build_positions({{"A", 0.4}, {"B", -0.2}}, SignalConfig{}, Date(2022, 1, 4));
    REQUIRE(ps.size() == 2);
    for (const auto& p : ps) {
        if (p.ticker == "A") CHECK(p.weight == 0.5);
        if (p.ticker == "B") CHECK(p.weight == -0.5);
    }
}

TEST_CASE("positions: long-only day splits long_gross equally") {
    auto ps = build_positions({{"A", 0.4}, {"B", 0.1}}, SignalConfig{}, Date(2022, 1, 4));
    REQUIRE(ps.size() == 2);
    CHECK(ps[0].weight == 0.25);
    CHECK(ps[1].weight == 0.25);
}

TEST_CASE("positions: all-zero deviations produce an empty book") {
    CHECK(build_positions({{"A", 0.0}, {"B", 0.0}}, SignalConfig{}, Date(2022, 1, 4)).empty());
}

TEST_CASE("gross caps hold for random deviation sets") {
    std::mt19937_64 rng(31);
    SignalConfig config;
    for (int trial = 0; trial < 200; ++trial) {
        std::map<std::string, double> devs;
        int n = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) {
            devs[std::string(1, static_cast<char>('A' + i))] =
                (static_cast<double>(rng() % 2001) - 1000) / 1000.0;
        }
        double gross_long = 0.0, gross_short = 0.0;
        for (const auto& p : build_positions(devs, config, Date(2022, 1, 4))) {
            gross_long += std::max(p.weight, 0.0);
            gross_short += std::max(-p.weight, 0.0);
        }
        CHECK(gross_long <= config.long_gross + 1e-9);
        CHECK(gross_short <= config.short_gross + 1e-9);
    }
}

TEST_CASE("one-day hand arithmetic: 0.5x(+2%) + (-0.5)x(-2%) = 2%") {
    auto cal = TradingCalendar::weekdays(Date(2022, 1, 3), Date(2022, 1, 4));
    PriceTable prices = {{{"A", Date(2022, 1, 3)}, 100.0}, {{"A", Date(2022, 1, 4)}, 102.0},
                         {{"B", Date(2022, 1, 3)}, 100.0}, {{"B", Date(2022, 1, 4)}, 98.0}};
    std::map<Date, std::vector<Position>> positions = {
        {Date(2022, 1, 3), {{"A", Date(2022, 1, 3), 0.5}, {"B", Date(2022, 1, 3), -0.5}}}};
    auto result = run_backtest(positions, prices, cal);
    REQUIRE(result.daily_returns.size() == 1);
    CHECK(result.daily_returns.at(Date(2022, 1, 3)) == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("all-zero weights: zero return, flagged sharpe") {
    auto cal = TradingCalendar::weekdays(Date(2022, 1, 3), Date(2022, 1, 14));
    PriceTable prices;
    for (const auto& d : cal.dates()) prices[{"A", d}] = 100.0;
    std::map<Date, std::vector<Position>> positions;
    for (std::size_t i = 0; i + 1 < cal.dates().size(); ++i) positions[cal.dates()[i]] = {};
    auto result = run_backtest(positions, prices, cal);
    CHECK(result.total_return == 0.0);
    CHECK(result.sharpe == 0.0);
    CHECK(result.sharpe_flagged);
}

TEST_CASE("constant daily return compounds in closed form and flags zero std") {
    auto cal = TradingCalendar::weekdays(Date(2022, 1, 3), Date(2023, 1, 20));
    REQUIRE(cal.dates().size() >= 253);
    PriceTable prices;
    std::map<Date, std::vector<Position>> positions;
    for (std::size_t i = 0; i < 253; ++i) {
        // A grows 0.2% per day; half-weight long -> r = 0.001 every day.
        prices[{"A", cal.dates()[i]}] = 100.0 * std::pow(1.002, static_cast<double>(i));
        if (i < 252) positions[cal.dates()[i]] = {{"A", cal.dates()[i], 0.5}};
    }
    auto result = run_backtest(positions, prices, cal);
    REQUIRE(result.daily_returns.size() == 252);
    CHECK(result.total_return ==
          doctest::Approx(std::pow(1.001, 252.0) - 1.0).epsilon(1e-10));
    CHECK(result.total_return == doctest::Approx(0.2866).epsilon(1e-3));
    CHECK(result.sharpe_flagged);
    CHECK(result.sharpe == 0.0);
}

TEST_CASE("missing price zeroes the ticker for the day and logs it") {
    auto cal = TradingCalendar::weekdays(Date(2022, 1, 3), Date(2022, 1, 5));
    PriceTable prices = {{{"A", Date(2022, 1, 3)}, 100.0}, {{"A", Date(2022, 1, 4)}, 101.0}};
    std::map<Date, std::vector<Position>> positions = {
        {Date(2022, 1, 3), {{"A", Date(2022, 1, 3), 0.5}, {"B", Date(2022, 1, 3), -0.5}}}};
    std::vector<std::string> log;
    auto result = run_backtest(positions, prices, cal, &log);
    CHECK(result.daily_returns.at(Date(2022, 1, 3)) == doctest::Approx(0.005).epsilon(1e-12));
    REQUIRE(log.size() == 1);
    CHECK(log[0].find("B") != std::string::npos);
}

TEST_CASE("fixture backtest reproduces the spreadsheet oracle to 1e-10") {
    auto result = backtest_run(fixture_scores(), fixture_prices(), fixture_calendar(),
                               fixture_signal_config(), 0.0, 0);
    const auto& expected = fixture_expected_daily_returns();
    REQUIRE(result.daily_returns.size() == expected.size());
    for (const auto& [date, r] : result.daily_returns) {
        CHECK(r == doctest::Approx(expected.at(date.to_string())).epsilon(1e-10));
    }
    CHECK(result.total_return == doctest::Approx(kFixtureTotalReturn).epsilon(1e-10));
    CHECK(result.sharpe == doctest::Approx(kFixtureSharpe).epsilon(1e-10));
}

TEST_CASE("backtest is deterministic") {
    auto a = backtest_run(fixture_scores(), fixture_prices(), fixture_calendar(),
                          fixture_signal_config(), 0.0, 0);
    auto b = backtest_run(fixture_scores(), fixture_prices(), fixture_calendar(),
                          fixture_signal_config(), 0.0, 0);
    CHECK(a.daily_returns == b.daily_returns);
    CHECK(a.total_return == b.total_return);
    CHECK(a.sharpe == b.sharpe);
}

TEST_CASE("no lookahead: future mutations never change today's positions") {
    auto cal = fixture_calendar();
    auto base_scores = fixture_scores();
    auto base_devs = deviation_signal(base_scores, cal, fixture_signal_config());

    std::mt19937_64 rng(77);
    for (int mutation = 0; mutation < 50; ++mutation) {
        // Pivot date d; mutate one score strictly after d.
        int pivot = 5 + static_cast<int>(rng() % 20);
        Date d = cal.dates()[pivot];
        auto mutated = base_scores;
        int target = pivot + 1 + static_cast<int>(rng() % (kFixtureDays - pivot - 1));
        for (auto& s : mutated) {
            if (s.date == cal.dates()[target] && s.ticker == "X") {
                s.score += (static_cast<double>(rng() % 100) - 50.0) / 25.0;
            }
        }
        auto devs = deviation_signal(mutated, cal, fixture_signal_config());
        std::map<std::string, double> before_base, before_mut;
        for (const auto& [key, dev] : base_devs) {
            if (key.second <= d) before_base[key.first + "@" + key.second.to_string()] = dev;
        }
        for (const auto& [key, dev] : devs) {
            if (key.second <= d) before_mut[key.first + "@" + key.second.to_string()] = dev;
        }
        CHECK(before_base == before_mut);  // bit-identical
    }
}

TEST_CASE("sign monotonicity: raising one score never lowers that ticker's weight") {
    auto cal = fixture_calendar();
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        auto scores = fixture_scores();
        int day = 6 + static_cast<int>(rng() % 20);
        Date d = cal.dates()[day];
        auto weight_of = [&](const std::vector<TickerDayScore>& s) {
            auto devs = deviation_signal(s, cal, fixture_signal_config());
            std::map<std::string, double> day_devs;
            for (const auto& [key, dev] : devs) {
                if (key.second == d) day_devs[key.first] = dev;
            }
            for (const auto& p : build_positions(day_devs, fixture_signal_config(), d)) {
                if (p.ticker == "X") return p.weight;
            }
            return 0.0;
        };
        double before = weight_of(scores);
        for (auto& s : scores) {
            if (s.ticker == "X" && s.date == d) s.score += 0.5;
        }
        CHECK(weight_of(scores) >= before - 1e-12);
    }
}

TEST_CASE("repetition stats reproduce the reported mean +/- std format") {
    std::vector<BacktestResult> results;
    for (double ret : {0.0826, 0.0851, 0.0876}) {
        BacktestResult r;
        r.temperature = 0.0;
        r.total_return = ret;
        r.sharpe = 1.41;
        results.push_back(r);
    }
    auto stats = repetition_stats(results);
    REQUIRE(stats.size() == 1);
    CHECK(stats[0].mean_total_return == doctest::Approx(0.0851).epsilon(1e-12));
    CHECK(stats[0].std_total_return == doctest::Approx(0.0025).epsilon(1e-12));
    CHECK(stats[0].std_sharpe == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("repetition stats: single run flags std 0") {
    BacktestResult r;
    r.temperature = 1.0;
    r.total_return = 0.05;
    auto stats = repetition_stats({r});
    REQUIRE(stats.size() == 1);
    CHECK(stats[0].mean_total_return == 0.05);
    CHECK(stats[0].std_total_return == 0.0);
    CHECK(stats[0].single_run);
}
