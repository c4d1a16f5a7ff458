#pragma once

#include <map>
#include <string>
#include <vector>

#include "volbench/corpus.hpp"
#include "volbench/metrics.hpp"

namespace volbench {

struct SignalConfig {
    int lookback = 21;        // trading days ("one month")
    double long_gross = 0.5;  // gross weight shared by the long side
    double short_gross = 0.5;
};

struct Position {
    std::string ticker;
    Date date;
    double weight = 0.0;  // signed fraction of portfolio value
};

struct BacktestResult {
    int run_index = 0;
    double temperature = 0.0;
    std::map<Date, double> daily_returns;
    double total_return = 0.0;  // prod(1 + r) - 1
    double sharpe = 0.0;
    bool sharpe_flagged = false;  // zero-variance return series
};

/// Deviation of each ticker-day score from the pooled trailing baseline: the
/// mean of ALL tickers' scores over the `lookback` trading dates strictly
/// before d. Dates with an empty lookback pool are skipped (warm-up). The
/// pooled baseline nets out a model-wide positivity bias.
std::map<std::pair<std::string, Date>, double> deviation_signal(
    const std::vector<TickerDayScore>& scores, const TradingCalendar& calendar,
    const SignalConfig& config);

/// Equal-weight long-short book for one date: positive deviations share
/// long_gross, negative share short_gross, zeros get no position.
std::vector<Position> build_positions(const std::map<std::string, double>& deviations,
                                      const SignalConfig& config, Date date);

/// Close-to-close next-day backtest: r_t = sum_i w_i(d) * (close(i, next(d)) /
/// close(i, d) - 1). A positioned ticker with a missing price is zeroed for
/// that day and logged. Sharpe = mean/std * sqrt(252), population std; a
/// zero-variance series reports sharpe 0 with a flag.
BacktestResult run_backtest(const std::map<Date, std::vector<Position>>& positions_by_date,
                            const PriceTable& prices, const TradingCalendar& calendar,
                            std::vector<std::string>* missing_price_log = nullptr);

/// Convenience: signal -> positions -> backtest for one (temperature, run).
BacktestResult backtest_run(const std::vector<TickerDayScore>& scores,
                            const PriceTable& prices, const TradingCalendar& calendar,
                            const SignalConfig& config, double temperature, int run_index);

struct RepetitionStats {
    double temperature = 0.0;
    int n = 0;
    double mean_total_return = 0.0;
    double std_total_return = 0.0;  // sample std, n-1 denominator
    double mean_sharpe = 0.0;
    double std_sharpe = 0.0;
    bool single_run = false;  // n == 1, stds reported as 0
};

/// Per-temperature mean and sample standard deviation of total return and
/// Sharpe over the k repetitions.
std::vector<RepetitionStats> repetition_stats(const std::vector<BacktestResult>& results);

}  // namespace volbench
