#include "volbench/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace volbench {

std::map<std::pair<std::string, Date>, double> deviation_signal(
    const std::vector<TickerDayScore>& scores, const TradingCalendar& calendar,
    const SignalConfig& config) {
    if (config.lookback < 1) throw ValidationError("lookback must be >= 1");

    std::map<Date, std::vector<const TickerDayScore*>> by_date;
    std::map<Date, std::pair<double, int>> pooled;  // date -> (sum, count) across tickers
    for (const auto& s : scores) {
        by_date[s.date].push_back(&s);
        auto& slot = pooled[s.date];
        slot.first += s.score;
        slot.second += 1;
    }

    const auto& cal = calendar.dates();
    std::map<std::pair<std::string, Date>, double> deviations;
    for (const auto& [date, day_scores] : by_date) {
        auto it = std::lower_bound(cal.begin(), cal.end(), date);
        if (it == cal.end() || *it != date) continue;  // score off-calendar: no signal
        std::size_t idx = static_cast<std::size_t>(it - cal.begin());
        std::size_t lo = idx >= static_cast<std::size_t>(config.lookback)
                             ? idx - static_cast<std::size_t>(config.lookback)
                             : 0;
        double sum = 0.0;
        int n = 0;
        for (std::size_t k = lo; k < idx; ++k) {
            auto p = pooled.find(cal[k]);
            if (p != pooled.end()) {
                sum += p->second.first;
                n += p->second.second;
            }
        }
        if (n == 0) continue;  // warm-up: no history yet
        double baseline = sum / n;
        for (const TickerDayScore* s : day_scores) {
            deviations[{s->ticker, date}] = s->score - baseline;
        }
    }
    return deviations;
}

std::vector<Position> build_positions(const std::map<std::string, double>& deviations,
                                      const SignalConfig& config, Date date) {
    std::size_t longs = 0, shorts = 0;
    for (const auto& [ticker, dev] : deviations) {
        if (dev > 0) ++longs;
        if (dev < 0) ++shorts;
    }
    std::vector<Position> out;
    for (const auto& [ticker, dev] : deviations) {
        if (dev > 0) {
            out.push_back({ticker, date, config.long_gross / longs});
        } else if (dev < 0) {
            out.push_back({ticker, date, -config.short_gross / shorts});
        }
    }
    return out;
}

BacktestResult run_backtest(const std::map<Date, std::vector<Position>>& positions_by_date,
                            const PriceTable& prices, const TradingCalendar& calendar,
                            std::vector<std::string>* missing_price_log) {
    BacktestResult result;
    for (const auto& [date, positions] : positions_by_date) {
        auto next = calendar.next_after(date);
        if (!next) {
            if (missing_price_log) {
                missing_price_log->push_back("no next trading date after " + date.to_string());
            }
            continue;
        }
        double r = 0.0;
        for (const auto& p : positions) {
            auto today = prices.find({p.ticker, date});
            auto tomorrow = prices.find({p.ticker, *next});
            if (today == prices.end() || tomorrow == prices.end()) {
                if (missing_price_log) {
                    missing_price_log->push_back("missing price for " + p.ticker + " around " +
                                                 date.to_string() + "; weight zeroed");
                }
                continue;
            }
            r += p.weight * (tomorrow->second / today->second - 1.0);
        }
        result.daily_returns[date] = r;
    }

    double total = 1.0;
    for (const auto& [date, r] : result.daily_returns) total *= 1.0 + r;
    result.total_return = total - 1.0;

    std::size_t n = result.daily_returns.size();
    if (n > 0) {
        double mean = 0.0;
        for (const auto& [date, r] : result.daily_returns) mean += r;
        mean /= n;
        double var = 0.0;
        for (const auto& [date, r] : result.daily_returns) var += (r - mean) * (r - mean);
        var /= n;  // population std
        double sd = std::sqrt(var);
        // A numerically-constant series (rounding noise only) counts as zero
        // dispersion and gets flagged rather than an exploding ratio.
        if (sd > 1e-12) {
            result.sharpe = mean / sd * std::sqrt(252.0);
        } else {
            result.sharpe = 0.0;
            result.sharpe_flagged = true;
        }
    } else {
        result.sharpe_flagged = true;
    }
    return result;
}

BacktestResult backtest_run(const std::vector<TickerDayScore>& scores, const PriceTable& prices,
                            const TradingCalendar& calendar, const SignalConfig& config,
                            double temperature, int run_index) {
    std::vector<TickerDayScore> mine;
    for (const auto& s : scores) {
        if (s.temperature == temperature && s.run_index == run_index) mine.push_back(s);
    }
    auto deviations = deviation_signal(mine, calendar, config);

    std::map<Date, std::map<std::string, double>> by_date;
    for (const auto& [key, dev] : deviations) by_date[key.second][key.first] = dev;

    std::map<Date, std::vector<Position>> positions;
    for (const auto& [date, devs] : by_date) {
        positions[date] = build_positions(devs, config, date);
    }
    BacktestResult result = run_backtest(positions, prices, calendar);
    result.temperature = temperature;
    result.run_index = run_index;
    return result;
}

std::vector<RepetitionStats> repetition_stats(const std::vector<BacktestResult>& results) {
    std::map<double, std::vector<const BacktestResult*>> by_temp;
    for (const auto& r : results) by_temp[r.temperature].push_back(&r);

    std::vector<RepetitionStats> out;
    for (const auto& [temp, group] : by_temp) {
        RepetitionStats s;
        s.temperature = temp;
        s.n = static_cast<int>(group.size());
        s.single_run = s.n == 1;
        auto moments = [&](auto field) {
            double mean = 0.0;
            for (const auto* r : group) mean += field(*r);
            mean /= s.n;
            double var = 0.0;
            if (s.n > 1) {
                for (const auto* r : group) {
                    double d = field(*r) - mean;
                    var += d * d;
                }
                var /= s.n - 1;  // sample std
            }
            return std::pair(mean, std::sqrt(var));
        };
        std::tie(s.mean_total_return, s.std_total_return) =
            moments([](const BacktestResult& r) { return r.total_return; });
        std::tie(s.mean_sharpe, s.std_sharpe) =
            moments([](const BacktestResult& r) { return r.sharpe; });
        out.push_back(s);
    }
    return out;
}

}  // namespace volbench
