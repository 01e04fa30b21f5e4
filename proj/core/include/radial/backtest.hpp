#pragma once

#include "radial/types.hpp"

#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace radial {

struct YearMonth {
    int year = 0;
    unsigned month = 1;

    auto operator<=>(const YearMonth&) const = default;

    /// "YYYY-MM"; parse throws ParseError on malformed text.
    std::string str() const;
    static YearMonth parse(std::string_view text);
};

struct PriceRow {
    std::chrono::year_month_day date;
    double close = 0.0;
};

/// Daily closes with strictly increasing dates and positive prices.
class PriceSeries {
public:
    explicit PriceSeries(std::vector<PriceRow> rows);

    const std::vector<PriceRow>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }

private:
    std::vector<PriceRow> rows_;
};

struct IngestResult {
    PriceSeries series;
    std::vector<std::string> warnings;
};

/// Reads "date,close" rows (ISO-8601 dates, optional header). Unsorted input
/// is sorted with a warning; duplicate dates, nonpositive prices and
/// malformed rows throw ParseError naming the line.
IngestResult ingest_csv(const std::filesystem::path& path);
IngestResult ingest_csv(std::istream& in, std::string_view source_name = "<stream>");

void write_price_csv(std::ostream& os, const PriceSeries& series);

struct MonthBlock {
    YearMonth month;
    Covariate closes;

    double month_end_close() const { return closes.values().back(); }
};

/// One block per calendar month present, closes in date order.
std::vector<MonthBlock> segment_months(const PriceSeries& series);

struct LabeledMonth {
    MonthBlock block;
    /// 1 when the next month-end close is strictly greater.
    int label = 0;
    double next_month_end_close = 0.0;
};

/// Labels every block but the last (which has no successor).
std::vector<LabeledMonth> label_months(std::span<const MonthBlock> blocks);

/// k_j = k1 + floor((j - 1)(kmax - k1) / (J - 1)), j = 1..J.
std::vector<std::size_t> msknn_kvec(std::size_t k1, std::size_t kmax, std::size_t J);

enum class Method { knn, msknn_poly, msknn_logi, lrlr_w1, lrlr_winv, buy_hold, random };

Method parse_method(std::string_view name);
std::string_view to_string(Method method) noexcept;

struct WalkForwardConfig {
    std::size_t n_train = 192;
    std::size_t validation_window = 24;
    std::vector<std::size_t> knn_grid = default_knn_grid();
    std::vector<std::size_t> msknn_kmax_grid{20, 30, 50, 80, 120};
    std::size_t msknn_k1 = 5;
    std::size_t msknn_J = 5;
    /// Only used by Method::random.
    std::uint64_t seed = 0;

    void validate() const;
    static std::vector<std::size_t> default_knn_grid();
};

struct BacktestLedger {
    std::vector<YearMonth> months;
    std::vector<int> predictions;
    std::vector<int> labels;
    std::vector<double> returns;
    std::vector<double> cumulative;
    /// Tuned k (k-NN) or k_max (MS-k-NN); empty for untuned methods.
    std::vector<std::optional<std::size_t>> chosen_params;

    std::size_t size() const noexcept { return months.size(); }
};

/// What a prediction read: a pool month (covariate and label) or the query covariate.
enum class Access { training, query };

/// Called with (test position in the ledger, labeled-month index read, kind).
/// Invoked from worker threads, so it must be thread-safe.
using AccessObserver = std::function<void(std::size_t, std::size_t, Access)>;

/// Index of `month` in `labeled`, or nullopt.
std::optional<std::size_t> find_month(std::span<const LabeledMonth> labeled, YearMonth month);

/// Walk-forward test over the labeled months in [test_start, test_end].
/// For test month t (by position), each candidate parameter predicts the
/// validation months t-V..t-1 from the fixed pool t-n_train..t-V-1 and the
/// most accurate candidate (smallest on ties) predicts t from the pool
/// t-n_train..t-1. Distances are IDTW. Throws ConfigurationError when the
/// history before test_start is shorter than n_train or a month is missing.
BacktestLedger walk_forward_predict(std::span<const LabeledMonth> labeled, YearMonth test_start,
                                    YearMonth test_end, Method method, const WalkForwardConfig& config,
                                    const AccessObserver& observer = {});

/// Default window: Jan 2005 to Oct 2021 when covered, otherwise from the first
/// month with n_train months of history to the last labeled month.
std::pair<YearMonth, YearMonth> default_test_window(std::span<const LabeledMonth> labeled,
                                                    const WalkForwardConfig& config);

/// Buy: 1 + (e1 - e0) / e0. Sell: 1 - (e1 - e0) / e0.
double monthly_return(int prediction, double e0, double e1);

std::vector<double> cumulative_return(std::span<const double> returns);

double accuracy_report(const BacktestLedger& ledger);

/// Columns month, prediction, label, chosen_param, return, cumulative.
void write_ledger_csv(std::ostream& os, const BacktestLedger& ledger);

/// Weekday closes following a geometric random walk with the given monthly
/// drift and volatility, starting at `start_price` on the first weekday of
/// `first` and spanning `months` calendar months.
PriceSeries synthetic_price_series(YearMonth first, std::size_t months, std::uint64_t seed,
                                   double start_price = 100.0, double monthly_drift = 0.006,
                                   double monthly_vol = 0.045);

} // namespace radial
