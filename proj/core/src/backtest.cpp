#include "radial/backtest.hpp"

#include "radial/csv.hpp"
#include "radial/estimators.hpp"
#include "radial/metric.hpp"
#include "radial/parallel.hpp"
#include "radial/profile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

namespace radial {

namespace chr = std::chrono;

namespace {

bool parse_int(std::string_view text, int& out) {
    if (text.empty()) {
        return false;
    }
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

std::optional<chr::year_month_day> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    int y = 0;
    int m = 0;
    int d = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) || !parse_int(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    const chr::year_month_day ymd{chr::year{y}, chr::month{static_cast<unsigned>(m)},
                                  chr::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return ymd;
}

std::string format_date(const chr::year_month_day& ymd) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

YearMonth month_of(const chr::year_month_day& ymd) {
    return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month())};
}

struct Candidate {
    std::optional<std::size_t> param;
    std::vector<std::size_t> k_vec;
};

std::vector<Candidate> candidates(Method method, const WalkForwardConfig& config) {
    std::vector<Candidate> out;
    switch (method) {
    case Method::knn:
        for (std::size_t k : config.knn_grid) {
            out.push_back({k, {}});
        }
        break;
    case Method::msknn_poly:
    case Method::msknn_logi:
        for (std::size_t kmax : config.msknn_kmax_grid) {
            out.push_back({kmax, msknn_kvec(config.msknn_k1, kmax, config.msknn_J)});
        }
        break;
    default:
        out.push_back({std::nullopt, {}});
    }
    return out;
}

int predict(Method method, const Candidate& c, const NeighborProfile& prof) {
    switch (method) {
    case Method::knn:
        return classify(knn(prof, *c.param));
    case Method::msknn_poly:
        return classify(msknn(prof, c.k_vec, 2, Regression::poly, Loss::squared));
    case Method::msknn_logi:
        return classify(msknn(prof, c.k_vec, 2, Regression::logi, Loss::logit_squared));
    case Method::lrlr_w1:
    case Method::lrlr_winv: {
        LrrOptions opts;
        opts.weight = method == Method::lrlr_w1 ? WeightFunction::constant_one() : WeightFunction::inverse_r();
        opts.degree = 2;
        opts.loss = Loss::logistic;
        return classify(lrr(prof, opts));
    }
    case Method::buy_hold:
        return 1;
    case Method::random:
        break;
    }
    throw ParameterError("predict: method needs no profile");
}

/// IDTW profile of `query` against labeled months [lo, hi).
NeighborProfile pool_profile(std::span<const LabeledMonth> labeled, std::size_t lo, std::size_t hi,
                             const Covariate& query, std::size_t pos, const AccessObserver& observer) {
    std::vector<double> distances;
    std::vector<Label> labels;
    distances.reserve(hi - lo);
    labels.reserve(hi - lo);
    for (std::size_t j = lo; j < hi; ++j) {
        if (observer) {
            observer(pos, j, Access::training);
        }
        distances.push_back(idtw(labeled[j].block.closes.values(), query.values()));
        labels.push_back(static_cast<Label>(labeled[j].label));
    }
    return profile_from_distances(std::move(distances), std::move(labels));
}

} // namespace

std::string YearMonth::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", year, month);
    return buf;
}

YearMonth YearMonth::parse(std::string_view text) {
    int y = 0;
    int m = 0;
    if (text.size() != 7 || text[4] != '-' || !parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
        m < 1 || m > 12) {
        throw ParseError("expected YYYY-MM, got '" + std::string(text) + "'");
    }
    return {y, static_cast<unsigned>(m)};
}

PriceSeries::PriceSeries(std::vector<PriceRow> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) {
        throw DomainError("price series is empty");
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (!(rows_[i].close > 0.0) || !std::isfinite(rows_[i].close)) {
            throw DomainError("nonpositive price on " + format_date(rows_[i].date));
        }
        if (i > 0 && !(rows_[i - 1].date < rows_[i].date)) {
            throw DomainError("dates not strictly increasing at " + format_date(rows_[i].date));
        }
    }
}

IngestResult ingest_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    return ingest_csv(in, path.string());
}

IngestResult ingest_csv(std::istream& in, std::string_view source_name) {
    const std::string src(source_name);
    std::vector<PriceRow> rows;
    std::vector<std::size_t> line_of;
    std::size_t date_col = 0;
    std::size_t close_col = 1;
    bool first = true;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        const std::vector<std::string> fields = split_fields(line);
        const bool header = first && !fields.empty() && !parse_date(fields[0]);
        first = false;
        if (header) {
            date_col = close_col = fields.size();
            for (std::size_t i = 0; i < fields.size(); ++i) {
                const std::string name = lower(fields[i]);
                if (name == "date") {
                    date_col = i;
                } else if (name == "close") {
                    close_col = i;
                }
            }
            if (date_col == fields.size() || close_col == fields.size()) {
                throw ParseError(src + ":" + std::to_string(line_no) + ": header needs date and close columns");
            }
            continue;
        }
        const auto where = src + ":" + std::to_string(line_no) + ": ";
        if (fields.size() <= std::max(date_col, close_col)) {
            throw ParseError(where + "expected date,close");
        }
        const auto date = parse_date(fields[date_col]);
        if (!date) {
            throw ParseError(where + "bad date '" + fields[date_col] + "'");
        }
        double close = 0.0;
        if (!parse_double(fields[close_col], close) || !std::isfinite(close)) {
            throw ParseError(where + "bad close '" + fields[close_col] + "'");
        }
        if (close <= 0.0) {
            throw ParseError(where + "nonpositive price");
        }
        rows.push_back({*date, close});
        line_of.push_back(line_no);
    }
    if (rows.empty()) {
        throw ParseError(src + ": no price rows");
    }

    std::vector<std::string> warnings;
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (!std::is_sorted(rows.begin(), rows.end(), [](const PriceRow& a, const PriceRow& b) { return a.date < b.date; })) {
        warnings.push_back(src + ": rows were not in date order and have been sorted");
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return rows[a].date < rows[b].date; });
    }
    std::vector<PriceRow> sorted;
    sorted.reserve(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0 && rows[order[i]].date == rows[order[i - 1]].date) {
            throw ParseError(src + ":" + std::to_string(line_of[order[i]]) + ": duplicate date " +
                             format_date(rows[order[i]].date));
        }
        sorted.push_back(rows[order[i]]);
    }
    return IngestResult{PriceSeries(std::move(sorted)), std::move(warnings)};
}

void write_price_csv(std::ostream& os, const PriceSeries& series) {
    os << "date,close\n";
    for (const PriceRow& r : series.rows()) {
        os << format_date(r.date) << ',' << format_double(r.close) << '\n';
    }
}

std::vector<MonthBlock> segment_months(const PriceSeries& series) {
    std::vector<MonthBlock> blocks;
    std::vector<double> closes;
    YearMonth current = month_of(series.rows().front().date);
    for (const PriceRow& r : series.rows()) {
        const YearMonth m = month_of(r.date);
        if (m != current) {
            blocks.push_back({current, Covariate(std::move(closes))});
            closes.clear();
            current = m;
        }
        closes.push_back(r.close);
    }
    blocks.push_back({current, Covariate(std::move(closes))});
    return blocks;
}

std::vector<LabeledMonth> label_months(std::span<const MonthBlock> blocks) {
    if (blocks.size() < 2) {
        throw DomainError("label_months needs at least two months");
    }
    std::vector<LabeledMonth> out;
    out.reserve(blocks.size() - 1);
    for (std::size_t i = 0; i + 1 < blocks.size(); ++i) {
        const double now = blocks[i].month_end_close();
        const double next = blocks[i + 1].month_end_close();
        out.push_back({blocks[i], next > now ? 1 : 0, next});
    }
    return out;
}

std::vector<std::size_t> msknn_kvec(std::size_t k1, std::size_t kmax, std::size_t J) {
    if (k1 == 0 || k1 >= kmax || J < 2) {
        throw ParameterError("msknn_kvec needs 1 <= k1 < kmax and J >= 2");
    }
    std::vector<std::size_t> k(J);
    for (std::size_t j = 0; j < J; ++j) {
        k[j] = k1 + j * (kmax - k1) / (J - 1);
    }
    if (std::adjacent_find(k.begin(), k.end()) != k.end()) {
        throw ParameterError("msknn_kvec: J too large for the range k1..kmax");
    }
    return k;
}

Method parse_method(std::string_view name) {
    for (Method m : {Method::knn, Method::msknn_poly, Method::msknn_logi, Method::lrlr_w1, Method::lrlr_winv,
                     Method::buy_hold, Method::random}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    throw ParameterError("unknown backtest method '" + std::string(name) + "'");
}

std::string_view to_string(Method method) noexcept {
    switch (method) {
    case Method::knn: return "knn";
    case Method::msknn_poly: return "msknn-poly";
    case Method::msknn_logi: return "msknn-logi";
    case Method::lrlr_w1: return "lrlr-w1";
    case Method::lrlr_winv: return "lrlr-winv";
    case Method::buy_hold: return "buy-hold";
    case Method::random: return "random";
    }
    return "?";
}

std::vector<std::size_t> WalkForwardConfig::default_knn_grid() {
    std::vector<std::size_t> g(30);
    std::iota(g.begin(), g.end(), std::size_t{1});
    return g;
}

void WalkForwardConfig::validate() const {
    if (validation_window == 0 || n_train <= validation_window) {
        throw ConfigurationError("walk-forward: need n_train > validation_window > 0");
    }
    if (knn_grid.empty() || msknn_kmax_grid.empty()) {
        throw ConfigurationError("walk-forward: parameter grids must be nonempty");
    }
}

std::optional<std::size_t> find_month(std::span<const LabeledMonth> labeled, YearMonth month) {
    const auto it = std::lower_bound(labeled.begin(), labeled.end(), month,
                                     [](const LabeledMonth& m, const YearMonth& v) { return m.block.month < v; });
    if (it == labeled.end() || it->block.month != month) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - labeled.begin());
}

std::pair<YearMonth, YearMonth> default_test_window(std::span<const LabeledMonth> labeled,
                                                    const WalkForwardConfig& config) {
    const YearMonth start{2005, 1};
    const YearMonth end{2021, 10};
    const auto s = find_month(labeled, start);
    const auto e = find_month(labeled, end);
    if (s && e && *s >= config.n_train) {
        return {start, end};
    }
    if (labeled.size() <= config.n_train) {
        throw ConfigurationError("walk-forward: fewer than n_train + 1 labeled months");
    }
    return {labeled[config.n_train].block.month, labeled.back().block.month};
}

BacktestLedger walk_forward_predict(std::span<const LabeledMonth> labeled, YearMonth test_start,
                                    YearMonth test_end, Method method, const WalkForwardConfig& config,
                                    const AccessObserver& observer) {
    config.validate();
    const auto first = find_month(labeled, test_start);
    const auto last = find_month(labeled, test_end);
    if (!first || !last) {
        throw ConfigurationError("walk-forward: test window " + test_start.str() + ".." + test_end.str() +
                                 " is not covered by the labeled months");
    }
    if (*last < *first) {
        throw ConfigurationError("walk-forward: test_end precedes test_start");
    }
    if (*first < config.n_train) {
        throw ConfigurationError("walk-forward: " + std::to_string(*first) + " months of history before " +
                                 test_start.str() + ", need " + std::to_string(config.n_train));
    }
    const std::vector<Candidate> grid = candidates(method, config);
    const std::size_t count = *last - *first + 1;
    const std::size_t V = config.validation_window;
    const bool tuned = grid.size() > 1 || grid.front().param.has_value();

    BacktestLedger ledger;
    ledger.months.resize(count);
    ledger.predictions.resize(count);
    ledger.labels.resize(count);
    ledger.returns.resize(count);
    ledger.chosen_params.resize(count);

    parallel_for(count, [&](std::size_t pos) {
        const std::size_t t = *first + pos;
        const std::size_t pool_lo = t - config.n_train;
        const LabeledMonth& month = labeled[t];
        std::size_t chosen = 0;

        if (tuned) {
            std::vector<std::size_t> hits(grid.size(), 0);
            for (std::size_t s = t - V; s < t; ++s) {
                if (observer) {
                    observer(pos, s, Access::training);
                }
                const NeighborProfile prof =
                    pool_profile(labeled, pool_lo, t - V, labeled[s].block.closes, pos, observer);
                for (std::size_t c = 0; c < grid.size(); ++c) {
                    hits[c] += predict(method, grid[c], prof) == labeled[s].label ? 1 : 0;
                }
            }
            // max_element returns the first maximum, i.e. the smallest parameter.
            chosen = static_cast<std::size_t>(std::max_element(hits.begin(), hits.end()) - hits.begin());
        }

        int prediction = 0;
        if (method == Method::random) {
            std::mt19937_64 rng = rng_stream(config.seed, t);
            prediction = std::bernoulli_distribution(0.5)(rng) ? 1 : 0;
        } else if (method == Method::buy_hold) {
            prediction = 1;
        } else {
            if (observer) {
                observer(pos, t, Access::query);
            }
            const NeighborProfile prof = pool_profile(labeled, pool_lo, t, month.block.closes, pos, observer);
            prediction = predict(method, grid[chosen], prof);
        }

        ledger.months[pos] = month.block.month;
        ledger.predictions[pos] = prediction;
        ledger.labels[pos] = month.label;
        ledger.returns[pos] = monthly_return(prediction, month.block.month_end_close(), month.next_month_end_close);
        ledger.chosen_params[pos] = grid[chosen].param;
    });
    ledger.cumulative = cumulative_return(ledger.returns);
    return ledger;
}

double monthly_return(int prediction, double e0, double e1) {
    if (!(e0 > 0.0)) {
        throw DomainError("monthly_return needs a positive starting price");
    }
    const double change = (e1 - e0) / e0;
    return prediction == 1 ? 1.0 + change : 1.0 - change;
}

std::vector<double> cumulative_return(std::span<const double> returns) {
    std::vector<double> out(returns.size());
    double acc = 1.0;
    for (std::size_t i = 0; i < returns.size(); ++i) {
        acc *= returns[i];
        out[i] = acc;
    }
    return out;
}

double accuracy_report(const BacktestLedger& ledger) {
    if (ledger.predictions.empty()) {
        throw DomainError("accuracy_report on an empty ledger");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ledger.predictions.size(); ++i) {
        hits += ledger.predictions[i] == ledger.labels[i] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(ledger.predictions.size());
}

void write_ledger_csv(std::ostream& os, const BacktestLedger& ledger) {
    os << "month,prediction,label,chosen_param,return,cumulative\n";
    for (std::size_t i = 0; i < ledger.size(); ++i) {
        os << ledger.months[i].str() << ',' << ledger.predictions[i] << ',' << ledger.labels[i] << ','
           << (ledger.chosen_params[i] ? std::to_string(*ledger.chosen_params[i]) : std::string("none")) << ','
           << format_double(ledger.returns[i]) << ',' << format_double(ledger.cumulative[i]) << '\n';
    }
}

PriceSeries synthetic_price_series(YearMonth first, std::size_t months, std::uint64_t seed, double start_price,
                                   double monthly_drift, double monthly_vol) {
    if (months == 0 || !(start_price > 0.0) || !(monthly_vol >= 0.0)) {
        throw ParameterError("synthetic_price_series: bad parameters");
    }
    constexpr double days_per_month = 21.0;
    const double mu = (monthly_drift - 0.5 * monthly_vol * monthly_vol) / days_per_month;
    const double sigma = monthly_vol / std::sqrt(days_per_month);
    std::mt19937_64 rng = rng_stream(seed, 0);
    std::normal_distribution<double> z(0.0, 1.0);

    const chr::year_month ym0{chr::year{first.year}, chr::month{first.month}};
    const chr::sys_days begin{ym0 / chr::day{1}};
    const chr::sys_days end{(ym0 + chr::months{static_cast<int>(months)}) / chr::day{1}};
    std::vector<PriceRow> rows;
    double price = start_price;
    bool started = false;
    for (chr::sys_days d = begin; d < end; d += chr::days{1}) {
        const chr::weekday wd{d};
        if (wd == chr::Saturday || wd == chr::Sunday) {
            continue;
        }
        if (started) {
            price *= std::exp(mu + sigma * z(rng));
        }
        started = true;
        rows.push_back({chr::year_month_day{d}, price});
    }
    return PriceSeries(std::move(rows));
}

} // namespace radial
