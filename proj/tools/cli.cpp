#include "cli.hpp"

#include "radial/backtest.hpp"
#include "radial/csv.hpp"
#include "radial/estimators.hpp"
#include "radial/synth.hpp"
#include "radial/theory.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace radial::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sends the CSV to `path`, or to `out` when path is empty.
void emit(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& write) {
    if (path.empty()) {
        write(out);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw Error("cannot open " + path + " for writing");
    }
    write(file);
    if (!file.flush()) {
        throw Error("write to " + path + " failed");
    }
}

std::map<std::string, std::string> parse_params(const std::string& text) {
    std::map<std::string, std::string> out;
    if (text.empty()) {
        return out;
    }
    for (const std::string& item : split_fields(text, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw UsageError("--params entries must look like key=value, got '" + item + "'");
        }
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

class Params {
public:
    explicit Params(std::map<std::string, std::string> values) : values_(std::move(values)) {}

    double real(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const auto it = take(key);
        if (!it) {
            if (fallback) {
                return *fallback;
            }
            throw UsageError("missing parameter " + key);
        }
        double v = 0.0;
        if (!parse_double(*it, v)) {
            throw UsageError("parameter " + key + " is not a number");
        }
        return v;
    }

    std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) {
        const double v = real(key, fallback ? std::optional<double>(static_cast<double>(*fallback)) : std::nullopt);
        if (v < 0.0 || v != std::floor(v)) {
            throw UsageError("parameter " + key + " must be a nonnegative integer");
        }
        return static_cast<std::size_t>(v);
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const auto it = take(key);
        return it ? *it : fallback;
    }

    void finish() const {
        if (!values_.empty()) {
            throw UsageError("unknown parameter " + values_.begin()->first);
        }
    }

private:
    std::optional<std::string> take(const std::string& key) {
        const auto it = values_.find(key);
        if (it == values_.end()) {
            return std::nullopt;
        }
        std::string v = it->second;
        values_.erase(it);
        return v;
    }

    std::map<std::string, std::string> values_;
};

std::vector<std::size_t> parse_kvec(const std::string& text) {
    std::vector<std::size_t> k;
    for (const std::string& part : split_fields(text, ':')) {
        double v = 0.0;
        if (!parse_double(part, v) || v < 1.0 || v != std::floor(v)) {
            throw UsageError("kvec must be colon-separated positive integers");
        }
        k.push_back(static_cast<std::size_t>(v));
    }
    return k;
}

EstimatorSpec build_spec(const std::string& method, const std::string& param_text) {
    Params p(parse_params(param_text));
    EstimatorSpec spec = KnnSpec{1};
    if (method == "ks") {
        spec = KernelSmootherSpec{p.real("h")};
    } else if (method == "knn") {
        spec = KnnSpec{p.count("k")};
    } else if (method == "lpor") {
        spec = LporSpec{p.real("h"), static_cast<int>(p.count("q", 2))};
    } else if (method == "lpolr") {
        spec = LpolrSpec{p.real("h"), static_cast<int>(p.count("q", 2)), {}};
    } else if (method == "msknn") {
        const std::string reg = p.text("regression", "poly");
        if (reg != "poly" && reg != "logi") {
            throw UsageError("regression must be poly or logi");
        }
        const Regression r = reg == "poly" ? Regression::poly : Regression::logi;
        const std::string loss = p.text("loss", r == Regression::poly ? "squared" : "logistic");
        Loss l = Loss::squared;
        if (loss == "logistic") {
            l = Loss::logistic;
        } else if (loss == "logit_squared") {
            l = Loss::logit_squared;
        } else if (loss != "squared") {
            throw UsageError("loss must be squared, logistic or logit_squared");
        }
        spec = MsknnSpec{parse_kvec(p.text("kvec", "10:20:30:40:50")), static_cast<int>(p.count("q", 2)), r, l, {}};
    } else if (method == "lrr" || method == "lrlr") {
        LrrOptions o;
        o.loss = method == "lrlr" ? Loss::logistic : Loss::squared;
        o.degree = static_cast<int>(p.count("q", 2));
        const std::string w = p.text("weight", "1");
        if (w == "1") {
            o.weight = WeightFunction::constant_one();
        } else if (w == "1/r") {
            o.weight = WeightFunction::inverse_r();
        } else if (w == "boxcar") {
            o.weight = WeightFunction::boxcar(p.real("radius"));
        } else if (w == "theory") {
            o.weight = WeightFunction::theory(p.real("radius"));
        } else {
            throw UsageError("weight must be 1, 1/r, boxcar or theory");
        }
        const std::string scope = p.text("scope", "all");
        if (scope == "radius") {
            o.scope = Scope::radius(p.real("scope_h"));
        } else if (scope == "top") {
            o.scope = Scope::top_k(p.count("scope_k"));
        } else if (scope != "all") {
            throw UsageError("scope must be all, radius or top");
        }
        const std::string basis = p.text("basis", "poly");
        if (basis == "even") {
            o.basis = RadialBasis::even_poly;
        } else if (basis != "poly") {
            throw UsageError("basis must be poly or even");
        }
        spec = o;
    } else {
        throw UsageError("unknown method '" + method + "'");
    }
    p.finish();
    return spec;
}

/// Rows of numbers whose last field is the 0/1 label; an optional non-numeric header is skipped.
Dataset read_training_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path);
    }
    std::vector<LabeledPoint> points;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        const std::vector<std::string> fields = split_fields(line);
        std::vector<double> values;
        bool numeric = true;
        for (const std::string& f : fields) {
            double v = 0.0;
            numeric = numeric && parse_double(f, v);
            values.push_back(v);
        }
        const bool header = first && !numeric;
        first = false;
        if (header) {
            continue;
        }
        const std::string where = path + ":" + std::to_string(line_no) + ": ";
        if (!numeric) {
            throw ParseError(where + "non-numeric field");
        }
        if (values.size() < 2) {
            throw ParseError(where + "need at least one covariate and a label");
        }
        const double y = values.back();
        if (y != 0.0 && y != 1.0) {
            throw ParseError(where + "label must be 0 or 1");
        }
        values.pop_back();
        try {
            points.emplace_back(Covariate(std::move(values)), static_cast<int>(y));
        } catch (const Error& e) {
            throw ParseError(where + e.what());
        }
    }
    if (points.empty()) {
        throw ParseError(path + ": no training rows");
    }
    return Dataset(std::move(points));
}

std::vector<double> parse_query(const std::string& text) {
    std::vector<double> q;
    for (const std::string& f : split_fields(text, ',')) {
        double v = 0.0;
        if (!parse_double(f, v)) {
            throw UsageError("--query must be comma-separated numbers");
        }
        q.push_back(v);
    }
    return q;
}

void print_warnings(std::ostream& err, const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) {
        err << "warning: " << w << '\n';
    }
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Local radial estimators, experiments and backtests", "radial"};
    app.require_subcommand(1);

    // bench-synthetic
    SyntheticConfig synth;
    std::string synth_out;
    std::string synth_pred;
    auto* bench = app.add_subcommand("bench-synthetic", "Synthetic bimodal classification benchmark");
    bench->add_option("--reps", synth.reps, "Independent trials")->check(CLI::PositiveNumber);
    bench->add_option("--seed", synth.seed, "Master seed");
    bench->add_option("--n-train", synth.n_train, "Training points per trial")->check(CLI::PositiveNumber);
    bench->add_option("--n-test", synth.n_test, "Test points per trial")->check(CLI::PositiveNumber);
    bench->add_option("--out", synth_out, "Summary CSV (default stdout)");
    bench->add_option("--predictions", synth_pred, "Per-query estimates of the first trial");

    // rate
    RateConfig rate;
    rate.sample_sizes = {200, 400, 800, 1600, 3200, 6400, 12800};
    std::string rate_out;
    auto* rate_cmd = app.add_subcommand("rate", "Monte-Carlo convergence rate of the theory-mode estimator");
    rate_cmd->add_option("--beta", rate.beta, "Smoothness")->check(CLI::PositiveNumber);
    rate_cmd->add_option("--d", rate.d, "Dimension")->check(CLI::PositiveNumber);
    rate_cmd->add_option("--sizes", rate.sample_sizes, "Sample sizes (at least three)")->delimiter(',');
    rate_cmd->add_option("--reps", rate.reps, "Repetitions per size (at least 30)")->check(CLI::Range(30, 1 << 30));
    rate_cmd->add_option("--omega", rate.omega, "Even-basis order (0: from beta)")->check(CLI::NonNegativeNumber);
    rate_cmd->add_option("--phi", rate.phi, "Event threshold (0: default)")->check(CLI::Range(0.0, 1.0));
    rate_cmd->add_option("--seed", rate.seed, "Master seed");
    rate_cmd->add_option("--out", rate_out, "CSV path (default stdout)");

    // zeta
    std::size_t zeta_d = 2;
    double zeta_r = 1.0;
    std::vector<std::size_t> zeta_sizes{100, 500, 2000};
    std::size_t zeta_reps = 200;
    std::uint64_t zeta_seed = 0;
    int zeta_power = 1;
    std::string zeta_out;
    auto* zeta_cmd = app.add_subcommand("zeta", "Concentration of zeta/N for uniform radii");
    zeta_cmd->add_option("--d", zeta_d, "Dimension")->check(CLI::PositiveNumber);
    zeta_cmd->add_option("--r-tilde", zeta_r, "Ball radius")->check(CLI::PositiveNumber);
    zeta_cmd->add_option("--sizes", zeta_sizes, "Values of N")->delimiter(',');
    zeta_cmd->add_option("--reps", zeta_reps, "Repetitions per N")->check(CLI::Range(2, 1 << 30));
    zeta_cmd->add_option("--power", zeta_power, "Design column exponent (1: r, 2: r^2)")->check(CLI::Range(1, 8));
    zeta_cmd->add_option("--seed", zeta_seed, "Master seed");
    zeta_cmd->add_option("--out", zeta_out, "CSV path (default stdout)");

    // backtest
    WalkForwardConfig wf;
    std::string bt_input;
    std::string bt_method = "lrlr-w1";
    std::string bt_start;
    std::string bt_end;
    std::string bt_out;
    auto* bt = app.add_subcommand("backtest", "Walk-forward monthly direction backtest");
    bt->add_option("--input", bt_input, "Daily close CSV (date,close)")->required();
    bt->add_option("--method", bt_method, "knn|msknn-poly|msknn-logi|lrlr-w1|lrlr-winv|buy-hold|random")
        ->check(CLI::IsMember({"knn", "msknn-poly", "msknn-logi", "lrlr-w1", "lrlr-winv", "buy-hold", "random"}));
    bt->add_option("--test-start", bt_start, "First test month YYYY-MM");
    bt->add_option("--test-end", bt_end, "Last test month YYYY-MM");
    bt->add_option("--train-months", wf.n_train, "Training months")->check(CLI::PositiveNumber);
    bt->add_option("--validation-months", wf.validation_window, "Validation months")->check(CLI::PositiveNumber);
    bt->add_option("--seed", wf.seed, "Seed for the random method");
    bt->add_option("--out", bt_out, "Ledger CSV (default stdout)");

    // estimate
    std::string est_train;
    std::string est_query;
    std::string est_method;
    std::string est_params;
    std::string est_metric = "euclidean";
    auto* est = app.add_subcommand("estimate", "Single-query estimate");
    est->add_option("--train", est_train, "Training CSV: covariates then label per row")->required();
    est->add_option("--query", est_query, "Comma-separated query covariate")->required();
    est->add_option("--method", est_method, "ks|knn|lpor|lpolr|msknn|lrr|lrlr")->required();
    est->add_option("--params", est_params, "key=value list, e.g. k=3 or h=0.4,q=2");
    est->add_option("--metric", est_metric, "euclidean|dtw|idtw")
        ->check(CLI::IsMember({"euclidean", "dtw", "idtw"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*bench) {
            const std::vector<BenchmarkMethod> methods = benchmark_methods();
            const BenchmarkResult result = run_benchmark(synth, methods);
            print_warnings(err, result.warnings);
            emit(synth_out, out, [&](std::ostream& os) { write_benchmark_csv(os, result); });
            if (!synth_pred.empty()) {
                emit(synth_pred, out,
                     [&](std::ostream& os) { write_trial_predictions(os, synth, methods, 0); });
            }
        } else if (*rate_cmd) {
            if (rate.sample_sizes.size() < 3) {
                throw UsageError("--sizes needs at least three entries");
            }
            const RateReport report = rate_experiment(rate);
            print_warnings(err, report.warnings);
            emit(rate_out, out, [&](std::ostream& os) { write_rate_csv(os, report); });
            std::ostream& summary = rate_out.empty() ? err : out;
            summary << "fitted slope " << format_double(report.fitted_slope) << ", theoretical slope "
                    << format_double(report.theoretical_slope) << '\n';
        } else if (*zeta_cmd) {
            const std::vector<ZetaRow> rows =
                zeta_concentration(zeta_d, zeta_r, zeta_sizes, zeta_reps, zeta_seed, zeta_power);
            emit(zeta_out, out, [&](std::ostream& os) { write_zeta_csv(os, rows); });
        } else if (*bt) {
            const IngestResult in = ingest_csv(bt_input);
            print_warnings(err, in.warnings);
            const std::vector<MonthBlock> blocks = segment_months(in.series);
            const std::vector<LabeledMonth> labeled = label_months(blocks);
            auto [start, end] = default_test_window(labeled, wf);
            if (!bt_start.empty()) {
                start = YearMonth::parse(bt_start);
            }
            if (!bt_end.empty()) {
                end = YearMonth::parse(bt_end);
            }
            const BacktestLedger ledger = walk_forward_predict(labeled, start, end, parse_method(bt_method), wf);
            emit(bt_out, out, [&](std::ostream& os) { write_ledger_csv(os, ledger); });
            std::ostream& summary = bt_out.empty() ? err : out;
            summary << bt_method << ' ' << start.str() << ".." << end.str() << ": accuracy "
                    << format_double(accuracy_report(ledger)) << ", cumulative return "
                    << format_double(ledger.cumulative.back()) << '\n';
        } else if (*est) {
            const EstimatorSpec spec = build_spec(est_method, est_params);
            const Dataset data = read_training_csv(est_train);
            const Covariate query(parse_query(est_query));
            const Estimate e = estimate(spec, data, Metric{parse_metric(est_metric)}, query);
            out << "method " << describe(spec) << '\n';
            out << "estimate " << format_double(e.value) << '\n';
            out << "class " << classify(e) << '\n';
            out << "used_points " << e.used_points << '\n';
            if (e.fallback_applied) {
                out << "fallback_applied degree lowered to fit the available points\n";
            }
            if (!e.converged) {
                out << "converged false\n";
            }
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace radial::cli
