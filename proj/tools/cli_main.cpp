// monospline: batch front end for monotone cubic B-spline fitting,
// confidence bands, simulation studies, and generator training.
//
// Exit codes: 0 ok, 2 input error, 3 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "monospline/generator.hpp"
#include "monospline/io.hpp"
#include "monospline/monotonicity.hpp"
#include "monospline/rng.hpp"
#include "monospline/selection.hpp"
#include "monospline/simbench.hpp"
#include "monospline/solver.hpp"
#include "monospline/uncertainty.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace monospline;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t seed_value,
                           bool seed_from_config) {
    if (seed_opt->count() > 0 || seed_from_config) return seed_value;
    if (const char* env = std::getenv("MONOSPLINE_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ArgumentError("MONOSPLINE_SEED is not a valid integer seed");
        }
    }
    return seed_value;
}

/// one --config key bound to a CLI option: the file value applies only when
/// the flag was not given on the command line
struct ConfigBinding {
    CLI::Option* opt;
    std::string key;
    std::function<void(const json&)> apply;
};

template <typename T>
ConfigBinding bind_key(CLI::Option* opt, const char* key, T* target) {
    return {opt, key, [target](const json& v) { *target = v.get<T>(); }};
}

/// returns true when the config supplied the seed
bool apply_config(const std::string& path, const std::vector<ConfigBinding>& bindings) {
    if (path.empty()) return false;
    json cfg = json::parse(read_text_file(path));
    bool seed_set = false;
    for (const ConfigBinding& b : bindings) {
        if (b.opt->count() > 0 || !cfg.contains(b.key)) continue;
        b.apply(cfg.at(b.key));
        if (b.key == "seed") seed_set = true;
    }
    return seed_set;
}

json knots_to_json(const KnotSet& ks) {
    json j;
    j["lower"] = ks.lower_boundary;
    j["upper"] = ks.upper_boundary;
    j["interior"] = ks.interior;
    j["augmented"] = ks.augmented;
    j["dropped_interior"] = ks.dropped_interior;
    return j;
}

KnotSet knots_from_json(const json& j) {
    return make_knot_set(j.at("lower"), j.at("interior").get<std::vector<double>>(),
                         j.at("upper"));
}

json selection_to_json(const SelectionReport& rep) {
    json j;
    j["criterion"] = criterion_name(rep.criterion);
    j["grid"] = rep.grid;
    j["scores"] = rep.scores;
    j["chosen"] = rep.chosen;
    j["df_at_chosen"] = rep.df_at_chosen;
    j["dropped_points"] = rep.dropped_points;
    j["warnings"] = rep.warnings;
    return j;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

void write_out(const fs::path& dir, const std::string& name, const std::string& content) {
    fs::create_directories(dir);
    write_text_file((dir / name).string(), content);
}

std::string xy_csv(const std::vector<double>& x, const Eigen::VectorXd& y, const char* ycol) {
    std::ostringstream out;
    out.precision(17);
    out << "x," << ycol << '\n';
    for (std::size_t i = 0; i < x.size(); ++i)
        out << x[i] << ',' << y[static_cast<Eigen::Index>(i)] << '\n';
    return out.str();
}

/// knot and lambda choices shared by the fit-style commands
struct FitChoice {
    KnotSet knots;
    double lambda = 0.0;
    std::optional<SelectionReport> knot_report;
    std::optional<SelectionReport> lambda_report;
};

FitChoice choose_fit(const XyData& data, const std::string& nknots, const std::string& lambda,
                     std::uint64_t seed) {
    FitChoice choice;
    const int n = static_cast<int>(data.x.size());
    int K;
    if (nknots == "cv") {
        choice.knot_report =
            select_knot_count(data.x, data.y, default_knot_grid(), 2, Rng::mix(seed, 0xCF));
        K = static_cast<int>(choice.knot_report->chosen);
    } else if (nknots == "auto") {
        K = default_smoothing_knots(n);
    } else {
        try {
            K = std::stoi(nknots);
        } catch (const std::exception&) {
            throw ArgumentError("--nknots must be an integer, 'cv' or 'auto'");
        }
        if (K < 0) throw ArgumentError("--nknots must be nonnegative");
    }
    choice.knots = make_knots(data.x, K);

    if (lambda == "gcv") {
        choice.lambda_report = select_lambda_gcv(data.x, data.y, default_lambda_grid(), K);
        choice.lambda = choice.lambda_report->chosen;
    } else {
        try {
            choice.lambda = std::stod(lambda);
        } catch (const std::exception&) {
            throw ArgumentError("--lambda must be a number or 'gcv'");
        }
        if (choice.lambda < 0.0) throw ArgumentError("--lambda must be nonnegative");
    }
    return choice;
}

int parse_direction(const std::string& text) {
    if (text == "increasing" || text == "inc" || text == "+1") return +1;
    if (text == "decreasing" || text == "dec" || text == "-1") return -1;
    throw ArgumentError("--direction must be 'increasing' or 'decreasing'");
}

// ---- fit -----------------------------------------------------------------

struct FitOpts {
    std::string input;
    std::string nknots = "cv";
    std::string lambda = "0";
    std::string direction = "increasing";
    std::string out_dir = ".";
    std::uint64_t seed = 1;
};

int cmd_fit(const FitOpts& opt) {
    XyData data = read_xy_csv(opt.input);
    FitChoice choice = choose_fit(data, opt.nknots, opt.lambda, opt.seed);
    int direction = parse_direction(opt.direction);

    DesignMatrix dm = design_matrix(choice.knots, data.x);
    PenaltyMatrix pm = penalty_matrix(choice.knots);
    SplineFit fit = fit_monotone(dm, pm, data.y, choice.lambda, direction);
    ConditionTriple cond = condition_nesting_check(choice.knots, fit.gamma);

    json meta;
    meta["schema_version"] = 1;
    meta["kind"] = "fit";
    meta["config"] = {{"input", opt.input},   {"nknots", opt.nknots},
                      {"lambda", opt.lambda}, {"direction", opt.direction},
                      {"seed", opt.seed}};
    meta["lambda"] = fit.lambda;
    meta["direction"] = fit.direction;
    meta["gamma"] = to_std(fit.gamma);
    meta["df"] = fit.df;
    meta["sigma_hat"] = fit.residual_sd;
    meta["kkt_residual"] = fit.kkt_residual;
    meta["knots"] = knots_to_json(choice.knots);
    meta["conditions"] = {{"sufficient", cond.sufficient},
                          {"exact", cond.exact},
                          {"necessary", cond.necessary}};
    if (choice.knot_report) meta["knot_selection"] = selection_to_json(*choice.knot_report);
    if (choice.lambda_report) meta["lambda_selection"] = selection_to_json(*choice.lambda_report);

    write_out(opt.out_dir, "fit.json", meta.dump(2) + "\n");
    write_out(opt.out_dir, "fitted.csv", xy_csv(data.x, fit.fitted, "fitted"));
    std::cout << "fit: n=" << data.x.size() << " J=" << choice.knots.num_basis()
              << " lambda=" << fit.lambda << " df=" << fit.df << "\n";
    return kExitOk;
}

// ---- band ----------------------------------------------------------------

struct BandOpts {
    std::string input;
    std::string method;
    std::string nknots = "auto";
    std::string lambda = "0";
    std::string direction = "increasing";
    std::string model;
    std::string truth;
    std::string compare;
    std::string out_dir = ".";
    int B = 500;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    int threads = 1;
};

int cmd_band(const BandOpts& opt) {
    XyData data = read_xy_csv(opt.input);

    ConfidenceBand band;
    json meta;
    meta["schema_version"] = 1;
    meta["kind"] = "band_meta";
    meta["method"] = opt.method;
    meta["B"] = opt.B;
    meta["alpha"] = opt.alpha;
    meta["seed"] = opt.seed;
    meta["config"] = {{"input", opt.input}, {"method", opt.method},
                      {"nknots", opt.nknots}, {"lambda", opt.lambda},
                      {"direction", opt.direction}, {"model", opt.model},
                      {"B", opt.B}, {"alpha", opt.alpha}, {"seed", opt.seed}};

    if (opt.method == "param" || opt.method == "nonparam") {
        FitChoice choice = choose_fit(data, opt.nknots, opt.lambda, opt.seed);
        BandFitConfig config;
        config.knots = choice.knots;
        config.lambda = choice.lambda;
        config.direction = parse_direction(opt.direction);
        config.n_threads = opt.threads;
        band = opt.method == "param"
                   ? band_parametric(data.x, data.y, config, opt.B, opt.alpha, opt.seed)
                   : band_nonparametric(data.x, data.y, config, opt.B, opt.alpha, opt.seed);
        meta["lambda"] = choice.lambda;
        if (choice.lambda_report)
            meta["lambda_selection"] = selection_to_json(*choice.lambda_report);
    } else if (opt.method == "generator") {
        if (opt.model.empty())
            throw ArgumentError("--method generator requires --model pointing to a trained model");
        json model = json::parse(read_text_file(opt.model));
        if (!model.contains("net") || !model.contains("knots"))
            throw ArgumentError("model file lacks net/knots fields");
        GeneratorNet net = generator_from_json(model["net"].dump());
        if (net.mode != GeneratorMode::Band)
            throw ArgumentError(
                "band evaluation needs a band-mode generator (train-gen --mode band)");
        KnotSet knots = knots_from_json(model["knots"]);
        double lambda;
        try {
            lambda = std::stod(opt.lambda);
        } catch (const std::exception&) {
            throw ArgumentError("--method generator needs a numeric --lambda");
        }
        if (lambda < net.lambda_lower || lambda > net.lambda_upper)
            std::cerr << "warning: lambda " << lambda << " outside the trained range ["
                      << net.lambda_lower << ", " << net.lambda_upper << "]\n";
        DesignMatrix dm = design_matrix(knots, data.x);
        GeneratorNet point_net = model.contains("point_net")
                                     ? generator_from_json(model["point_net"].dump())
                                     : net;
        GeneratorPointEval ev = generator_point_eval(point_net, dm, data.y, lambda);
        band = band_from_generator(net, dm, ev.y_hat, ev.sigma_hat, lambda, opt.B, opt.alpha,
                                   opt.seed, opt.threads);
        meta["lambda"] = lambda;
    } else {
        throw ArgumentError("--method must be one of param, nonparam, generator");
    }

    meta["failed_replicates"] = band.failed_replicates;
    if (!opt.truth.empty()) {
        XyData truth = read_xy_csv(opt.truth);
        if (truth.x != band.x) throw ArgumentError("truth grid must match the data grid");
        meta["coverage"] = coverage_probability(band, truth.y);
    }
    if (!opt.compare.empty()) {
        BandData other = read_band_csv(opt.compare);
        ConfidenceBand ref;
        ref.x = other.x;
        ref.lower = other.lower;
        ref.upper = other.upper;
        meta["jaccard"] = jaccard_band(band, ref);
    }

    write_out(opt.out_dir, "band.csv", band_to_csv(band));
    write_out(opt.out_dir, "band_meta.json", meta.dump(2) + "\n");
    std::cout << "band: method=" << opt.method << " B=" << opt.B << " alpha=" << opt.alpha
              << "\n";
    return kExitOk;
}

// ---- simulate --------------------------------------------------------------

struct SimOpts {
    std::string curve;
    std::string methods = "cs,mcs,ss,mss,iso";
    double sigma = 0.5;
    int reps = 100;
    int n = 100;
    bool fast = false;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    int threads = 1;
};

int cmd_simulate(const SimOpts& opt) {
    CurveSpec spec = curve_by_name(opt.curve);
    std::vector<Method> methods;
    std::stringstream ss(opt.methods);
    std::string tok;
    while (std::getline(ss, tok, ',')) methods.push_back(method_by_name(tok));
    int reps = opt.fast ? std::max(2, opt.reps / 5) : opt.reps;

    StudyConfig config;
    config.n_threads = opt.threads;
    BenchReport report = run_study(spec, opt.sigma, methods, reps, opt.n, opt.seed, config);

    json meta;
    meta["schema_version"] = 1;
    meta["kind"] = "simulation_meta";
    meta["config"] = {{"curve", opt.curve},     {"sigma", opt.sigma},
                      {"reps", reps},           {"n", opt.n},
                      {"methods", opt.methods}, {"fast", opt.fast},
                      {"seed", opt.seed}};
    write_out(opt.out_dir, "report.csv", report_to_csv(report));
    write_out(opt.out_dir, "report.txt", report_to_text(report));
    write_out(opt.out_dir, "report_meta.json", meta.dump(2) + "\n");
    std::cout << report_to_text(report);
    return kExitOk;
}

// ---- train-gen -------------------------------------------------------------

struct TrainOpts {
    std::string input;
    std::string mode = "point";
    std::string nknots = "auto";
    std::string point_model;
    std::string model_out = "model.json";
    std::string out_dir = ".";
    double lambda_lo = std::exp(-8.0);
    double lambda_hi = std::exp(-2.0);
    long iters = 50000;
    int batch = 32;
    int inner = 8;
    std::uint64_t seed = 1;
};

int cmd_train_gen(const TrainOpts& opt) {
    XyData data = read_xy_csv(opt.input);
    int K;
    if (opt.nknots == "auto") {
        K = default_smoothing_knots(static_cast<int>(data.x.size()));
    } else {
        try {
            K = std::stoi(opt.nknots);
        } catch (const std::exception&) {
            throw ArgumentError("--nknots must be an integer or 'auto'");
        }
    }
    KnotSet knots = make_knots(data.x, K);
    DesignMatrix dm = design_matrix(knots, data.x);
    PenaltyMatrix pm = penalty_matrix(knots);

    GeneratorConfig config;
    config.max_iterations = opt.iters;
    config.batch = opt.batch;
    config.inner_batch = opt.inner;

    json model;
    model["schema_version"] = 1;
    model["kind"] = "generator_model";
    model["knots"] = knots_to_json(knots);
    model["config"] = {{"input", opt.input},         {"mode", opt.mode},
                       {"nknots", opt.nknots},       {"lambda_lo", opt.lambda_lo},
                       {"lambda_hi", opt.lambda_hi}, {"iters", opt.iters},
                       {"batch", opt.batch},         {"inner", opt.inner},
                       {"seed", opt.seed}};

    GeneratorNet net;
    if (opt.mode == "point") {
        net = train_point_generator(data.x, data.y, knots, pm, opt.lambda_lo, opt.lambda_hi,
                                    config, opt.seed);
        model["net"] = json::parse(generator_to_json(net));
    } else if (opt.mode == "band") {
        if (opt.point_model.empty())
            throw ArgumentError("--mode band requires --point-model from a previous point run");
        json pm_json = json::parse(read_text_file(opt.point_model));
        if (!pm_json.contains("net"))
            throw ArgumentError("point model file lacks a net field");
        GeneratorNet point_net = generator_from_json(pm_json["net"].dump());
        if (point_net.mode != GeneratorMode::Point)
            throw ArgumentError("--point-model must hold a point-mode generator");
        net = train_band_generator(data.x, data.y, knots, pm, opt.lambda_lo, opt.lambda_hi,
                                   config, point_net, opt.seed);
        model["net"] = json::parse(generator_to_json(net));
        model["point_net"] = pm_json["net"];
    } else {
        throw ArgumentError("--mode must be point or band");
    }

    // approximation report against optimizer fits at 10 even-spaced lambdas
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i)
        grid.push_back(opt.lambda_lo + (opt.lambda_hi - opt.lambda_lo) * i / 9.0);
    std::vector<SplineFit> fits;
    for (double l : grid) fits.push_back(fit_monotone(dm, pm, data.y, l));
    GapReport gap = gap_report(net, dm, data.y, grid, fits);

    std::ostringstream gap_csv;
    gap_csv.precision(17);
    gap_csv << "lambda,relative_gap,fitness_ratio\n";
    for (std::size_t k = 0; k < gap.lambdas.size(); ++k)
        gap_csv << gap.lambdas[k] << ',' << gap.relative_gap[k] << ',' << gap.fitness_ratio[k]
                << '\n';
    json gap_json;
    gap_json["schema_version"] = 1;
    gap_json["kind"] = "gap_report";
    gap_json["lambdas"] = gap.lambdas;
    gap_json["relative_gap"] = gap.relative_gap;
    gap_json["fitness_ratio"] = gap.fitness_ratio;
    gap_json["mean_relative_gap"] = gap.mean_relative_gap;
    gap_json["mean_fitness_ratio"] = gap.mean_fitness_ratio;

    fs::path out = fs::path(opt.out_dir) / opt.model_out;
    if (!out.parent_path().empty()) fs::create_directories(out.parent_path());
    write_text_file(out.string(), model.dump(2) + "\n");
    write_out(opt.out_dir, "gap.csv", gap_csv.str());
    write_out(opt.out_dir, "gap.json", gap_json.dump(2) + "\n");
    std::cout << "train-gen: mode=" << opt.mode << " steps=" << net.training_log.size()
              << " mean_gap=" << gap.mean_relative_gap
              << " mean_fitness_ratio=" << gap.mean_fitness_ratio << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"monotone cubic B-spline fitting toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 2;
    app.add_option("--threads", threads, "worker cap for bootstrap/simulation")
        ->capture_default_str();

    FitOpts fit;
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit a monotone spline to CSV data");
    auto* fit_input = fit_cmd->add_option("--input,-i", fit.input, "CSV with header x,y");
    auto* fit_nknots = fit_cmd->add_option("--nknots", fit.nknots,
        "interior knots: count, 'cv' or 'auto'")->capture_default_str();
    auto* fit_lambda = fit_cmd->add_option("--lambda", fit.lambda, "penalty: value or 'gcv'")
        ->capture_default_str();
    auto* fit_dir = fit_cmd->add_option("--direction", fit.direction, "increasing|decreasing")
        ->capture_default_str();
    auto* fit_out = fit_cmd->add_option("--output-dir,-o", fit.out_dir, "output directory")
        ->capture_default_str();
    auto* fit_seed = fit_cmd->add_option("--seed", fit.seed, "RNG seed");
    std::string fit_config;
    fit_cmd->add_option("--config", fit_config, "JSON config file (flags take precedence)");

    BandOpts band;
    CLI::App* band_cmd = app.add_subcommand("band", "bootstrap confidence band");
    auto* band_input = band_cmd->add_option("--input,-i", band.input, "CSV with header x,y");
    auto* band_method = band_cmd->add_option("--method", band.method, "param|nonparam|generator");
    auto* band_nknots = band_cmd->add_option("--nknots", band.nknots,
        "interior knots: count, 'cv' or 'auto'")->capture_default_str();
    auto* band_lambda = band_cmd->add_option("--lambda", band.lambda, "penalty: value or 'gcv'")
        ->capture_default_str();
    auto* band_dir = band_cmd->add_option("--direction", band.direction, "increasing|decreasing")
        ->capture_default_str();
    auto* band_B = band_cmd->add_option("--B", band.B, "bootstrap repetitions")
        ->capture_default_str();
    auto* band_alpha = band_cmd->add_option("--alpha", band.alpha, "1 - level")
        ->capture_default_str();
    auto* band_model = band_cmd->add_option("--model", band.model,
        "generator model JSON (for --method generator)");
    auto* band_truth = band_cmd->add_option("--truth", band.truth,
        "CSV x,y with the true curve (adds coverage)");
    auto* band_compare = band_cmd->add_option("--compare", band.compare,
        "band CSV to compare against (adds jaccard)");
    auto* band_out = band_cmd->add_option("--output-dir,-o", band.out_dir, "output directory")
        ->capture_default_str();
    auto* band_seed = band_cmd->add_option("--seed", band.seed, "RNG seed");
    std::string band_config;
    band_cmd->add_option("--config", band_config, "JSON config file (flags take precedence)");

    SimOpts sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "repeated-experiment comparison study");
    auto* sim_curve = sim_cmd->add_option("--curve", sim.curve,
        "logistic|growth|cubic|step|erf|s5x|exp|x3|sinhalf");
    auto* sim_sigma = sim_cmd->add_option("--sigma", sim.sigma, "noise standard deviation")
        ->capture_default_str();
    auto* sim_reps = sim_cmd->add_option("--reps", sim.reps, "repetitions")->capture_default_str();
    auto* sim_n = sim_cmd->add_option("--n", sim.n, "points per repetition")->capture_default_str();
    auto* sim_methods = sim_cmd->add_option("--methods", sim.methods,
        "comma list of cs,mcs,ss,mss,iso")->capture_default_str();
    auto* sim_fast = sim_cmd->add_flag("--fast", sim.fast,
        "CI profile: one fifth of the repetitions");
    auto* sim_out = sim_cmd->add_option("--output-dir,-o", sim.out_dir, "output directory")
        ->capture_default_str();
    auto* sim_seed = sim_cmd->add_option("--seed", sim.seed, "RNG seed");
    std::string sim_config;
    sim_cmd->add_option("--config", sim_config, "JSON config file (flags take precedence)");

    TrainOpts train;
    CLI::App* train_cmd = app.add_subcommand("train-gen", "train the MLP solution generator");
    auto* train_input = train_cmd->add_option("--input,-i", train.input, "CSV with header x,y");
    auto* train_mode = train_cmd->add_option("--mode", train.mode, "point|band")
        ->capture_default_str();
    auto* train_nknots = train_cmd->add_option("--nknots", train.nknots,
        "interior knots: count or 'auto'")->capture_default_str();
    auto* train_lo = train_cmd->add_option("--lambda-lo", train.lambda_lo,
        "lower end of the lambda range")->capture_default_str();
    auto* train_hi = train_cmd->add_option("--lambda-hi", train.lambda_hi,
        "upper end of the lambda range")->capture_default_str();
    auto* train_iters = train_cmd->add_option("--iters", train.iters, "iteration cap")
        ->capture_default_str();
    auto* train_batch = train_cmd->add_option("--batch", train.batch, "lambda draws per step")
        ->capture_default_str();
    auto* train_inner = train_cmd->add_option("--inner", train.inner,
        "perturbations per lambda (band mode)")->capture_default_str();
    auto* train_pm = train_cmd->add_option("--point-model", train.point_model,
                          "trained point model (required for --mode band)");
    auto* train_mo = train_cmd->add_option("--model-out", train.model_out, "model file name")
        ->capture_default_str();
    auto* train_out = train_cmd->add_option("--output-dir,-o", train.out_dir, "output directory")
        ->capture_default_str();
    auto* train_seed = train_cmd->add_option("--seed", train.seed, "RNG seed");
    std::string train_config;
    train_cmd->add_option("--config", train_config, "JSON config file (flags take precedence)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*fit_cmd) {
            bool cfg_seed = apply_config(fit_config, {
                bind_key(fit_input, "input", &fit.input),
                bind_key(fit_nknots, "nknots", &fit.nknots),
                bind_key(fit_lambda, "lambda", &fit.lambda),
                bind_key(fit_dir, "direction", &fit.direction),
                bind_key(fit_out, "output_dir", &fit.out_dir),
                bind_key(fit_seed, "seed", &fit.seed),
            });
            if (fit.input.empty()) throw ArgumentError("fit needs --input (flag or config)");
            fit.seed = resolve_seed(fit_seed, fit.seed, cfg_seed);
            return cmd_fit(fit);
        }
        if (*band_cmd) {
            bool cfg_seed = apply_config(band_config, {
                bind_key(band_input, "input", &band.input),
                bind_key(band_method, "method", &band.method),
                bind_key(band_nknots, "nknots", &band.nknots),
                bind_key(band_lambda, "lambda", &band.lambda),
                bind_key(band_dir, "direction", &band.direction),
                bind_key(band_B, "B", &band.B),
                bind_key(band_alpha, "alpha", &band.alpha),
                bind_key(band_model, "model", &band.model),
                bind_key(band_truth, "truth", &band.truth),
                bind_key(band_compare, "compare", &band.compare),
                bind_key(band_out, "output_dir", &band.out_dir),
                bind_key(band_seed, "seed", &band.seed),
            });
            if (band.input.empty()) throw ArgumentError("band needs --input (flag or config)");
            if (band.method.empty()) throw ArgumentError("band needs --method (flag or config)");
            band.seed = resolve_seed(band_seed, band.seed, cfg_seed);
            band.threads = threads;
            return cmd_band(band);
        }
        if (*sim_cmd) {
            bool cfg_seed = apply_config(sim_config, {
                bind_key(sim_curve, "curve", &sim.curve),
                bind_key(sim_sigma, "sigma", &sim.sigma),
                bind_key(sim_reps, "reps", &sim.reps),
                bind_key(sim_n, "n", &sim.n),
                bind_key(sim_methods, "methods", &sim.methods),
                bind_key(sim_fast, "fast", &sim.fast),
                bind_key(sim_out, "output_dir", &sim.out_dir),
                bind_key(sim_seed, "seed", &sim.seed),
            });
            if (sim.curve.empty()) throw ArgumentError("simulate needs --curve (flag or config)");
            sim.seed = resolve_seed(sim_seed, sim.seed, cfg_seed);
            sim.threads = threads;
            return cmd_simulate(sim);
        }
        if (*train_cmd) {
            bool cfg_seed = apply_config(train_config, {
                bind_key(train_input, "input", &train.input),
                bind_key(train_mode, "mode", &train.mode),
                bind_key(train_nknots, "nknots", &train.nknots),
                bind_key(train_lo, "lambda_lo", &train.lambda_lo),
                bind_key(train_hi, "lambda_hi", &train.lambda_hi),
                bind_key(train_iters, "iters", &train.iters),
                bind_key(train_batch, "batch", &train.batch),
                bind_key(train_inner, "inner", &train.inner),
                bind_key(train_pm, "point_model", &train.point_model),
                bind_key(train_mo, "model_out", &train.model_out),
                bind_key(train_out, "output_dir", &train.out_dir),
                bind_key(train_seed, "seed", &train.seed),
            });
            if (train.input.empty())
                throw ArgumentError("train-gen needs --input (flag or config)");
            train.seed = resolve_seed(train_seed, train.seed, cfg_seed);
            return cmd_train_gen(train);
        }
    } catch (const CsvError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::domain_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitInput;
}
