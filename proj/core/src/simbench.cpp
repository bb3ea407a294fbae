#include "monospline/simbench.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "monospline/generator.hpp"
#include "monospline/parallel.hpp"
#include "monospline/rng.hpp"

namespace monospline {

namespace {

double logistic(double u) { return std::exp(u) / (1.0 + std::exp(u)); }

double curve_value(const CurveSpec& spec, double x, const std::vector<double>& breakpoints) {
    if (spec.name == "logistic") return logistic(x);
    if (spec.name == "growth") return 1.0 / (1.0 - 0.42 * std::log(x));
    if (spec.name == "cubic" || spec.name == "x3") return x * x * x;
    if (spec.name == "step") {
        double v = 0.0;
        for (double t : breakpoints)
            if (x > t) v += 1.0;
        return v;
    }
    if (spec.name == "erf") {
        double v = 5.0;
        for (int i = 1; i <= 4; ++i)
            v += std::erf(15.0 * i * (x - static_cast<double>(i) / 5.0));
        return v;
    }
    if (spec.name == "s5x") return logistic(5.0 * x);
    if (spec.name == "exp") return std::exp(x);
    if (spec.name == "sinhalf") return std::sin(1.5707963267948966 * x);
    throw ArgumentError("unknown curve: " + spec.name);
}

struct RepOutcome {
    // per-method scaled distances; NaN marks a failed fit
    std::vector<std::array<double, 3>> dist;
};

}  // namespace

CurveSpec curve_by_name(const std::string& name) {
    CurveSpec s;
    s.name = name;
    if (name == "logistic") {
        s.domain_lo = -5.0; s.domain_hi = 5.0;
    } else if (name == "growth") {
        // truth has log(x); keep the left endpoint away from zero
        s.domain_lo = 0.01; s.domain_hi = 10.0;
    } else if (name == "cubic" || name == "step" || name == "s5x" || name == "exp" ||
               name == "x3" || name == "sinhalf") {
        s.domain_lo = -1.0; s.domain_hi = 1.0;
    } else if (name == "erf") {
        s.domain_lo = 0.0; s.domain_hi = 1.0;
    } else {
        throw ArgumentError("unknown curve '" + name + "'; valid: logistic, growth, cubic, step, "
                            "erf, s5x, exp, x3, sinhalf");
    }
    return s;
}

std::vector<std::string> curve_names() {
    return {"logistic", "growth", "cubic", "step", "erf", "s5x", "exp", "x3", "sinhalf"};
}

Sample generate(const CurveSpec& curve, int n, double sigma, std::uint64_t seed) {
    if (n < 2) throw ArgumentError("need n >= 2");
    Rng rng(seed);
    std::vector<double> breakpoints;
    if (curve.name == "step")
        for (int i = 0; i < curve.step_count; ++i)
            breakpoints.push_back(rng.uniform(curve.domain_lo, curve.domain_hi));

    Sample s;
    s.x.resize(static_cast<std::size_t>(n));
    for (double& xi : s.x) xi = rng.uniform(curve.domain_lo, curve.domain_hi);
    std::sort(s.x.begin(), s.x.end());
    s.truth.resize(n);
    s.y.resize(n);
    for (int i = 0; i < n; ++i) {
        s.truth[i] = curve_value(curve, s.x[static_cast<std::size_t>(i)], breakpoints);
        s.y[i] = s.truth[i] + sigma * rng.normal();
    }
    return s;
}

double lp_distance(const Eigen::VectorXd& fitted, const Eigen::VectorXd& truth, double p) {
    if (fitted.size() != truth.size()) throw ArgumentError("length mismatch");
    Eigen::ArrayXd diff = (fitted - truth).array().abs();
    if (std::isinf(p)) return diff.maxCoeff();
    if (p == 1.0) return diff.sum();
    if (p == 2.0) return std::sqrt(diff.square().sum());
    throw ArgumentError("p must be 1, 2 or inf");
}

Method method_by_name(const std::string& name) {
    std::string low;
    for (char c : name) low.push_back(static_cast<char>(std::tolower(c)));
    if (low == "cs") return Method::CS;
    if (low == "mcs") return Method::MCS;
    if (low == "ss") return Method::SS;
    if (low == "mss") return Method::MSS;
    if (low == "iso" || low == "isotonic") return Method::Isotonic;
    throw ArgumentError("unknown method '" + name + "'; valid: cs, mcs, ss, mss, iso");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::CS: return "CS";
        case Method::MCS: return "MCS";
        case Method::SS: return "SS";
        case Method::MSS: return "MSS";
        case Method::Isotonic: return "Isotonic";
    }
    return "?";
}

BenchReport run_study(const CurveSpec& curve, double sigma, const std::vector<Method>& methods,
                      int reps, int n, std::uint64_t seed, const StudyConfig& config) {
    if (methods.empty()) throw ArgumentError("methods must be nonempty");
    if (reps < 2) throw ArgumentError("need reps >= 2 for standard errors");
    const int nm = static_cast<int>(methods.size());
    const double nd = static_cast<double>(n);
    const double scale[3] = {1.0 / nd, 1.0 / std::sqrt(nd), 1.0};
    const double pvals[3] = {1.0, 2.0, std::numeric_limits<double>::infinity()};

    const bool needs_cv = std::count(methods.begin(), methods.end(), Method::CS) +
                              std::count(methods.begin(), methods.end(), Method::MCS) > 0;
    const bool needs_gcv = std::count(methods.begin(), methods.end(), Method::SS) +
                               std::count(methods.begin(), methods.end(), Method::MSS) > 0;

    std::vector<RepOutcome> outcomes(static_cast<std::size_t>(reps));
    Rng root(seed);

    parallel_for(reps, [&](int r) {
        RepOutcome& out = outcomes[static_cast<std::size_t>(r)];
        out.dist.assign(static_cast<std::size_t>(nm),
                        {std::numeric_limits<double>::quiet_NaN(),
                         std::numeric_limits<double>::quiet_NaN(),
                         std::numeric_limits<double>::quiet_NaN()});
        std::uint64_t rep_seed = Rng::mix(seed, static_cast<std::uint64_t>(r));
        Sample sample = generate(curve, n, sigma, rep_seed);

        // shared tuning: CS/MCS use the same CV knot count, SS/MSS the same lambda
        int K = -1;
        if (needs_cv) {
            try {
                SelectionReport rep = select_knot_count(sample.x, sample.y, config.knot_grid,
                                                        config.cv_folds, Rng::mix(rep_seed, 11));
                K = static_cast<int>(rep.chosen);
            } catch (const std::exception&) {
                K = -1;
            }
        }
        double lambda = -1.0;
        int K_ss = config.smoothing_knots >= 0 ? config.smoothing_knots : default_smoothing_knots(n);
        if (needs_gcv) {
            try {
                SelectionReport rep = select_lambda_gcv(sample.x, sample.y, config.lambda_grid, K_ss);
                lambda = rep.chosen;
            } catch (const std::exception&) {
                lambda = -1.0;
            }
        }

        for (int m = 0; m < nm; ++m) {
            try {
                Eigen::VectorXd fitted;
                switch (methods[static_cast<std::size_t>(m)]) {
                    case Method::CS:
                    case Method::MCS: {
                        if (K < 0) throw SolverFailure("knot selection failed", {}, 0.0);
                        KnotSet ks = make_knots(sample.x, K);
                        DesignMatrix dm = design_matrix(ks, sample.x);
                        PenaltyMatrix pm = penalty_matrix(ks);
                        fitted = methods[static_cast<std::size_t>(m)] == Method::CS
                                     ? fit_unconstrained(dm, pm, sample.y, 0.0).fitted
                                     : fit_monotone(dm, pm, sample.y, 0.0).fitted;
                        break;
                    }
                    case Method::SS:
                    case Method::MSS: {
                        if (lambda < 0.0) throw SolverFailure("lambda selection failed", {}, 0.0);
                        KnotSet ks = make_knots(sample.x, K_ss);
                        DesignMatrix dm = design_matrix(ks, sample.x);
                        PenaltyMatrix pm = penalty_matrix(ks);
                        fitted = methods[static_cast<std::size_t>(m)] == Method::SS
                                     ? fit_unconstrained(dm, pm, sample.y, lambda).fitted
                                     : fit_monotone(dm, pm, sample.y, lambda).fitted;
                        break;
                    }
                    case Method::Isotonic:
                        fitted = pava(sample.y, Eigen::VectorXd::Ones(n));
                        break;
                }
                for (int d = 0; d < 3; ++d)
                    out.dist[static_cast<std::size_t>(m)][static_cast<std::size_t>(d)] =
                        scale[d] * lp_distance(fitted, sample.truth, pvals[d]);
            } catch (const std::exception&) {
                // failed fit: stays NaN, excluded from the aggregates
            }
        }
    }, config.n_threads);

    BenchReport report;
    report.repetitions = reps;
    report.n = n;
    report.sigma = sigma;
    report.curve = curve.name;
    for (int m = 0; m < nm; ++m) {
        MethodResult res;
        res.method = methods[static_cast<std::size_t>(m)];
        for (int d = 0; d < 3; ++d) {
            std::vector<double> vals;
            for (int r = 0; r < reps; ++r) {
                double v = outcomes[static_cast<std::size_t>(r)]
                               .dist[static_cast<std::size_t>(m)][static_cast<std::size_t>(d)];
                if (std::isfinite(v)) vals.push_back(v);
            }
            res.failures = reps - static_cast<int>(vals.size());
            if (vals.empty()) {
                res.mean[d] = std::numeric_limits<double>::quiet_NaN();
                res.se[d] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            double mean = std::accumulate(vals.begin(), vals.end(), 0.0) /
                          static_cast<double>(vals.size());
            double ss = 0.0;
            for (double v : vals) ss += (v - mean) * (v - mean);
            double sd = vals.size() > 1 ? std::sqrt(ss / static_cast<double>(vals.size() - 1)) : 0.0;
            res.mean[d] = mean;
            res.se[d] = sd / std::sqrt(static_cast<double>(vals.size()));
        }
        report.methods.push_back(res);
    }

    // ranks and the one-standard-error highlight per distance
    for (int d = 0; d < 3; ++d) {
        std::vector<int> order(static_cast<std::size_t>(nm));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return report.methods[static_cast<std::size_t>(a)].mean[d] <
                   report.methods[static_cast<std::size_t>(b)].mean[d];
        });
        for (int pos = 0; pos < nm; ++pos)
            report.methods[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])].rank[d] =
                pos + 1;
        const MethodResult& best = report.methods[static_cast<std::size_t>(order.front())];
        for (auto& res : report.methods)
            res.highlighted[d] = std::isfinite(res.mean[d]) &&
                                 res.mean[d] <= best.mean[d] + best.se[d];
    }
    return report;
}

std::string report_to_csv(const BenchReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "curve,sigma,n,reps,method,metric,mean,se,rank,highlighted,failures\n";
    const char* metric[3] = {"L1_over_n", "L2_over_sqrt_n", "Linf"};
    for (const auto& res : report.methods)
        for (int d = 0; d < 3; ++d)
            out << report.curve << ',' << report.sigma << ',' << report.n << ','
                << report.repetitions << ',' << method_name(res.method) << ',' << metric[d] << ','
                << res.mean[d] << ',' << res.se[d] << ',' << res.rank[d] << ','
                << (res.highlighted[d] ? 1 : 0) << ',' << res.failures << '\n';
    return out.str();
}

std::string report_to_text(const BenchReport& report) {
    std::ostringstream out;
    out << "curve=" << report.curve << "  sigma=" << report.sigma << "  n=" << report.n
        << "  reps=" << report.repetitions << "\n";
    out << std::left << std::setw(10) << "method" << std::setw(26) << "(1/n)L1"
        << std::setw(26) << "(1/sqrt n)L2" << std::setw(26) << "Linf" << "\n";
    for (const auto& res : report.methods) {
        out << std::left << std::setw(10) << method_name(res.method);
        for (int d = 0; d < 3; ++d) {
            std::ostringstream cell;
            cell << std::scientific << std::setprecision(2) << res.mean[d] << " ("
                 << std::setprecision(1) << res.se[d] << ")^" << res.rank[d]
                 << (res.highlighted[d] ? "*" : "");
            out << std::setw(26) << cell.str();
        }
        out << "\n";
    }
    out << "* within one standard error of the best\n";
    return out.str();
}

std::vector<RuntimeRow> bench_runtime(const std::vector<int>& n_grid, int problem_count,
                                      std::uint64_t seed, long train_iterations) {
    using clock = std::chrono::steady_clock;
    std::vector<RuntimeRow> rows;
    CurveSpec cubic = curve_by_name("cubic");
    const double lo = std::exp(-8.0), hi = std::exp(-2.0);

    for (int n : n_grid) {
        Sample sample = generate(cubic, n, 0.2, Rng::mix(seed, static_cast<std::uint64_t>(n)));
        KnotSet ks = make_knots(sample.x, 6);
        DesignMatrix dm = design_matrix(ks, sample.x);
        PenaltyMatrix pm = penalty_matrix(ks);

        // 10 timed solves extrapolated to problem_count
        std::vector<double> lambdas;
        for (int i = 0; i < 10; ++i)
            lambdas.push_back(lo + (hi - lo) * static_cast<double>(i) / 9.0);
        auto t0 = clock::now();
        for (double lambda : lambdas) fit_monotone(dm, pm, sample.y, lambda);
        auto t1 = clock::now();
        double per_solve = std::chrono::duration<double>(t1 - t0).count() / 10.0;

        GeneratorConfig config;
        config.max_iterations = train_iterations;
        config.plateau_window = std::max<long>(200, train_iterations / 4);
        auto t2 = clock::now();
        GeneratorNet net = train_point_generator(sample.x, sample.y, ks, pm, lo, hi, config,
                                                 Rng::mix(seed, 0x7457));
        auto t3 = clock::now();

        auto t4 = clock::now();
        for (int i = 0; i < 10; ++i) forward(net, sample.y, lambdas[static_cast<std::size_t>(i)]);
        auto t5 = clock::now();
        double per_eval = std::chrono::duration<double>(t5 - t4).count() / 10.0;

        RuntimeRow row;
        row.n = n;
        row.opt_seconds = per_solve * problem_count;
        row.train_seconds = std::chrono::duration<double>(t3 - t2).count();
        row.eval_seconds = per_eval * problem_count;
        row.eval_speedup = row.eval_seconds > 0.0 ? row.opt_seconds / row.eval_seconds : 0.0;
        rows.push_back(row);
    }
    return rows;
}

std::string runtime_to_text(const std::vector<RuntimeRow>& rows) {
    std::ostringstream out;
    out << std::left << std::setw(8) << "n" << std::setw(16) << "opt_total_s" << std::setw(16)
        << "train_s" << std::setw(16) << "eval_total_s" << std::setw(14) << "opt/eval" << "\n";
    for (const auto& r : rows)
        out << std::left << std::setw(8) << r.n << std::setw(16) << r.opt_seconds << std::setw(16)
            << r.train_seconds << std::setw(16) << r.eval_seconds << std::setw(14)
            << r.eval_speedup << "\n";
    return out.str();
}

}  // namespace monospline
