#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "monospline/selection.hpp"
#include "monospline/solver.hpp"

namespace monospline {

/// Named monotone test curve with its sampling domain.
struct CurveSpec {
    std::string name;     // logistic, growth, cubic, step, erf, s5x, exp, x3, sinhalf
    int step_count = 5;   // breakpoints of the step curve
    double domain_lo = 0.0;
    double domain_hi = 1.0;
};

CurveSpec curve_by_name(const std::string& name);
std::vector<std::string> curve_names();

struct Sample {
    std::vector<double> x;  // sorted
    Eigen::VectorXd y;
    Eigen::VectorXd truth;
};

/// x uniform on the curve's domain (sorted), y = f(x) + N(0, sigma^2).
Sample generate(const CurveSpec& curve, int n, double sigma, std::uint64_t seed);

/// (sum_i |fitted_i - truth_i|^p)^{1/p} for p in {1,2}, max deviation for inf.
/// Callers apply the 1/n and 1/sqrt(n) table scalings.
double lp_distance(const Eigen::VectorXd& fitted, const Eigen::VectorXd& truth, double p);

enum class Method { CS, MCS, SS, MSS, Isotonic };

Method method_by_name(const std::string& name);
std::string method_name(Method m);

struct MethodResult {
    Method method = Method::CS;
    // scaled distances: (1/n) L1, (1/sqrt n) L2, L_inf
    double mean[3] = {0, 0, 0};
    double se[3] = {0, 0, 0};
    int rank[3] = {0, 0, 0};
    bool highlighted[3] = {false, false, false};  // within one SE of the best
    int failures = 0;
};

struct BenchReport {
    std::vector<MethodResult> methods;
    int repetitions = 0;
    int n = 0;
    double sigma = 0.0;
    std::string curve;
};

struct StudyConfig {
    std::vector<int> knot_grid = default_knot_grid();
    std::vector<double> lambda_grid = default_lambda_grid();
    int cv_folds = 2;
    int smoothing_knots = -1;  // -1: default rule from n
    int n_threads = 1;
};

/// The comparison study: per repetition CS/MCS share the CV-selected knot
/// count and SS/MSS share the GCV-selected penalty; isotonic fits via pava.
BenchReport run_study(const CurveSpec& curve, double sigma,
                      const std::vector<Method>& methods, int reps, int n, std::uint64_t seed,
                      const StudyConfig& config = {});

std::string report_to_csv(const BenchReport& report);
std::string report_to_text(const BenchReport& report);

/// Wall-clock comparison of repeated optimizer fits against generator
/// training + evaluation across sample sizes. `problem_count` optimization
/// problems are extrapolated from 10 timed solves, mirroring how such
/// timings are usually collected.
struct RuntimeRow {
    int n = 0;
    double opt_seconds = 0.0;        // problem_count optimizer solves
    double train_seconds = 0.0;      // generator training
    double eval_seconds = 0.0;       // problem_count generator evaluations
    double eval_speedup = 0.0;       // opt_seconds / eval_seconds
};

std::vector<RuntimeRow> bench_runtime(const std::vector<int>& n_grid, int problem_count,
                                      std::uint64_t seed, long train_iterations = 4000);

std::string runtime_to_text(const std::vector<RuntimeRow>& rows);

}  // namespace monospline
