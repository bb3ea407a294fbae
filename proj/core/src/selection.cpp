#include "monospline/selection.hpp"

#include <algorithm>

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "monospline/rng.hpp"

namespace monospline {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string criterion_name(Criterion c) {
    switch (c) {
        case Criterion::AIC: return "AIC";
        case Criterion::BIC: return "BIC";
        case Criterion::GCV: return "GCV";
        case Criterion::CV: return "CV";
    }
    return "?";
}

int degrees_of_freedom(const SplineFit& fit) {
    return static_cast<int>(fit.tie_pattern.size());
}

double criterion(const SplineFit& fit, const Eigen::VectorXd& y, Criterion which) {
    if (y.size() != fit.fitted.size()) throw ArgumentError("y length must match the fit");
    const double n = static_cast<double>(y.size());
    const double df = static_cast<double>(degrees_of_freedom(fit));
    const double rss = (y - fit.fitted).squaredNorm();
    switch (which) {
        case Criterion::AIC: return n * std::log(rss) + 2.0 * df;
        case Criterion::BIC: return n * std::log(rss) + df * std::log(n);
        case Criterion::GCV: {
            if (df >= n) throw CriterionError("GCV undefined: df >= n");
            double denom = 1.0 - df / n;
            return rss / (denom * denom);
        }
        case Criterion::CV: break;
    }
    throw ArgumentError("criterion must be AIC, BIC or GCV");
}

SelectionReport select_knot_count(const std::vector<double>& x, const Eigen::VectorXd& y,
                                  const std::vector<int>& K_grid, int folds, std::uint64_t seed) {
    const int n = static_cast<int>(x.size());
    if (y.size() != n) throw ArgumentError("x and y must have the same length");
    if (K_grid.empty()) throw ArgumentError("K grid must be nonempty");
    if (folds < 2 || n < 2 * folds) throw ArgumentError("need folds >= 2 and n >= 2*folds");

    // fold assignment by seeded permutation
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    for (int i = n - 1; i > 0; --i)
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);

    SelectionReport report;
    report.criterion = Criterion::CV;

    std::vector<int> grid = K_grid;
    std::sort(grid.begin(), grid.end());

    double best_score = std::numeric_limits<double>::infinity();
    int best_K = grid.front();
    for (int K : grid) {
        double sq_sum = 0.0;
        long count = 0;
        bool failed = false;
        for (int f = 0; f < folds && !failed; ++f) {
            std::vector<double> xtr, xte;
            std::vector<double> ytr_v, yte_v;
            for (int i = 0; i < n; ++i) {
                if (perm[static_cast<std::size_t>(i)] % folds == f) {
                    xte.push_back(x[static_cast<std::size_t>(i)]);
                    yte_v.push_back(y[i]);
                } else {
                    xtr.push_back(x[static_cast<std::size_t>(i)]);
                    ytr_v.push_back(y[i]);
                }
            }
            try {
                KnotSet ks = make_knots(xtr, K);
                DesignMatrix dm = design_matrix(ks, xtr);
                PenaltyMatrix pm = penalty_matrix(ks);
                Eigen::VectorXd ytr = Eigen::Map<Eigen::VectorXd>(ytr_v.data(),
                                                                  static_cast<Eigen::Index>(ytr_v.size()));
                SplineFit fit = fit_unconstrained(dm, pm, ytr, 0.0);
                for (std::size_t t = 0; t < xte.size(); ++t) {
                    if (!ks.contains(xte[t])) {
                        ++report.dropped_points;  // no extrapolation
                        continue;
                    }
                    double pred = spline_value(ks, fit.gamma, xte[t]);
                    double d = pred - yte_v[t];
                    sq_sum += d * d;
                    ++count;
                }
            } catch (const std::exception& e) {
                report.warnings.push_back("K=" + std::to_string(K) + " fold " + std::to_string(f) +
                                          ": " + e.what());
                failed = true;
            }
        }
        double score = (failed || count == 0) ? kNaN : sq_sum / static_cast<double>(count);
        report.grid.push_back(static_cast<double>(K));
        report.scores.push_back(score);
        if (std::isfinite(score) && score < best_score) {  // ties keep the smaller K
            best_score = score;
            best_K = K;
        }
    }
    if (!std::isfinite(best_score))
        throw SolverFailure("every K in the grid failed cross-validation", Eigen::VectorXd(), 0.0);

    report.chosen = static_cast<double>(best_K);
    report.df_at_chosen = static_cast<double>(best_K + 4);
    if (report.dropped_points > 0)
        report.warnings.push_back(std::to_string(report.dropped_points) +
                                  " test points outside the training domain were dropped");
    return report;
}

SelectionReport select_lambda_gcv(const std::vector<double>& x, const Eigen::VectorXd& y,
                                  const std::vector<double>& lambda_grid, int K) {
    const int n = static_cast<int>(x.size());
    if (y.size() != n) throw ArgumentError("x and y must have the same length");
    if (lambda_grid.empty()) throw ArgumentError("lambda grid must be nonempty");
    if (K < 0) K = default_smoothing_knots(n);

    KnotSet ks = make_knots(x, K);
    DesignMatrix dm = design_matrix(ks, x);
    PenaltyMatrix pm = penalty_matrix(ks);
    Eigen::MatrixXd BtB = dm.values.transpose() * dm.values;

    std::vector<double> grid = lambda_grid;
    std::sort(grid.begin(), grid.end());

    // classical smoothing-spline GCV: RSS of the unconstrained fit over
    // (1 - tr(smoother)/n)^2; the chosen lambda is then shared with the
    // monotone fit
    SelectionReport report;
    report.criterion = Criterion::GCV;
    double best_score = std::numeric_limits<double>::infinity();
    double best_lambda = grid.back();
    double best_df = 0.0;
    for (double lambda : grid) {
        double score = kNaN;
        double df = 0.0;
        try {
            SplineFit fit = fit_unconstrained(dm, pm, y, lambda);
            Eigen::MatrixXd S = BtB + lambda * pm.omega;
            df = S.ldlt().solve(BtB).trace();
            if (df >= n) throw CriterionError("GCV undefined: df >= n");
            double rss = (y - fit.fitted).squaredNorm();
            double denom = 1.0 - df / static_cast<double>(n);
            score = rss / (denom * denom);
        } catch (const std::exception& e) {
            report.warnings.push_back("lambda=" + std::to_string(lambda) + ": " + e.what());
        }
        report.grid.push_back(lambda);
        report.scores.push_back(score);
        if (std::isfinite(score) && score <= best_score) {  // ties keep the larger lambda
            best_score = score;
            best_lambda = lambda;
            best_df = df;
        }
    }
    if (!std::isfinite(best_score))
        throw SolverFailure("every lambda in the grid failed to fit", Eigen::VectorXd(), 0.0);
    report.chosen = best_lambda;
    report.df_at_chosen = best_df;
    return report;
}

std::vector<int> default_knot_grid() { return {2, 4, 6, 8, 10, 15, 20}; }

std::vector<double> default_lambda_grid(int points) {
    // log-spaced over the studied range [exp(-8), exp(-2)]
    std::vector<double> grid;
    const double lo = -8.0, hi = -2.0;
    for (int i = 0; i < points; ++i)
        grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                         static_cast<double>(points - 1)));
    return grid;
}

int default_smoothing_knots(int n) { return std::min(30, std::max(4, n / 4)); }

}  // namespace monospline
