#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "monospline/solver.hpp"

namespace monospline {

enum class Criterion { AIC, BIC, GCV, CV };

std::string criterion_name(Criterion c);

/// Grid search outcome for a tuning parameter (K or lambda).
struct SelectionReport {
    Criterion criterion = Criterion::CV;
    std::vector<double> grid;
    std::vector<double> scores;   // NaN marks grid points whose fit failed
    double chosen = 0.0;
    double df_at_chosen = 0.0;
    int dropped_points = 0;       // CV test points outside the training domain
    std::vector<std::string> warnings;
};

/// Number of unique coefficients (tie-block count) of the fit.
int degrees_of_freedom(const SplineFit& fit);

/// AIC = n log RSS + 2 df;  BIC = n log RSS + df log n;
/// GCV = RSS / (1 - df/n)^2, undefined when df >= n.
double criterion(const SplineFit& fit, const Eigen::VectorXd& y, Criterion which);

/// Knot count by k-fold cross-validation of the unpenalized cubic spline.
/// Ties break toward the smaller K. Test points outside a training fold's
/// knot domain are dropped from that fold's score (counted in the report).
SelectionReport select_knot_count(const std::vector<double>& x, const Eigen::VectorXd& y,
                                  const std::vector<int>& K_grid, int folds, std::uint64_t seed);

/// Penalty parameter by the classical smoothing-spline GCV (RSS of the
/// unconstrained fit over (1 - tr(smoother)/n)^2); the monotone fit then
/// reuses the chosen lambda. Ties break toward the larger lambda. `K` < 0
/// picks the smoothing-spline default knot count min(30, max(4, n/4)).
SelectionReport select_lambda_gcv(const std::vector<double>& x, const Eigen::VectorXd& y,
                                  const std::vector<double>& lambda_grid, int K = -1);

/// Default grids used by the CLI and the simulation bench.
std::vector<int> default_knot_grid();
std::vector<double> default_lambda_grid(int points = 10);
int default_smoothing_knots(int n);

}  // namespace monospline
