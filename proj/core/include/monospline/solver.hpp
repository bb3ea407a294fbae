#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "monospline/basis.hpp"
#include "monospline/penalty.hpp"

namespace monospline {

/// Result of an (un)constrained spline fit.
struct SplineFit {
    Eigen::VectorXd gamma;
    double lambda = 0.0;
    int direction = +1;  // +1 nondecreasing, -1 nonincreasing
    std::vector<std::vector<int>> tie_pattern;  // ordered blocks of equal coefficients
    int df = 0;                                 // number of blocks
    Eigen::VectorXd fitted;
    double residual_sd = 0.0;
    double kkt_residual = 0.0;
};

/// Block-aggregation matrix of a tie pattern: g x J, one 1 per column.
struct TieMatrix {
    Eigen::MatrixXd G;
};

TieMatrix tie_matrix(const std::vector<std::vector<int>>& blocks, int J);

/// Maximal runs of equal coefficients, equality within 1e-9 * coefficient range.
std::vector<std::vector<int>> detect_ties(const Eigen::VectorXd& gamma);

/// Ridge-type solution of the unpenalized/penalized least-squares objective:
/// gamma solves (B^T B + lambda Omega) gamma = B^T y.
SplineFit fit_unconstrained(const DesignMatrix& design, const PenaltyMatrix& penalty,
                            const Eigen::VectorXd& y, double lambda);

/// Monotone fit: minimizes ||y - B gamma||^2 + lambda gamma^T Omega gamma
/// subject to the coefficients being sorted in `direction`.
///
/// Primal active set on tie patterns: starts from the fully tied feasible
/// point and adds/drops ties using the closed-form block solve, with
/// smallest-index (Bland) selection to rule out cycling.
SplineFit fit_monotone(const DesignMatrix& design, const PenaltyMatrix& penalty,
                       const Eigen::VectorXd& y, double lambda, int direction = +1);

/// Closed-form solve for a fixed tie pattern:
/// gamma = G^T (G B^T B G^T + lambda G Omega G^T)^{-1} G B^T y.
Eigen::VectorXd solve_tie_pattern(const DesignMatrix& design, const PenaltyMatrix& penalty,
                                  const Eigen::VectorXd& y, double lambda,
                                  const std::vector<std::vector<int>>& blocks);

/// Weighted isotonic (non-decreasing) least-squares projection, block means.
Eigen::VectorXd pava(const Eigen::VectorXd& y, const Eigen::VectorXd& weights);

/// Epigraph second-order-cone form of the monotone objective, for export and
/// for cross-checking against external cone solvers.
struct ConeProblem {
    int n = 0;
    int J = 0;
    double lambda = 0.0;
    Eigen::MatrixXd A;  // (J-1) x J monotonicity rows
    Eigen::MatrixXd L;  // penalty factor, J x rank
    Eigen::MatrixXd B;  // n x J design
    Eigen::VectorXd y;
    /// || [y - B gamma; sqrt(lambda) L^T gamma] ||^2, the objective the cone
    /// constraint bounds by z^2.
    double objective(const Eigen::VectorXd& gamma) const;
};

ConeProblem socp_rewrite(const DesignMatrix& design, const PenaltyMatrix& penalty,
                         const Eigen::VectorXd& y, double lambda);

std::string cone_problem_to_json(const ConeProblem& cp);

/// Monte-Carlo comparison of the monotone and unconstrained fits around the
/// MSE crossover of the noise level (lambda = 0).
struct MseCrossoverReport {
    double mse_monotone = 0.0;       // mean ||B gamma_hat - f||^2, monotone fit
    double mse_ls = 0.0;             // same for the unconstrained fit
    double threshold = 0.0;          // f^T (H - H_g) f / (J - g) at the modal tie pattern
    double win_fraction = 0.0;       // share of paired reps with monotone error lower
    double projection_gap_min_eig = 0.0;  // min eigenvalue of H - H_g
    bool monotone_better = false;
    int modal_df = 0;
};

MseCrossoverReport mse_crossover_probe(const Eigen::VectorXd& truth, const DesignMatrix& design,
                                       const PenaltyMatrix& penalty, double sigma, int reps,
                                       std::uint64_t seed);

}  // namespace monospline
