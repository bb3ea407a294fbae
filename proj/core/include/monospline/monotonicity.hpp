#pragma once

#include <vector>

#include <Eigen/Core>

#include "monospline/basis.hpp"

namespace monospline {

/// Matrices behind the knot-derivative (necessary) monotonicity condition.
///
/// A is the (J-1) x J forward-differencing matrix with rows (..,1,-1,..);
/// D is diagonal with D_jj = tau_{j+4} - tau_{j+1}; B1 evaluates the
/// order-3 basis at every knot. The product B1 D^{-1} A maps gamma to
/// -f'(xi_i)/3 at the K+2 knots, so (B1 D^{-1} A) gamma <= 0 iff the first
/// derivative is nonnegative at all knots.
struct ConditionMatrices {
    Eigen::MatrixXd A;          // (J-1) x J
    Eigen::VectorXd D;          // diagonal entries, length J-1
    Eigen::MatrixXd B1;         // (K+2) x (J-1), B1(i,j) = B_{j+2,3}(xi_i)
    Eigen::MatrixXd necessary;  // (K+2) x J = B1 * D^{-1} * A
};

/// Outcome of the exact (sufficient-and-necessary) monotonicity check.
struct MonotoneVerdict {
    bool is_monotone = false;
    std::vector<double> evaluation_set;  // boundary knots plus clamped zero-curvature points
    double min_derivative = 0.0;
};

/// The sufficient condition: non-decreasing coefficient sequence.
bool sufficient_holds(const Eigen::VectorXd& gamma);

/// Differencing matrix A of the sufficient condition, rows (..,1,-1,..).
Eigen::MatrixXd difference_matrix(int J);

ConditionMatrices necessary_matrix(const KnotSet& knots);

/// Exact monotonicity: f' >= 0 at the boundary knots and at the clamped
/// zero-curvature points pi_i of each interval. Intervals with constant f''
/// have no interior stationary point, so their endpoints are checked instead.
MonotoneVerdict exact_monotone(const KnotSet& knots, const Eigen::VectorXd& gamma);

struct ConditionTriple {
    bool sufficient = false;
    bool exact = false;
    bool necessary = false;
};

/// All three verdicts; nesting sufficient => exact => necessary always holds.
ConditionTriple condition_nesting_check(const KnotSet& knots, const Eigen::VectorXd& gamma);

}  // namespace monospline
