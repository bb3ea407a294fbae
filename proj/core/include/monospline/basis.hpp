#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "monospline/errors.hpp"

namespace monospline {

/// Knot layout for a clamped cubic B-spline basis.
///
/// K interior knots xi_1 < ... < xi_K strictly between the boundary knots
/// xi_0 and xi_{K+1}; the augmented sequence tau has the boundary knots
/// repeated with multiplicity 4 on each side, so tau holds K+8 values and
/// the basis has J = K+4 cubic functions.
struct KnotSet {
    std::vector<double> interior;
    double lower_boundary = 0.0;
    double upper_boundary = 1.0;
    std::vector<double> augmented;  // tau_1..tau_{K+8}, clamped
    int dropped_interior = 0;       // interior quantiles removed by dedup

    int count_interior() const { return static_cast<int>(interior.size()); }
    int num_basis() const { return count_interior() + 4; }  // J

    /// tau_i with 1-based indexing, i in [1, K+8].
    double tau(int i) const { return augmented[static_cast<std::size_t>(i - 1)]; }

    bool contains(double x) const { return x >= lower_boundary && x <= upper_boundary; }
};

/// Build a KnotSet from explicit boundaries and interior knots (validated).
KnotSet make_knot_set(double lower, std::vector<double> interior, double upper);

/// Interior knots at the j/(K+1) empirical quantiles of the sample,
/// boundaries at min/max. Colliding quantiles are deduplicated, shrinking
/// the effective K; the number removed is reported in `dropped_interior`.
KnotSet make_knots(std::vector<double> x_sample, int K);

/// Values of all order-`order` B-spline basis functions at x.
///
/// Returns a vector of length K+8-order aligned with the augmented knots
/// (entry i-1 is B_{i,order}(x)); for order 4 that is the J cubic bases.
/// Cox-de Boor recursion with the 0/0 := 0 convention at repeated knots;
/// the upper boundary evaluates right-closed so x = xi_{K+1} lands in the
/// last non-degenerate span.
Eigen::VectorXd eval_basis(const KnotSet& knots, double x, int order);

/// Second derivatives B_j''(x) of the J cubic basis functions.
Eigen::VectorXd eval_basis_second_derivatives(const KnotSet& knots, double x);

/// Dense n x J evaluation of the cubic basis with band bookkeeping.
struct DesignMatrix {
    Eigen::MatrixXd values;          // B_{ij} = B_j(x_i)
    std::vector<double> x;           // evaluation abscissae
    Eigen::VectorXi band_start;      // per row, first of <= 4 contiguous nonzero columns

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

DesignMatrix design_matrix(const KnotSet& knots, const std::vector<double>& x);

/// First derivative of the spline sum_j gamma_j B_j at x:
///   3 * sum_{j=2..J} (gamma_j - gamma_{j-1}) / (tau_{j+3} - tau_j) * B_{j,3}(x).
double first_derivative(const KnotSet& knots, const Eigen::VectorXd& gamma, double x);

/// Curvature coefficients A_3..A_J with f''(x) = 6 * sum_j A_j B_{j,2}(x).
Eigen::VectorXd curvature_coeffs(const KnotSet& knots, const Eigen::VectorXd& gamma);

/// Spline value at x for coefficient vector gamma.
double spline_value(const KnotSet& knots, const Eigen::VectorXd& gamma, double x);

}  // namespace monospline
