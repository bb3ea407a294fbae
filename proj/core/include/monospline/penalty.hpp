#pragma once

#include <Eigen/Core>

#include "monospline/basis.hpp"

namespace monospline {

/// Roughness penalty Omega_{jk} = integral of B_j''(t) B_k''(t) dt over the
/// spline domain, with a rank-revealing factor L such that Omega ~= L L^T.
///
/// Omega is banded (|j-k| > 3 vanishes), positive semidefinite, and has the
/// constant and linear splines in its nullspace, so L has J-2 columns.
struct PenaltyMatrix {
    Eigen::MatrixXd omega;   // J x J
    Eigen::MatrixXd factor;  // J x rank, Omega ~= factor * factor^T
    int bandwidth = 3;
    int rank = 0;

    Eigen::Index size() const { return omega.rows(); }
};

/// Assemble Omega by 2-point Gauss-Legendre on each inter-knot interval.
/// Second derivatives of cubic B-splines are piecewise linear, so the
/// integrand is piecewise quadratic and this quadrature is exact.
PenaltyMatrix penalty_matrix(const KnotSet& knots);

/// Diagonal-pivoted Cholesky with zero-pivot truncation; refreshes
/// `factor`/`rank` and returns the factor. Throws FactorizationError if the
/// reconstruction misses `omega` by more than 1e-9 (Frobenius, relative).
Eigen::MatrixXd factorize(PenaltyMatrix& penalty);

}  // namespace monospline
