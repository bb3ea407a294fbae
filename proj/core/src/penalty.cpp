#include "monospline/penalty.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace monospline {

PenaltyMatrix penalty_matrix(const KnotSet& knots) {
    const int J = knots.num_basis();
    const int K = knots.count_interior();
    PenaltyMatrix p;
    p.omega = Eigen::MatrixXd::Zero(J, J);

    const double inv_sqrt3 = 0.57735026918962576450914878050196;
    for (int i = 0; i <= K; ++i) {
        double a = knots.tau(i + 4);
        double b = knots.tau(i + 5);
        if (!(b > a)) continue;
        double mid = 0.5 * (a + b);
        double half = 0.5 * (b - a);
        for (double node : {mid - half * inv_sqrt3, mid + half * inv_sqrt3}) {
            Eigen::VectorXd d = eval_basis_second_derivatives(knots, node);
            p.omega.selfadjointView<Eigen::Lower>().rankUpdate(d, half);
        }
    }
    p.omega.triangularView<Eigen::StrictlyUpper>() =
        p.omega.triangularView<Eigen::StrictlyLower>().transpose();
    factorize(p);
    return p;
}

Eigen::MatrixXd factorize(PenaltyMatrix& penalty) {
    const Eigen::MatrixXd& omega = penalty.omega;
    const Eigen::Index J = omega.rows();

    // diagonal-pivoted Cholesky with zero-pivot truncation (Omega is PSD with
    // a two-dimensional nullspace, so a plain factorization would break down)
    Eigen::MatrixXd work = omega;
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(J));
    std::iota(perm.begin(), perm.end(), 0);
    Eigen::MatrixXd lp = Eigen::MatrixXd::Zero(J, J);

    double max_diag0 = 0.0;
    for (Eigen::Index j = 0; j < J; ++j) max_diag0 = std::max(max_diag0, work(j, j));
    const double pivot_tol = 1e-12 * std::max(max_diag0, 1e-300);

    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < J; ++k) {
        Eigen::Index q = k;
        for (Eigen::Index j = k + 1; j < J; ++j)
            if (work(j, j) > work(q, q)) q = j;
        if (work(q, q) <= pivot_tol) break;
        if (q != k) {
            work.row(k).swap(work.row(q));
            work.col(k).swap(work.col(q));
            lp.row(k).swap(lp.row(q));
            std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(q)]);
        }
        double piv = std::sqrt(work(k, k));
        lp(k, k) = piv;
        for (Eigen::Index j = k + 1; j < J; ++j) lp(j, k) = work(j, k) / piv;
        // keep `work` fully symmetric so pivot swaps stay consistent
        for (Eigen::Index j = k + 1; j < J; ++j)
            for (Eigen::Index i = k + 1; i < J; ++i)
                work(i, j) -= lp(i, k) * lp(j, k);
        ++rank;
    }

    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(J, rank);
    for (Eigen::Index i = 0; i < J; ++i)
        L.row(perm[static_cast<std::size_t>(i)]) = lp.row(i).head(rank);

    double denom = omega.norm();
    double err = (L * L.transpose() - omega).norm();
    if (denom > 0.0 && err > 1e-9 * denom)
        throw FactorizationError("penalty factorization residual " + std::to_string(err / denom) +
                                 " exceeds tolerance");
    penalty.factor = L;
    penalty.rank = static_cast<int>(rank);
    return penalty.factor;
}

}  // namespace monospline
