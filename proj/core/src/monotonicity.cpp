#include "monospline/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace monospline {

namespace {

double gamma_scale(const Eigen::VectorXd& gamma) {
    return gamma.maxCoeff() - gamma.minCoeff();
}

}  // namespace

bool sufficient_holds(const Eigen::VectorXd& gamma) {
    if (gamma.size() < 2) throw ArgumentError("need at least two coefficients");
    for (Eigen::Index j = 0; j + 1 < gamma.size(); ++j)
        if (gamma[j] > gamma[j + 1]) return false;
    return true;
}

Eigen::MatrixXd difference_matrix(int J) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(J - 1, J);
    for (int j = 0; j < J - 1; ++j) {
        A(j, j) = 1.0;
        A(j, j + 1) = -1.0;
    }
    return A;
}

ConditionMatrices necessary_matrix(const KnotSet& knots) {
    const int J = knots.num_basis();
    const int K = knots.count_interior();
    ConditionMatrices cm;
    cm.A = difference_matrix(J);
    cm.D.resize(J - 1);
    for (int j = 1; j <= J - 1; ++j) cm.D[j - 1] = knots.tau(j + 4) - knots.tau(j + 1);

    cm.B1.resize(K + 2, J - 1);
    std::vector<double> all_knots;
    all_knots.push_back(knots.lower_boundary);
    all_knots.insert(all_knots.end(), knots.interior.begin(), knots.interior.end());
    all_knots.push_back(knots.upper_boundary);
    for (int i = 0; i < K + 2; ++i) {
        Eigen::VectorXd b3 = eval_basis(knots, all_knots[static_cast<std::size_t>(i)], 3);
        for (int j = 0; j < J - 1; ++j) cm.B1(i, j) = b3[j + 1];  // B_{j+2,3}(xi_i)
    }
    cm.necessary = cm.B1 * cm.D.cwiseInverse().asDiagonal() * cm.A;
    return cm;
}

MonotoneVerdict exact_monotone(const KnotSet& knots, const Eigen::VectorXd& gamma) {
    const int K = knots.count_interior();
    Eigen::VectorXd A = curvature_coeffs(knots, gamma);  // A_3..A_J

    MonotoneVerdict v;
    v.evaluation_set.push_back(knots.lower_boundary);
    v.evaluation_set.push_back(knots.upper_boundary);

    std::vector<double> all_knots;
    all_knots.push_back(knots.lower_boundary);
    all_knots.insert(all_knots.end(), knots.interior.begin(), knots.interior.end());
    all_knots.push_back(knots.upper_boundary);

    for (int i = 0; i <= K; ++i) {
        double a_left = A[i];       // A_{i+3}
        double a_right = A[i + 1];  // A_{i+4}
        double xl = all_knots[static_cast<std::size_t>(i)];
        double xr = all_knots[static_cast<std::size_t>(i) + 1];
        double denom = a_right - a_left;
        if (std::abs(denom) <= 1e-12 * (std::abs(a_left) + std::abs(a_right))) {
            // f'' constant on the interval: no interior zero-crossing of f''
            v.evaluation_set.push_back(xl);
            v.evaluation_set.push_back(xr);
            continue;
        }
        double pi = a_right / denom;
        double pi_bar = pi < 0.0 ? 0.0 : (pi > 1.0 ? 1.0 : pi);
        v.evaluation_set.push_back(pi_bar * xl + (1.0 - pi_bar) * xr);
    }

    double min_d = std::numeric_limits<double>::infinity();
    for (double x : v.evaluation_set)
        min_d = std::min(min_d, first_derivative(knots, gamma, x));
    v.min_derivative = min_d;
    v.is_monotone = min_d >= -1e-10 * gamma_scale(gamma);
    return v;
}

ConditionTriple condition_nesting_check(const KnotSet& knots, const Eigen::VectorXd& gamma) {
    ConditionTriple t;
    t.sufficient = sufficient_holds(gamma);
    t.exact = exact_monotone(knots, gamma).is_monotone;

    // knot-derivative condition with the same tolerance scale as the exact
    // check: the product rows equal -f'(xi_i)/3
    ConditionMatrices cm = necessary_matrix(knots);
    Eigen::VectorXd prod = cm.necessary * gamma;
    double tol = 1e-10 * gamma_scale(gamma) / 3.0;
    t.necessary = (prod.array() <= tol).all();
    return t;
}

}  // namespace monospline
