#include "monospline/basis.hpp"

#include <algorithm>
#include <cmath>

namespace monospline {

namespace {

inline double safe_ratio(double num, double den) {
    return den == 0.0 ? 0.0 : num / den;
}

void build_augmented(KnotSet& ks) {
    const int K = ks.count_interior();
    ks.augmented.assign(static_cast<std::size_t>(K) + 8, 0.0);
    for (int i = 0; i < 4; ++i) ks.augmented[i] = ks.lower_boundary;
    for (int l = 0; l < K; ++l) ks.augmented[4 + l] = ks.interior[static_cast<std::size_t>(l)];
    for (int i = 0; i < 4; ++i) ks.augmented[static_cast<std::size_t>(K) + 4 + i] = ks.upper_boundary;
}

/// type-7 empirical quantile (linear interpolation between order statistics)
double quantile(const std::vector<double>& sorted, double p) {
    const std::size_t m = sorted.size();
    if (m == 1) return sorted[0];
    double h = static_cast<double>(m - 1) * p;
    auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo >= m - 1) return sorted[m - 1];
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

KnotSet make_knot_set(double lower, std::vector<double> interior, double upper) {
    if (!(lower < upper))
        throw DegenerateDomainError("boundary knots must satisfy lower < upper");
    double prev = lower;
    for (double xi : interior) {
        if (!(prev < xi))
            throw ArgumentError("interior knots must be strictly increasing inside the boundaries");
        prev = xi;
    }
    if (!interior.empty() && !(interior.back() < upper))
        throw ArgumentError("interior knots must lie strictly below the upper boundary");
    KnotSet ks;
    ks.lower_boundary = lower;
    ks.upper_boundary = upper;
    ks.interior = std::move(interior);
    build_augmented(ks);
    return ks;
}

KnotSet make_knots(std::vector<double> x_sample, int K) {
    if (K < 0) throw ArgumentError("knot count K must be >= 0");
    if (x_sample.size() < 2)
        throw DegenerateDomainError("need at least 2 sample points to place boundary knots");
    std::sort(x_sample.begin(), x_sample.end());
    const double lo = x_sample.front();
    const double hi = x_sample.back();
    if (!(lo < hi))
        throw DegenerateDomainError("need at least 2 distinct x values, sample is constant");

    std::vector<double> interior;
    interior.reserve(static_cast<std::size_t>(K));
    for (int j = 1; j <= K; ++j) {
        double q = quantile(x_sample, static_cast<double>(j) / static_cast<double>(K + 1));
        if (q > lo && q < hi && (interior.empty() || q > interior.back()))
            interior.push_back(q);
    }
    int dropped = K - static_cast<int>(interior.size());
    KnotSet ks = make_knot_set(lo, std::move(interior), hi);
    ks.dropped_interior = dropped;
    return ks;
}

Eigen::VectorXd eval_basis(const KnotSet& knots, double x, int order) {
    if (order < 1 || order > 4) throw ArgumentError("basis order must be in 1..4");
    if (!knots.contains(x))
        throw OutOfDomainError(x, knots.lower_boundary, knots.upper_boundary);

    const std::vector<double>& t = knots.augmented;
    const int nt = static_cast<int>(t.size());  // K+8

    // order-1 indicators, left-closed / right-open; the upper boundary belongs
    // to the last non-degenerate span so the endpoint evaluates to (0,...,0,1)
    Eigen::VectorXd b = Eigen::VectorXd::Zero(nt - 1);
    int span;
    if (x == knots.upper_boundary) {
        span = nt - 5;  // 0-based index of tau_{K+4}
    } else {
        auto it = std::upper_bound(t.begin(), t.end(), x);
        span = static_cast<int>(it - t.begin()) - 1;
    }
    b[span] = 1.0;

    for (int m = 2; m <= order; ++m) {
        for (int i = 0; i + m < nt; ++i) {
            double left = safe_ratio(x - t[static_cast<std::size_t>(i)],
                                     t[static_cast<std::size_t>(i + m - 1)] - t[static_cast<std::size_t>(i)]) * b[i];
            double right = safe_ratio(t[static_cast<std::size_t>(i + m)] - x,
                                      t[static_cast<std::size_t>(i + m)] - t[static_cast<std::size_t>(i + 1)]) * b[i + 1];
            b[i] = left + right;
        }
    }
    return b.head(nt - order);
}

Eigen::VectorXd eval_basis_second_derivatives(const KnotSet& knots, double x) {
    const std::vector<double>& t = knots.augmented;
    const int J = knots.num_basis();
    Eigen::VectorXd b2 = eval_basis(knots, x, 2);  // length K+6, entry i-1 = B_{i,2}(x)
    auto tau = [&](int i) { return t[static_cast<std::size_t>(i - 1)]; };

    Eigen::VectorXd d = Eigen::VectorXd::Zero(J);
    for (int j = 1; j <= J; ++j) {
        double h3j = tau(j + 3) - tau(j);
        double h3j1 = tau(j + 4) - tau(j + 1);
        double h2j = tau(j + 2) - tau(j);
        double h2j1 = tau(j + 3) - tau(j + 1);
        double h2j2 = tau(j + 4) - tau(j + 2);
        double v = safe_ratio(safe_ratio(b2[j - 1], h2j), h3j) -
                   b2[j] * (safe_ratio(safe_ratio(1.0, h2j1), h3j) +
                            safe_ratio(safe_ratio(1.0, h2j1), h3j1)) +
                   safe_ratio(safe_ratio(b2[j + 1], h2j2), h3j1);
        d[j - 1] = 6.0 * v;
    }
    return d;
}

DesignMatrix design_matrix(const KnotSet& knots, const std::vector<double>& x) {
    const int J = knots.num_basis();
    DesignMatrix dm;
    dm.values.resize(static_cast<Eigen::Index>(x.size()), J);
    dm.band_start.resize(static_cast<Eigen::Index>(x.size()));
    dm.x = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        Eigen::VectorXd row = eval_basis(knots, x[i], 4);
        dm.values.row(static_cast<Eigen::Index>(i)) = row.transpose();
        int first = 0;
        for (int j = 0; j < J; ++j) {
            if (row[j] != 0.0) {
                first = j;
                break;
            }
        }
        dm.band_start[static_cast<Eigen::Index>(i)] = first;
    }
    return dm;
}

double first_derivative(const KnotSet& knots, const Eigen::VectorXd& gamma, double x) {
    const int J = knots.num_basis();
    if (gamma.size() != J) throw ArgumentError("gamma length must equal the basis size J");
    Eigen::VectorXd b3 = eval_basis(knots, x, 3);  // entry i-1 = B_{i,3}(x)
    auto tau = [&](int i) { return knots.tau(i); };
    double acc = 0.0;
    for (int j = 2; j <= J; ++j) {
        double h = tau(j + 3) - tau(j);
        if (h == 0.0) continue;
        acc += (gamma[j - 1] - gamma[j - 2]) / h * b3[j - 1];
    }
    return 3.0 * acc;
}

Eigen::VectorXd curvature_coeffs(const KnotSet& knots, const Eigen::VectorXd& gamma) {
    const int J = knots.num_basis();
    if (gamma.size() != J) throw ArgumentError("gamma length must equal the basis size J");
    auto tau = [&](int i) { return knots.tau(i); };
    Eigen::VectorXd A(J - 2);
    for (int j = 3; j <= J; ++j) {
        double d1 = safe_ratio(gamma[j - 1] - gamma[j - 2], tau(j + 3) - tau(j));
        double d0 = safe_ratio(gamma[j - 2] - gamma[j - 3], tau(j + 2) - tau(j - 1));
        A[j - 3] = safe_ratio(d1 - d0, tau(j + 2) - tau(j));
    }
    return A;
}

double spline_value(const KnotSet& knots, const Eigen::VectorXd& gamma, double x) {
    if (gamma.size() != knots.num_basis())
        throw ArgumentError("gamma length must equal the basis size J");
    return eval_basis(knots, x, 4).dot(gamma);
}

}  // namespace monospline
