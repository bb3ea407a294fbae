#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "monospline/penalty.hpp"
#include "monospline/rng.hpp"
#include "oracles.hpp"

using namespace monospline;

namespace {

KnotSet random_knots(Rng& rng, int max_interior = 8) {
    int K = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_interior)));
    std::vector<double> interior;
    for (int i = 0; i < K; ++i) interior.push_back(rng.uniform(0.05, 0.95));
    std::sort(interior.begin(), interior.end());
    interior.erase(std::unique(interior.begin(), interior.end()), interior.end());
    return make_knot_set(0.0, interior, 1.0);
}

}  // namespace

TEST_CASE("Omega for the Bernstein basis on [0,1]") {
    // symbolic integration of the second derivatives 6(1-x), 18x-12, 6-18x, 6x
    KnotSet ks = make_knot_set(0.0, {}, 1.0);
    PenaltyMatrix p = penalty_matrix(ks);
    Eigen::MatrixXd expect(4, 4);
    expect << 12, -18, 0, 6,
              -18, 36, -18, 0,
              0, -18, 36, -18,
              6, 0, -18, 12;
    CHECK((p.omega - expect).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("constants are in the nullspace and the form is PSD") {
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        KnotSet ks = random_knots(rng);
        PenaltyMatrix p = penalty_matrix(ks);
        const Eigen::Index J = p.size();

        CHECK((p.omega * Eigen::VectorXd::Ones(J)).cwiseAbs().maxCoeff() <=
              1e-9 * p.omega.cwiseAbs().maxCoeff());
        CHECK((p.omega - p.omega.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * p.omega.norm());
        for (int k = 0; k < 5; ++k) {
            Eigen::VectorXd g(J);
            for (Eigen::Index j = 0; j < J; ++j) g[j] = rng.normal();
            CHECK(g.dot(p.omega * g) >= -1e-9 * p.omega.norm() * g.squaredNorm());
        }
        // band structure: entries vanish beyond |j-k| > 3
        for (Eigen::Index j = 0; j < J; ++j)
            for (Eigen::Index k = 0; k < J; ++k)
                if (std::abs(static_cast<long>(j - k)) > 3) CHECK(p.omega(j, k) == 0.0);
    }
}

TEST_CASE("Gauss-Legendre assembly matches a refined Simpson oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        KnotSet ks = random_knots(rng);
        PenaltyMatrix p = penalty_matrix(ks);
        Eigen::MatrixXd ref = oracle::simpson_omega(ks, 10);
        CHECK((p.omega - ref).norm() <= 1e-9 * ref.norm());
    }
}

TEST_CASE("linear splines are annihilated") {
    Rng rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        KnotSet ks = random_knots(rng);
        PenaltyMatrix p = penalty_matrix(ks);
        Eigen::VectorXd lin = oracle::greville(ks);
        CHECK((p.omega * lin).norm() <= 1e-8 * p.omega.norm());
        CHECK((p.omega * Eigen::VectorXd::Ones(p.size())).norm() <= 1e-8 * p.omega.norm());
    }
}

TEST_CASE("factorization reconstructs Omega with rank J-2") {
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        KnotSet ks = random_knots(rng);
        PenaltyMatrix p = penalty_matrix(ks);
        const Eigen::Index J = p.size();
        CHECK(p.rank == J - 2);
        CHECK((p.factor * p.factor.transpose() - p.omega).norm() <= 1e-9 * p.omega.norm());
        for (int k = 0; k < 5; ++k) {
            Eigen::VectorXd g(J);
            for (Eigen::Index j = 0; j < J; ++j) g[j] = rng.normal();
            double quad = g.dot(p.omega * g);
            double via_factor = (p.factor.transpose() * g).squaredNorm();
            CHECK(via_factor == doctest::Approx(quad).epsilon(1e-8));
        }
    }
}

TEST_CASE("zero matrix factorizes to an empty factor") {
    PenaltyMatrix p;
    p.omega = Eigen::MatrixXd::Zero(2, 2);
    factorize(p);
    CHECK(p.rank == 0);
    CHECK(p.factor.cols() == 0);
    CHECK(p.factor.rows() == 2);
}
