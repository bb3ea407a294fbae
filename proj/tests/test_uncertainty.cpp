#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "monospline/rng.hpp"
#include "monospline/simbench.hpp"
#include "monospline/uncertainty.hpp"

using namespace monospline;

namespace {

BandFitConfig config_for(const Sample& s, int K, double lambda) {
    BandFitConfig c;
    c.knots = make_knots(s.x, K);
    c.lambda = lambda;
    return c;
}

}  // namespace

TEST_CASE("jaccard_interval: toy cases and the a/(2-a) family") {
    CHECK(jaccard_interval({0, 1}, {0, 1}) == 1.0);
    CHECK(jaccard_interval({0, 1}, {2, 3}) == 0.0);
    for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        double j = jaccard_interval({0, 1}, {a - 1.0, a});
        CHECK(j == doctest::Approx(a / (2.0 - a)).epsilon(1e-15));
    }
    // degenerate widths
    CHECK(jaccard_interval({0.5, 0.5}, {0.5, 0.5}) == 1.0);
    CHECK(jaccard_interval({0.5, 0.5}, {0.25, 0.75}) == 0.0);
    CHECK(jaccard_interval({0.5, 0.5}, {0.6, 0.6}) == 0.0);
    CHECK_THROWS_AS(jaccard_interval({1, 0}, {0, 1}), ArgumentError);
}

TEST_CASE("jaccard symmetry and range over random intervals") {
    Rng rng(404);
    for (int trial = 0; trial < 500; ++trial) {
        double a1 = rng.normal(), a2 = rng.normal();
        double b1 = rng.normal(), b2 = rng.normal();
        Interval a{std::min(a1, a2), std::max(a1, a2)};
        Interval b{std::min(b1, b2), std::max(b1, b2)};
        double jab = jaccard_interval(a, b);
        CHECK(jab == jaccard_interval(b, a));
        CHECK(jab >= 0.0);
        CHECK(jab <= 1.0);
    }
}

TEST_CASE("jaccard_band: identity, disjoint, and mixed averages") {
    ConfidenceBand b1;
    b1.x = {0.0, 1.0};
    b1.lower.resize(2);
    b1.upper.resize(2);
    b1.lower << 0.0, 0.0;
    b1.upper << 1.0, 1.0;
    CHECK(jaccard_band(b1, b1) == 1.0);

    ConfidenceBand apart = b1;
    apart.lower << 5.0, 5.0;
    apart.upper << 6.0, 6.0;
    CHECK(jaccard_band(b1, apart) == 0.0);

    // half the grid identical, half overlapping at a/(2-a) = 1/3 (a = 0.5)
    ConfidenceBand mixed = b1;
    mixed.lower << 0.0, -0.5;
    mixed.upper << 1.0, 0.5;
    CHECK(jaccard_band(b1, mixed) == doctest::Approx((1.0 + 1.0 / 3.0) / 2.0).epsilon(1e-12));

    ConfidenceBand other;
    other.x = {0.0, 2.0};
    other.lower = b1.lower;
    other.upper = b1.upper;
    CHECK_THROWS_AS(jaccard_band(b1, other), ArgumentError);
}

TEST_CASE("coverage probability is a simple fraction") {
    ConfidenceBand band;
    band.x.resize(100);
    band.lower.resize(100);
    band.upper.resize(100);
    Eigen::VectorXd truth(100);
    for (int i = 0; i < 100; ++i) {
        band.x[static_cast<std::size_t>(i)] = i;
        band.lower[i] = 0.0;
        band.upper[i] = 1.0;
        truth[i] = i < 95 ? 0.5 : 2.0;  // 95 inside, 5 outside
    }
    CHECK(coverage_probability(band, truth) == doctest::Approx(0.95));
    CHECK(coverage_probability(band, Eigen::VectorXd::Constant(100, 0.5)) == 1.0);
    CHECK(coverage_probability(band, Eigen::VectorXd::Constant(100, 9.0)) == 0.0);
}

TEST_CASE("percentile rule: order statistic at ceil(qB)") {
    std::vector<double> v{4.0, 1.0, 3.0, 2.0};
    CHECK(percentile(v, 0.25) == 1.0);   // ceil(1) = 1st
    CHECK(percentile(v, 0.26) == 2.0);   // ceil(1.04) = 2nd
    CHECK(percentile(v, 0.75) == 3.0);
    CHECK(percentile(v, 1.0) == 4.0);
    CHECK(percentile(v, 1e-9) == 1.0);
}

TEST_CASE("band from stored curves equals hand-sorted quantiles (B=4)") {
    std::vector<double> x{0.0, 0.5, 1.0};
    Eigen::MatrixXd curves(4, 3);
    curves << 1, 10, 0,
              2, 20, -1,
              3, 30, -2,
              4, 40, -3;
    ConfidenceBand band = band_from_curves(x, curves, 0.5);
    // alpha/2 = 0.25 -> 1st order statistic; 0.75 -> 3rd
    CHECK(band.lower[0] == 1.0);
    CHECK(band.upper[0] == 3.0);
    CHECK(band.lower[1] == 10.0);
    CHECK(band.upper[1] == 30.0);
    CHECK(band.lower[2] == -3.0);
    CHECK(band.upper[2] == -1.0);
}

TEST_CASE("alpha=0.5 band is the pointwise IQR of the bootstrap fits") {
    CurveSpec spec = curve_by_name("s5x");
    Sample s = generate(spec, 50, 0.15, 8);
    BandFitConfig cfg = config_for(s, 3, 1e-4);
    ConfidenceBand band = band_parametric(s.x, s.y, cfg, 40, 0.5, 99);
    CHECK(band.level == doctest::Approx(0.5));
    for (std::size_t i = 0; i < band.x.size(); ++i)
        CHECK(band.lower[static_cast<Eigen::Index>(i)] <= band.upper[static_cast<Eigen::Index>(i)]);
}

TEST_CASE("sigma=0 data gives a zero-width band") {
    // truth that the spline can reproduce exactly: every refit is identical
    CurveSpec spec = curve_by_name("s5x");
    Sample s = generate(spec, 60, 0.0, 3);
    KnotSet ks = make_knots(s.x, 3);
    DesignMatrix dm = design_matrix(ks, s.x);
    PenaltyMatrix pm = penalty_matrix(ks);
    Eigen::VectorXd truth = fit_monotone(dm, pm, s.y, 0.0).fitted;

    BandFitConfig cfg;
    cfg.knots = ks;
    cfg.lambda = 0.0;
    ConfidenceBand par = band_parametric(s.x, truth, cfg, 30, 0.05, 1);
    CHECK((par.upper - par.lower).cwiseAbs().maxCoeff() <= 1e-6);

    ConfidenceBand non = band_nonparametric(s.x, truth, cfg, 30, 0.05, 1);
    CHECK((non.upper - non.lower).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("bands are deterministic given the seed, including threaded runs") {
    CurveSpec spec = curve_by_name("cubic");
    Sample s = generate(spec, 40, 0.2, 12);
    BandFitConfig cfg = config_for(s, 2, 1e-3);
    ConfidenceBand a = band_nonparametric(s.x, s.y, cfg, 25, 0.1, 777);
    cfg.n_threads = 2;
    ConfidenceBand b = band_nonparametric(s.x, s.y, cfg, 25, 0.1, 777);
    CHECK(a.lower == b.lower);
    CHECK(a.upper == b.upper);

    ConfidenceBand c = band_parametric(s.x, s.y, cfg, 25, 0.1, 777);
    ConfidenceBand d = band_parametric(s.x, s.y, cfg, 25, 0.1, 777);
    CHECK(c.lower == d.lower);
    CHECK(c.upper == d.upper);
}

TEST_CASE("parametric band almost always contains the point fit") {
    CurveSpec spec = curve_by_name("cubic");
    Sample s = generate(spec, 80, 0.2, 21);
    KnotSet ks = make_knots(s.x, 4);
    BandFitConfig cfg;
    cfg.knots = ks;
    cfg.lambda = std::exp(-5.0);
    cfg.n_threads = 2;
    DesignMatrix dm = design_matrix(ks, s.x);
    PenaltyMatrix pm = penalty_matrix(ks);
    Eigen::VectorXd point = fit_monotone(dm, pm, s.y, cfg.lambda).fitted;
    ConfidenceBand band = band_parametric(s.x, s.y, cfg, 500, 0.05, 4);
    int inside = 0;
    for (Eigen::Index i = 0; i < point.size(); ++i)
        if (band.lower[i] <= point[i] && point[i] <= band.upper[i]) ++inside;
    CHECK(static_cast<double>(inside) / static_cast<double>(point.size()) >= 0.99);
}

TEST_CASE("coverage of the truth drops as the penalty grows") {
    CurveSpec spec = curve_by_name("cubic");
    Sample s = generate(spec, 90, 0.2, 33);
    double cover[3];
    int k = 0;
    for (double lambda : {std::exp(-8.0), std::exp(-5.0), std::exp(-2.0)}) {
        BandFitConfig cfg = config_for(s, 6, lambda);
        cfg.n_threads = 2;
        ConfidenceBand band = band_parametric(s.x, s.y, cfg, 200, 0.05, 5);
        cover[k++] = coverage_probability(band, s.truth);
    }
    CHECK(cover[0] >= cover[2]);  // heavier smoothing misses the truth more
}

TEST_CASE("bootstrap refit failures exhaust their retries and abort the band") {
    // J > n with lambda = 0: every refit is rank deficient, so all replicates
    // fail after their retries and the band cannot be formed
    CurveSpec spec = curve_by_name("s5x");
    Sample s = generate(spec, 8, 0.2, 2);
    BandFitConfig cfg;
    cfg.knots = make_knots(s.x, 5);  // J = 9 > n = 8
    cfg.lambda = 0.0;
    CHECK_THROWS_AS(band_nonparametric(s.x, s.y, cfg, 8, 0.1, 3), SolverFailure);
}

TEST_CASE("band serialization carries the grid and the data") {
    ConfidenceBand band;
    band.x = {0.0, 1.0};
    band.lower.resize(2);
    band.upper.resize(2);
    band.lower << -1.0, 0.0;
    band.upper << 1.0, 2.0;
    band.B = 7;
    std::string csv = band_to_csv(band);
    CHECK(csv.rfind("x,lower,upper\n", 0) == 0);
    CHECK(csv.find("\n1,0,2\n") != std::string::npos);
    std::string json = band_to_json(band);
    CHECK(json.find("\"B\": 7") != std::string::npos);
}
