#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "monospline/solver.hpp"

namespace monospline {

enum class BandKind { Nonparametric, Parametric };
enum class BandSource { Opt, Generator };

/// Pointwise percentile confidence band over bootstrap fits.
struct ConfidenceBand {
    std::vector<double> x;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    double level = 0.95;  // 1 - alpha
    int B = 0;
    BandKind kind = BandKind::Nonparametric;
    BandSource source = BandSource::Opt;
    int failed_replicates = 0;  // refits that failed after 3 retries
};

/// Fit configuration shared by the point fit and every bootstrap refit; the
/// knot set stays fixed across replicates so curves are comparable on the
/// original grid.
struct BandFitConfig {
    KnotSet knots;
    double lambda = 0.0;
    int direction = +1;
    int n_threads = 1;
};

/// Percentile rule shared by every band in the toolkit: order statistic at
/// index ceil(q*B) (1-based) of the B values.
double percentile(std::vector<double> values, double q);

/// Nonparametric bootstrap (resample pairs with replacement, refit, take
/// pointwise percentiles). Deterministic given seed.
ConfidenceBand band_nonparametric(const std::vector<double>& x, const Eigen::VectorXd& y,
                                  const BandFitConfig& config, int B, double alpha,
                                  std::uint64_t seed);

/// Parametric bootstrap: fit once, then refit on y_hat + Gaussian noise with
/// the residual standard deviation sigma_hat (denominator n-1).
ConfidenceBand band_parametric(const std::vector<double>& x, const Eigen::VectorXd& y,
                               const BandFitConfig& config, int B, double alpha,
                               std::uint64_t seed);

/// Build the band from stored bootstrap curves (rows = replicates); shared by
/// the bootstrap routines and the generator band path.
ConfidenceBand band_from_curves(const std::vector<double>& x, const Eigen::MatrixXd& curves,
                                double alpha);

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Width-based Jaccard overlap |a n b| / |a u b| in [0, 1]; two identical
/// zero-width intervals count as 1, zero width against anything else as 0.
double jaccard_interval(const Interval& a, const Interval& b);

/// Mean pointwise Jaccard overlap of two bands on the same x grid.
double jaccard_band(const ConfidenceBand& a, const ConfidenceBand& b);

/// Fraction of grid points where the truth lies inside the band.
double coverage_probability(const ConfidenceBand& band, const Eigen::VectorXd& truth);

std::string band_to_csv(const ConfidenceBand& band);
std::string band_to_json(const ConfidenceBand& band);

}  // namespace monospline
