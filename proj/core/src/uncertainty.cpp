#include "monospline/uncertainty.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "monospline/parallel.hpp"
#include "monospline/rng.hpp"

namespace monospline {

namespace {

// separate substream tags so resample draws never collide with noise draws
constexpr std::uint64_t kResampleTag = 0x01;
constexpr std::uint64_t kNoiseTag = 0x02;

int quantile_index(double q, int B) {
    int idx = static_cast<int>(std::ceil(q * static_cast<double>(B)));
    idx = std::max(idx, 1);
    idx = std::min(idx, B);
    return idx - 1;  // 0-based
}

ConfidenceBand bootstrap_band(const std::vector<double>& x, const Eigen::VectorXd& y,
                              const BandFitConfig& config, int B, double alpha,
                              std::uint64_t seed, BandKind kind) {
    const int n = static_cast<int>(x.size());
    if (y.size() != n) throw ArgumentError("x and y must have the same length");
    if (B < 2) throw ArgumentError("need at least 2 bootstrap repetitions");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must be in (0, 1)");

    DesignMatrix dm = design_matrix(config.knots, x);
    PenaltyMatrix pm = penalty_matrix(config.knots);

    Eigen::VectorXd y_hat;
    double sigma_hat = 0.0;
    if (kind == BandKind::Parametric) {
        SplineFit point = fit_monotone(dm, pm, y, config.lambda, config.direction);
        y_hat = point.fitted;
        sigma_hat = point.residual_sd;
    }

    Eigen::MatrixXd curves(B, n);
    Rng root(seed);
    std::atomic<int> failures{0};

    parallel_for(B, [&](int b) {
        bool done = false;
        for (int attempt = 0; attempt < 4 && !done; ++attempt) {
            // retries continue the same replicate stream with a fresh resample
            Rng stream = root.substream(Rng::mix(static_cast<std::uint64_t>(b),
                                                 kind == BandKind::Parametric ? kNoiseTag
                                                                              : kResampleTag))
                             .substream(static_cast<std::uint64_t>(attempt));
            try {
                if (kind == BandKind::Nonparametric) {
                    std::vector<double> xb(static_cast<std::size_t>(n));
                    Eigen::VectorXd yb(n);
                    for (int i = 0; i < n; ++i) {
                        auto k = static_cast<std::size_t>(stream.below(static_cast<std::uint64_t>(n)));
                        xb[static_cast<std::size_t>(i)] = x[k];
                        yb[i] = y[static_cast<Eigen::Index>(k)];
                    }
                    DesignMatrix dmb = design_matrix(config.knots, xb);
                    SplineFit fit = fit_monotone(dmb, pm, yb, config.lambda, config.direction);
                    curves.row(b) = (dm.values * fit.gamma).transpose();
                } else {
                    Eigen::VectorXd yb(n);
                    for (int i = 0; i < n; ++i) yb[i] = y_hat[i] + sigma_hat * stream.normal();
                    SplineFit fit = fit_monotone(dm, pm, yb, config.lambda, config.direction);
                    curves.row(b) = fit.fitted.transpose();
                }
                done = true;
            } catch (const std::exception&) {
                // try again with a fresh draw
            }
        }
        if (!done) {
            failures.fetch_add(1);
            curves.row(b).setConstant(std::numeric_limits<double>::quiet_NaN());
        }
    }, config.n_threads);

    // drop failed rows before taking percentiles
    std::vector<int> ok;
    for (int b = 0; b < B; ++b)
        if (!std::isnan(curves(b, 0))) ok.push_back(b);
    if (static_cast<int>(ok.size()) < 2)
        throw SolverFailure("too many bootstrap refits failed", Eigen::VectorXd(), 0.0);
    Eigen::MatrixXd kept(static_cast<Eigen::Index>(ok.size()), n);
    for (std::size_t r = 0; r < ok.size(); ++r) kept.row(static_cast<Eigen::Index>(r)) = curves.row(ok[r]);

    ConfidenceBand band = band_from_curves(x, kept, alpha);
    band.kind = kind;
    band.source = BandSource::Opt;
    band.failed_replicates = failures.load();
    band.B = B;
    return band;
}

}  // namespace

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw ArgumentError("percentile of empty sample");
    std::sort(values.begin(), values.end());
    return values[static_cast<std::size_t>(quantile_index(q, static_cast<int>(values.size())))];
}

ConfidenceBand band_from_curves(const std::vector<double>& x, const Eigen::MatrixXd& curves,
                                double alpha) {
    const int B = static_cast<int>(curves.rows());
    const int n = static_cast<int>(curves.cols());
    if (n != static_cast<int>(x.size())) throw ArgumentError("curve grid mismatch");
    ConfidenceBand band;
    band.x = x;
    band.level = 1.0 - alpha;
    band.B = B;
    band.lower.resize(n);
    band.upper.resize(n);
    const int lo = quantile_index(alpha / 2.0, B);
    const int hi = quantile_index(1.0 - alpha / 2.0, B);
    std::vector<double> column(static_cast<std::size_t>(B));
    for (int i = 0; i < n; ++i) {
        for (int b = 0; b < B; ++b) column[static_cast<std::size_t>(b)] = curves(b, i);
        std::sort(column.begin(), column.end());
        band.lower[i] = column[static_cast<std::size_t>(lo)];
        band.upper[i] = column[static_cast<std::size_t>(hi)];
    }
    return band;
}

ConfidenceBand band_nonparametric(const std::vector<double>& x, const Eigen::VectorXd& y,
                                  const BandFitConfig& config, int B, double alpha,
                                  std::uint64_t seed) {
    return bootstrap_band(x, y, config, B, alpha, seed, BandKind::Nonparametric);
}

ConfidenceBand band_parametric(const std::vector<double>& x, const Eigen::VectorXd& y,
                               const BandFitConfig& config, int B, double alpha,
                               std::uint64_t seed) {
    return bootstrap_band(x, y, config, B, alpha, seed, BandKind::Parametric);
}

double jaccard_interval(const Interval& a, const Interval& b) {
    if (a.lower > a.upper || b.lower > b.upper)
        throw ArgumentError("interval bounds must satisfy lower <= upper");
    double inter = std::min(a.upper, b.upper) - std::max(a.lower, b.lower);
    inter = std::max(inter, 0.0);
    double uni = (a.upper - a.lower) + (b.upper - b.lower) - inter;
    if (uni <= 0.0)  // both zero-width: identical -> 1, apart -> 0
        return (a.lower == b.lower && a.upper == b.upper) ? 1.0 : 0.0;
    return inter / uni;
}

double jaccard_band(const ConfidenceBand& a, const ConfidenceBand& b) {
    if (a.x != b.x) throw ArgumentError("bands must share the same x grid");
    const int n = static_cast<int>(a.x.size());
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        acc += jaccard_interval({a.lower[i], a.upper[i]}, {b.lower[i], b.upper[i]});
    return acc / static_cast<double>(n);
}

double coverage_probability(const ConfidenceBand& band, const Eigen::VectorXd& truth) {
    const int n = static_cast<int>(band.x.size());
    if (truth.size() != n) throw ArgumentError("truth grid must match the band");
    int inside = 0;
    for (int i = 0; i < n; ++i)
        if (band.lower[i] <= truth[i] && truth[i] <= band.upper[i]) ++inside;
    return static_cast<double>(inside) / static_cast<double>(n);
}

std::string band_to_csv(const ConfidenceBand& band) {
    std::ostringstream out;
    out.precision(17);
    out << "x,lower,upper\n";
    for (std::size_t i = 0; i < band.x.size(); ++i)
        out << band.x[i] << ',' << band.lower[static_cast<Eigen::Index>(i)] << ','
            << band.upper[static_cast<Eigen::Index>(i)] << '\n';
    return out.str();
}

std::string band_to_json(const ConfidenceBand& band) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["kind"] = band.kind == BandKind::Nonparametric ? "nonparametric" : "parametric";
    j["source"] = band.source == BandSource::Opt ? "opt" : "generator";
    j["level"] = band.level;
    j["B"] = band.B;
    j["failed_replicates"] = band.failed_replicates;
    j["x"] = band.x;
    j["lower"] = std::vector<double>(band.lower.data(), band.lower.data() + band.lower.size());
    j["upper"] = std::vector<double>(band.upper.data(), band.upper.data() + band.upper.size());
    return j.dump(2);
}

}  // namespace monospline
