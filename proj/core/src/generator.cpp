#include "monospline/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "monospline/parallel.hpp"
#include "monospline/rng.hpp"

namespace monospline {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

double gelu_grad(double x) {
    return 0.5 * (1.0 + std::erf(x * kInvSqrt2)) + x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

std::vector<int> stable_argsort(const Eigen::VectorXd& v) {
    std::vector<int> idx(static_cast<std::size_t>(v.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
    return idx;
}

std::vector<int> net_dims(const GeneratorNet& net) {
    std::vector<int> dims;
    dims.push_back(net.input_dim);
    for (int h : net.hidden) dims.push_back(h);
    dims.push_back(net.output_dim);
    return dims;
}

GeneratorNet init_net(int input_dim, int output_dim, const GeneratorConfig& config, Rng& rng) {
    GeneratorNet net;
    net.input_dim = input_dim;
    net.output_dim = output_dim;
    net.hidden = config.hidden;
    std::vector<int> dims = net_dims(net);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        int fan_in = dims[l];
        int fan_out = dims[l + 1];
        bool last = l + 2 == dims.size();
        double std_dev = last ? std::sqrt(1.0 / fan_in) : std::sqrt(2.0 / fan_in);
        Eigen::MatrixXd W(fan_out, fan_in);
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = std_dev * rng.normal();
        net.weights.push_back(std::move(W));
        net.biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }
    return net;
}

double normalize_lambda(const GeneratorNet& net, double lambda) {
    double span = net.lambda_upper - net.lambda_lower;
    return span > 0.0 ? (lambda - net.lambda_lower) / span : 0.0;
}

/// One training batch: per-column targets and penalty weights; inputs are the
/// standardized targets' source vectors with the normalized lambda appended.
struct Batch {
    Eigen::MatrixXd inputs;   // (n+1) x M, already standardized
    Eigen::MatrixXd targets;  // n x M
    std::vector<double> lambdas;
};

struct ForwardCache {
    std::vector<Eigen::MatrixXd> pre;   // pre-activations per layer
    std::vector<Eigen::MatrixXd> post;  // post-activations (post[0] = input)
    Eigen::MatrixXd gamma;              // J x M, destandardized sorted output
    std::vector<std::vector<int>> perms;
};

ForwardCache forward_batch(const GeneratorNet& net, const Eigen::MatrixXd& inputs) {
    const std::size_t L = net.weights.size();
    ForwardCache cache;
    cache.post.push_back(inputs);
    for (std::size_t l = 0; l < L; ++l) {
        Eigen::MatrixXd z = net.weights[l] * cache.post.back();
        z.colwise() += net.biases[l];
        cache.pre.push_back(z);
        if (l + 1 < L)
            cache.post.push_back(z.unaryExpr([](double v) { return gelu(v); }));
        else
            cache.post.push_back(std::move(z));
    }
    const Eigen::MatrixXd& raw = cache.post.back();
    cache.gamma.resize(raw.rows(), raw.cols());
    cache.perms.resize(static_cast<std::size_t>(raw.cols()));
    for (Eigen::Index m = 0; m < raw.cols(); ++m) {
        std::vector<int> p = stable_argsort(raw.col(m));
        for (Eigen::Index k = 0; k < raw.rows(); ++k)
            cache.gamma(k, m) = net.y_mean + net.y_scale * raw(p[static_cast<std::size_t>(k)], m);
        cache.perms[static_cast<std::size_t>(m)] = std::move(p);
    }
    return cache;
}

struct ParamGrads {
    double loss = 0.0;
    std::vector<Eigen::MatrixXd> dW;
    std::vector<Eigen::VectorXd> db;
};

ParamGrads batch_gradients(const GeneratorNet& net, const Eigen::MatrixXd& B,
                           const Eigen::MatrixXd& omega, const Batch& batch) {
    const std::size_t L = net.weights.size();
    const Eigen::Index M = batch.inputs.cols();
    ForwardCache cache = forward_batch(net, batch.inputs);

    // loss and gradient w.r.t. the sorted, destandardized output
    ParamGrads out;
    Eigen::MatrixXd grad_sorted(cache.gamma.rows(), M);
    for (Eigen::Index m = 0; m < M; ++m) {
        Eigen::VectorXd gamma = cache.gamma.col(m);
        Eigen::VectorXd resid = B * gamma - batch.targets.col(m);
        Eigen::VectorXd omega_g = omega * gamma;
        double lambda = batch.lambdas[static_cast<std::size_t>(m)];
        out.loss += resid.squaredNorm() + lambda * gamma.dot(omega_g);
        grad_sorted.col(m) =
            net.y_scale * (2.0 * (B.transpose() * resid) + 2.0 * lambda * omega_g);
    }
    out.loss /= static_cast<double>(M);

    // undo the sort: the permutation routes each gradient entry home
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(cache.gamma.rows(), M);
    for (Eigen::Index m = 0; m < M; ++m) {
        const std::vector<int>& p = cache.perms[static_cast<std::size_t>(m)];
        for (Eigen::Index k = 0; k < cache.gamma.rows(); ++k)
            grad(p[static_cast<std::size_t>(k)], m) = grad_sorted(k, m);
    }

    out.dW.resize(L);
    out.db.resize(L);
    for (std::size_t l = L; l-- > 0;) {
        out.dW[l] = grad * cache.post[l].transpose() / static_cast<double>(M);
        out.db[l] = grad.rowwise().sum() / static_cast<double>(M);
        if (l > 0) {
            grad = net.weights[l].transpose() * grad;
            grad.array() *= cache.pre[l - 1].unaryExpr([](double v) { return gelu_grad(v); }).array();
        }
    }
    return out;
}

struct Adam {
    std::vector<Eigen::MatrixXd> mW, vW;
    std::vector<Eigen::VectorXd> mb, vb;
    long t = 0;
    double lr = 1e-3;
    static constexpr double beta1 = 0.9;
    static constexpr double beta2 = 0.999;
    static constexpr double eps = 1e-8;

    explicit Adam(const GeneratorNet& net, double rate) : lr(rate) {
        for (const auto& W : net.weights) {
            mW.push_back(Eigen::MatrixXd::Zero(W.rows(), W.cols()));
            vW.push_back(Eigen::MatrixXd::Zero(W.rows(), W.cols()));
        }
        for (const auto& b : net.biases) {
            mb.push_back(Eigen::VectorXd::Zero(b.size()));
            vb.push_back(Eigen::VectorXd::Zero(b.size()));
        }
    }

    void step(GeneratorNet& net, const ParamGrads& g) {
        ++t;
        double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        for (std::size_t l = 0; l < net.weights.size(); ++l) {
            mW[l] = beta1 * mW[l] + (1.0 - beta1) * g.dW[l];
            vW[l] = beta2 * vW[l].array().matrix() + (1.0 - beta2) * g.dW[l].array().square().matrix();
            net.weights[l].array() -=
                lr * (mW[l].array() / c1) / ((vW[l].array() / c2).sqrt() + eps);
            mb[l] = beta1 * mb[l] + (1.0 - beta1) * g.db[l];
            vb[l] = beta2 * vb[l].array().matrix() + (1.0 - beta2) * g.db[l].array().square().matrix();
            net.biases[l].array() -=
                lr * (mb[l].array() / c1) / ((vb[l].array() / c2).sqrt() + eps);
        }
    }
};

double sample_lambda(Rng& rng, double lo, double hi, bool log_uniform) {
    if (!log_uniform) return rng.uniform(lo, hi);
    return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

double sd_n1(const Eigen::VectorXd& r) {
    if (r.size() < 2) return 0.0;
    double mean = r.mean();
    return std::sqrt((r.array() - mean).square().sum() / static_cast<double>(r.size() - 1));
}

/// Shared training loop; `make_batch` fills the per-step batch and
/// `probe_loss` evaluates a deterministic validation loss (fixed lambda grid,
/// no sampling noise) used by the plateau stop.
template <typename BatchFn, typename ProbeFn>
void run_training(GeneratorNet& net, const Eigen::MatrixXd& B, const Eigen::MatrixXd& omega,
                  const GeneratorConfig& config, BatchFn&& make_batch, ProbeFn&& probe_loss) {
    Adam adam(net, config.learning_rate);
    double best_probe = std::numeric_limits<double>::infinity();
    long window_count = 0;
    double last_finite = std::numeric_limits<double>::quiet_NaN();

    for (long step = 0; step < config.max_iterations; ++step) {
        Batch batch = make_batch(step);
        ParamGrads grads = batch_gradients(net, B, omega, batch);
        if (!std::isfinite(grads.loss))
            throw TrainingFailure("training loss became non-finite", step, last_finite);
        last_finite = grads.loss;
        adam.step(net, grads);
        net.training_log.push_back(grads.loss);

        if (++window_count == config.plateau_window) {
            window_count = 0;
            double probe = probe_loss();
            if (!std::isfinite(probe))
                throw TrainingFailure("validation loss became non-finite", step, last_finite);
            if (probe < best_probe * (1.0 - config.plateau_rel_tol)) {
                best_probe = probe;
            } else {
                // plateaued at this step size: anneal, and stop once the
                // rate has decayed three orders of magnitude
                adam.lr *= 0.5;
                if (adam.lr < 1e-3 * config.learning_rate) break;
            }
        }
    }
}

/// Deterministic probe over an even lambda grid for the plateau stop.
double probe_grid_loss(const GeneratorNet& net, const Eigen::MatrixXd& B,
                       const Eigen::MatrixXd& omega,
                       const std::vector<Eigen::VectorXd>& targets,
                       const std::vector<double>& lambdas) {
    double acc = 0.0;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        Eigen::MatrixXd input(net.input_dim, 1);
        input.col(0).head(net.input_dim - 1) =
            (targets[k].array() - net.y_mean) / net.y_scale;
        input(net.input_dim - 1, 0) = normalize_lambda(net, lambdas[k]);
        Eigen::VectorXd gamma = forward_batch(net, input).gamma.col(0);
        acc += (targets[k] - B * gamma).squaredNorm() + lambdas[k] * gamma.dot(omega * gamma);
    }
    return acc / static_cast<double>(lambdas.size());
}

}  // namespace

Eigen::VectorXd forward(const GeneratorNet& net, const Eigen::VectorXd& y, double lambda) {
    if (y.size() + 1 != net.input_dim)
        throw ArgumentError("input length must be input_dim - 1 = " +
                            std::to_string(net.input_dim - 1));
    Eigen::MatrixXd input(net.input_dim, 1);
    input.col(0).head(y.size()) = (y.array() - net.y_mean) / net.y_scale;
    input(net.input_dim - 1, 0) = normalize_lambda(net, lambda);
    return forward_batch(net, input).gamma.col(0);
}

Eigen::VectorXd sort_gradient(const Eigen::VectorXd& v, const Eigen::VectorXd& upstream) {
    if (v.size() != upstream.size()) throw ArgumentError("gradient size mismatch");
    std::vector<int> p = stable_argsort(v);
    Eigen::VectorXd out(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) out[p[static_cast<std::size_t>(k)]] = upstream[k];
    return out;
}

GeneratorNet train_point_generator(const std::vector<double>& x, const Eigen::VectorXd& y,
                                   const KnotSet& knots, const PenaltyMatrix& penalty,
                                   double lambda_lower, double lambda_upper,
                                   const GeneratorConfig& config, std::uint64_t seed) {
    const int n = static_cast<int>(x.size());
    if (y.size() != n) throw ArgumentError("x and y must have the same length");
    if (!(lambda_lower >= 0.0 && lambda_upper > lambda_lower))
        throw ArgumentError("lambda range must satisfy 0 <= lower < upper");

    DesignMatrix dm = design_matrix(knots, x);
    Rng rng(seed);
    GeneratorNet net = init_net(n + 1, static_cast<int>(dm.cols()), config, rng);
    net.lambda_lower = lambda_lower;
    net.lambda_upper = lambda_upper;
    net.y_mean = y.mean();
    double s = sd_n1(y);
    net.y_scale = s > 0.0 ? s : 1.0;
    net.mode = GeneratorMode::Point;

    Eigen::VectorXd z = (y.array() - net.y_mean) / net.y_scale;
    const int M = config.batch;
    std::vector<double> probe_lambdas;
    std::vector<Eigen::VectorXd> probe_targets;
    for (int k = 0; k < 10; ++k) {
        probe_lambdas.push_back(lambda_lower + (lambda_upper - lambda_lower) * k / 9.0);
        probe_targets.push_back(y);
    }
    run_training(net, dm.values, penalty.omega, config, [&](long) {
        Batch batch;
        batch.inputs.resize(n + 1, M);
        batch.targets.resize(n, M);
        for (int m = 0; m < M; ++m) {
            double lambda = sample_lambda(rng, lambda_lower, lambda_upper, config.log_uniform_lambda);
            batch.inputs.col(m).head(n) = z;
            batch.inputs(n, m) = normalize_lambda(net, lambda);
            batch.targets.col(m) = y;
            batch.lambdas.push_back(lambda);
        }
        return batch;
    }, [&] {
        return probe_grid_loss(net, dm.values, penalty.omega, probe_targets, probe_lambdas);
    });
    return net;
}

GeneratorNet train_band_generator(const std::vector<double>& x, const Eigen::VectorXd& y,
                                  const KnotSet& knots, const PenaltyMatrix& penalty,
                                  double lambda_lower, double lambda_upper,
                                  const GeneratorConfig& config, const GeneratorNet& point_net,
                                  std::uint64_t seed) {
    const int n = static_cast<int>(x.size());
    if (y.size() != n) throw ArgumentError("x and y must have the same length");
    if (point_net.mode != GeneratorMode::Point)
        throw ArgumentError("band training requires a pre-trained point generator");
    if (point_net.input_dim != n + 1)
        throw ArgumentError("point generator was trained for a different sample size");

    DesignMatrix dm = design_matrix(knots, x);
    // warm start from the point net; the frozen original supplies
    // y_hat(lambda) and sigma_hat(lambda) during training
    GeneratorNet net = point_net;
    net.mode = GeneratorMode::Band;
    net.lambda_lower = lambda_lower;
    net.lambda_upper = lambda_upper;
    net.training_log.clear();

    Rng rng(seed);
    const int M = config.batch;
    const int inner = std::max(1, config.inner_batch);
    std::vector<double> probe_lambdas;
    std::vector<Eigen::VectorXd> probe_targets;  // unperturbed y_hat(lambda)
    for (int k = 0; k < 10; ++k) {
        double lambda = lambda_lower + (lambda_upper - lambda_lower) * k / 9.0;
        probe_lambdas.push_back(lambda);
        probe_targets.push_back(dm.values * forward(point_net, y, lambda));
    }
    run_training(net, dm.values, penalty.omega, config, [&](long) {
        Batch batch;
        batch.inputs.resize(n + 1, M * inner);
        batch.targets.resize(n, M * inner);
        for (int j = 0; j < M; ++j) {
            double lambda = sample_lambda(rng, lambda_lower, lambda_upper, config.log_uniform_lambda);
            Eigen::VectorXd y_hat = dm.values * forward(point_net, y, lambda);
            double sigma = sd_n1(y - y_hat);
            for (int i = 0; i < inner; ++i) {
                int col = j * inner + i;
                Eigen::VectorXd perturbed(n);
                for (int k = 0; k < n; ++k) perturbed[k] = y_hat[k] + sigma * rng.normal();
                batch.targets.col(col) = perturbed;
                batch.inputs.col(col).head(n) = (perturbed.array() - net.y_mean) / net.y_scale;
                batch.inputs(n, col) = normalize_lambda(net, lambda);
                batch.lambdas.push_back(lambda);
            }
        }
        return batch;
    }, [&] {
        return probe_grid_loss(net, dm.values, penalty.omega, probe_targets, probe_lambdas);
    });
    return net;
}

ConfidenceBand band_from_generator(const GeneratorNet& net, const DesignMatrix& design,
                                   const Eigen::VectorXd& y_hat, double sigma_hat, double lambda,
                                   int B, double alpha, std::uint64_t seed, int n_threads) {
    const int n = static_cast<int>(design.rows());
    if (y_hat.size() != n) throw ArgumentError("y_hat length must match the design rows");
    if (B < 1) throw ArgumentError("need at least one bootstrap evaluation");

    Eigen::MatrixXd curves(B, n);
    Rng root(seed);
    parallel_for(B, [&](int b) {
        Rng stream = root.substream(static_cast<std::uint64_t>(b));
        Eigen::VectorXd perturbed(n);
        for (int k = 0; k < n; ++k) perturbed[k] = y_hat[k] + sigma_hat * stream.normal();
        Eigen::VectorXd gamma = forward(net, perturbed, lambda);
        curves.row(b) = (design.values * gamma).transpose();
    }, n_threads);

    ConfidenceBand band = band_from_curves(design.x, curves, alpha);
    band.kind = BandKind::Parametric;
    band.source = BandSource::Generator;
    return band;
}

GapReport gap_report(const GeneratorNet& net, const DesignMatrix& design, const Eigen::VectorXd& y,
                     const std::vector<double>& lambda_grid,
                     const std::vector<SplineFit>& opt_fits) {
    if (lambda_grid.size() != opt_fits.size())
        throw ArgumentError("lambda grid and optimizer fits must align");
    if (lambda_grid.empty()) throw ArgumentError("lambda grid must be nonempty");

    GapReport report;
    for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
        Eigen::VectorXd g = forward(net, y, lambda_grid[k]);
        Eigen::VectorXd bg = design.values * g;
        const Eigen::VectorXd& bopt = opt_fits[k].fitted;
        double gap = (bg - bopt).squaredNorm() / bopt.squaredNorm();
        double ratio = (y - bg).squaredNorm() / (y - bopt).squaredNorm();
        report.lambdas.push_back(lambda_grid[k]);
        report.relative_gap.push_back(gap);
        report.fitness_ratio.push_back(ratio);
        report.mean_relative_gap += gap;
        report.mean_fitness_ratio += ratio;
    }
    report.mean_relative_gap /= static_cast<double>(lambda_grid.size());
    report.mean_fitness_ratio /= static_cast<double>(lambda_grid.size());
    return report;
}

double generator_loss(const GeneratorNet& net, const DesignMatrix& design,
                      const PenaltyMatrix& penalty, const Eigen::VectorXd& y, double lambda) {
    Eigen::VectorXd gamma = forward(net, y, lambda);
    return (y - design.values * gamma).squaredNorm() +
           lambda * gamma.dot(penalty.omega * gamma);
}

GeneratorPointEval generator_point_eval(const GeneratorNet& net, const DesignMatrix& design,
                                        const Eigen::VectorXd& y, double lambda) {
    GeneratorPointEval ev;
    ev.y_hat = design.values * forward(net, y, lambda);
    ev.sigma_hat = sd_n1(y - ev.y_hat);
    return ev;
}

// ---- serialization -------------------------------------------------------

namespace {

const char kB64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string b64_encode(const std::vector<unsigned char>& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < bytes.size(); i += 3) {
        unsigned v = bytes[i] << 16;
        if (i + 1 < bytes.size()) v |= bytes[i + 1] << 8;
        if (i + 2 < bytes.size()) v |= bytes[i + 2];
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(i + 1 < bytes.size() ? kB64Alphabet[(v >> 6) & 63] : '=');
        out.push_back(i + 2 < bytes.size() ? kB64Alphabet[v & 63] : '=');
    }
    return out;
}

std::vector<unsigned char> b64_decode(const std::string& text) {
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::vector<unsigned char> out;
    int buffer = 0, bits = 0;
    for (char c : text) {
        if (c == '=') break;
        int v = value(c);
        if (v < 0) throw ArgumentError("invalid base64 payload");
        buffer = (buffer << 6) | v;
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<unsigned char>((buffer >> bits) & 0xff));
        }
    }
    return out;
}

std::string doubles_to_b64(const double* data, std::size_t count) {
    std::vector<unsigned char> bytes(count * 8);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, data + i, 8);
        for (int k = 0; k < 8; ++k)
            bytes[i * 8 + static_cast<std::size_t>(k)] =
                static_cast<unsigned char>((bits >> (8 * k)) & 0xff);  // little-endian
    }
    return b64_encode(bytes);
}

std::vector<double> b64_to_doubles(const std::string& text) {
    std::vector<unsigned char> bytes = b64_decode(text);
    if (bytes.size() % 8 != 0) throw ArgumentError("weight payload is not a multiple of 8 bytes");
    std::vector<double> out(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t bits = 0;
        for (int k = 7; k >= 0; --k)
            bits = (bits << 8) | bytes[i * 8 + static_cast<std::size_t>(k)];
        std::memcpy(&out[i], &bits, 8);
    }
    return out;
}

}  // namespace

std::string generator_to_json(const GeneratorNet& net) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["kind"] = "generator_net";
    j["mode"] = net.mode == GeneratorMode::Point ? "point" : "band";
    j["input_dim"] = net.input_dim;
    j["output_dim"] = net.output_dim;
    j["hidden"] = net.hidden;
    j["activation"] = net.activation;
    j["lambda_range"] = {net.lambda_lower, net.lambda_upper};
    j["y_mean_bits"] = doubles_to_b64(&net.y_mean, 1);
    j["y_scale_bits"] = doubles_to_b64(&net.y_scale, 1);
    j["training_steps"] = net.training_log.size();
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        nlohmann::json layer;
        layer["rows"] = net.weights[l].rows();
        layer["cols"] = net.weights[l].cols();
        layer["W"] = doubles_to_b64(net.weights[l].data(),
                                    static_cast<std::size_t>(net.weights[l].size()));
        layer["b"] = doubles_to_b64(net.biases[l].data(),
                                    static_cast<std::size_t>(net.biases[l].size()));
        layers.push_back(std::move(layer));
    }
    j["layers"] = std::move(layers);
    return j.dump(2);
}

GeneratorNet generator_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("kind") || j["kind"] != "generator_net")
        throw ArgumentError("not a generator model file");
    if (j.value("schema_version", 0) != 1)
        throw ArgumentError("unsupported generator model schema version");
    GeneratorNet net;
    net.input_dim = j["input_dim"];
    net.output_dim = j["output_dim"];
    net.hidden = j["hidden"].get<std::vector<int>>();
    net.activation = j["activation"];
    net.mode = j["mode"] == "band" ? GeneratorMode::Band : GeneratorMode::Point;
    net.lambda_lower = j["lambda_range"][0];
    net.lambda_upper = j["lambda_range"][1];
    net.y_mean = b64_to_doubles(j["y_mean_bits"]).at(0);
    net.y_scale = b64_to_doubles(j["y_scale_bits"]).at(0);
    for (const auto& layer : j["layers"]) {
        Eigen::Index rows = layer["rows"];
        Eigen::Index cols = layer["cols"];
        std::vector<double> w = b64_to_doubles(layer["W"]);
        std::vector<double> b = b64_to_doubles(layer["b"]);
        if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
            static_cast<Eigen::Index>(b.size()) != rows)
            throw ArgumentError("layer payload size mismatch");
        Eigen::MatrixXd W(rows, cols);
        std::memcpy(W.data(), w.data(), w.size() * sizeof(double));
        net.weights.push_back(std::move(W));
        net.biases.push_back(Eigen::Map<Eigen::VectorXd>(b.data(), rows));
    }
    return net;
}

/// Exposed for gradient checking against finite differences of the batch loss.
GeneratorGradients generator_loss_gradients(const GeneratorNet& net, const DesignMatrix& design,
                                            const PenaltyMatrix& penalty, const Eigen::VectorXd& y,
                                            const std::vector<double>& lambdas) {
    const int n = static_cast<int>(y.size());
    Batch batch;
    batch.inputs.resize(n + 1, static_cast<Eigen::Index>(lambdas.size()));
    batch.targets.resize(n, static_cast<Eigen::Index>(lambdas.size()));
    Eigen::VectorXd z = (y.array() - net.y_mean) / net.y_scale;
    for (std::size_t m = 0; m < lambdas.size(); ++m) {
        batch.inputs.col(static_cast<Eigen::Index>(m)).head(n) = z;
        batch.inputs(n, static_cast<Eigen::Index>(m)) = normalize_lambda(net, lambdas[m]);
        batch.targets.col(static_cast<Eigen::Index>(m)) = y;
        batch.lambdas.push_back(lambdas[m]);
    }
    ParamGrads g = batch_gradients(net, design.values, penalty.omega, batch);
    return {g.loss, std::move(g.dW), std::move(g.db)};
}

}  // namespace monospline
