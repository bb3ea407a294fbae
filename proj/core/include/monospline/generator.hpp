#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "monospline/solver.hpp"
#include "monospline/uncertainty.hpp"

namespace monospline {

enum class GeneratorMode { Point, Band };

/// MLP that maps (y, lambda) to a sorted coefficient vector, so its output
/// satisfies the non-decreasing coefficient condition by construction.
///
/// Inputs are standardized internally (y centered/scaled by the training
/// data's moments, lambda mapped to [0,1]); the stored transform is inverted
/// on the output side, gamma = y_mean + y_scale * sort(mlp(...)).
struct GeneratorNet {
    int input_dim = 0;   // n + 1
    int output_dim = 0;  // J
    std::vector<int> hidden;
    std::vector<Eigen::MatrixXd> weights;  // layer l: (out x in)
    std::vector<Eigen::VectorXd> biases;
    std::string activation = "gelu";
    GeneratorMode mode = GeneratorMode::Point;
    double lambda_lower = 0.0;
    double lambda_upper = 1.0;
    double y_mean = 0.0;
    double y_scale = 1.0;
    std::vector<double> training_log;  // per-step loss
};

struct GeneratorConfig {
    std::vector<int> hidden = {128, 64};
    int batch = 32;                 // M in the training loops
    int inner_batch = 8;            // perturbation draws per lambda (band training)
    long max_iterations = 50000;
    long plateau_window = 2000;     // early stop when a window stops improving
    double plateau_rel_tol = 1e-4;
    double learning_rate = 1e-3;
    bool log_uniform_lambda = false;  // default: lambda ~ U[l, u] on the linear scale
};

/// Feed-forward pass followed by an ascending (stable) sort.
Eigen::VectorXd forward(const GeneratorNet& net, const Eigen::VectorXd& y, double lambda);

/// Backward rule of the sort layer: route the upstream gradient through the
/// sorting permutation (stable, ascending).
Eigen::VectorXd sort_gradient(const Eigen::VectorXd& v, const Eigen::VectorXd& upstream);

/// Algorithm-2 style training of the point generator G(y, lambda): minimize
/// the Monte-Carlo average of ||y - B G||^2 + lambda ||L^T G||^2 over
/// lambda ~ U[lambda_range].
GeneratorNet train_point_generator(const std::vector<double>& x, const Eigen::VectorXd& y,
                                   const KnotSet& knots, const PenaltyMatrix& penalty,
                                   double lambda_lower, double lambda_upper,
                                   const GeneratorConfig& config, std::uint64_t seed);

/// Algorithm-5 style training of the band generator: warm-started from the
/// point net, fitted on perturbed inputs y_hat(lambda) + e with
/// e ~ N(0, sigma_hat(lambda)^2 I) computed from the frozen point net.
GeneratorNet train_band_generator(const std::vector<double>& x, const Eigen::VectorXd& y,
                                  const KnotSet& knots, const PenaltyMatrix& penalty,
                                  double lambda_lower, double lambda_upper,
                                  const GeneratorConfig& config, const GeneratorNet& point_net,
                                  std::uint64_t seed);

/// Percentile band from B forward evaluations on perturbed inputs (no refits).
ConfidenceBand band_from_generator(const GeneratorNet& net, const DesignMatrix& design,
                                   const Eigen::VectorXd& y_hat, double sigma_hat, double lambda,
                                   int B, double alpha, std::uint64_t seed, int n_threads = 1);

/// Point prediction y_hat(lambda) = B G(y, lambda) and the residual standard
/// deviation sigma_hat(lambda) = sd(y - y_hat), denominator n-1.
struct GeneratorPointEval {
    Eigen::VectorXd y_hat;
    double sigma_hat = 0.0;
};

GeneratorPointEval generator_point_eval(const GeneratorNet& net, const DesignMatrix& design,
                                        const Eigen::VectorXd& y, double lambda);

/// Approximation metrics of the generator against optimizer solutions.
struct GapReport {
    std::vector<double> lambdas;
    std::vector<double> relative_gap;   // ||B G - B gamma_hat||^2 / ||B gamma_hat||^2
    std::vector<double> fitness_ratio;  // ||y - B G||^2 / ||y - B gamma_hat||^2
    double mean_relative_gap = 0.0;
    double mean_fitness_ratio = 0.0;
};

GapReport gap_report(const GeneratorNet& net, const DesignMatrix& design, const Eigen::VectorXd& y,
                     const std::vector<double>& lambda_grid, const std::vector<SplineFit>& opt_fits);

/// Versioned JSON serialization; weights are base64 of little-endian doubles,
/// so a round-trip reproduces forward outputs bitwise.
std::string generator_to_json(const GeneratorNet& net);
GeneratorNet generator_from_json(const std::string& text);

/// Training loss at one lambda: ||y - B gamma||^2 + lambda gamma' Omega gamma.
double generator_loss(const GeneratorNet& net, const DesignMatrix& design,
                      const PenaltyMatrix& penalty, const Eigen::VectorXd& y, double lambda);

/// Batch loss and analytic parameter gradients of the point-training
/// objective, exposed so gradients can be checked against finite differences.
struct GeneratorGradients {
    double loss = 0.0;
    std::vector<Eigen::MatrixXd> dW;
    std::vector<Eigen::VectorXd> db;
};

GeneratorGradients generator_loss_gradients(const GeneratorNet& net, const DesignMatrix& design,
                                            const PenaltyMatrix& penalty, const Eigen::VectorXd& y,
                                            const std::vector<double>& lambdas);

}  // namespace monospline
