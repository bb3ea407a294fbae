#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace monospline {

/// Invalid argument supplied by the caller (bad sizes, inverted intervals, ...).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Evaluation point outside the spline domain [xi_0, xi_{K+1}]; no extrapolation.
class OutOfDomainError : public std::domain_error {
public:
    OutOfDomainError(double x, double lo, double hi)
        : std::domain_error("evaluation point " + std::to_string(x) +
                            " outside domain [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]") {}
};

/// Fewer than two distinct abscissae: no usable spline domain.
class DegenerateDomainError : public std::invalid_argument {
public:
    explicit DegenerateDomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Linear system for the normal equations is singular.
class RankDeficiencyError : public std::runtime_error {
public:
    RankDeficiencyError(const std::string& msg, std::vector<int> deficient_columns)
        : std::runtime_error(msg), deficient(std::move(deficient_columns)) {}
    /// Column indices spanning the (numerically) deficient directions.
    std::vector<int> deficient;
};

class FactorizationError : public std::runtime_error {
public:
    explicit FactorizationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Constrained solver did not converge; carries the best iterate found.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& msg, Eigen::VectorXd best, double residual)
        : std::runtime_error(msg), best_gamma(std::move(best)), kkt_residual(residual) {}
    Eigen::VectorXd best_gamma;
    double kkt_residual;
};

/// Loss became non-finite during generator training; carries the last finite state.
class TrainingFailure : public std::runtime_error {
public:
    TrainingFailure(const std::string& msg, long step, double last_finite_loss)
        : std::runtime_error(msg), step(step), last_finite_loss(last_finite_loss) {}
    long step;
    double last_finite_loss;
};

/// Criterion undefined for the given fit (e.g. GCV with df >= n).
class CriterionError : public std::runtime_error {
public:
    explicit CriterionError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace monospline
