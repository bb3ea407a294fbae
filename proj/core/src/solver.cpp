#include "monospline/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include <json.hpp>

#include "monospline/rng.hpp"

namespace monospline {

namespace {

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& S, const Eigen::VectorXd& rhs,
                          const char* context) {
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) {
        // recover the (numerically) deficient directions for the error message
        Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
        lu.setThreshold(1e-12);
        std::vector<int> deficient;
        Eigen::MatrixXd kernel = lu.kernel();
        for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
            Eigen::Index idx;
            kernel.col(c).cwiseAbs().maxCoeff(&idx);
            deficient.push_back(static_cast<int>(idx));
        }
        std::ostringstream msg;
        msg << context << ": system of size " << S.rows() << " is singular (rank "
            << lu.rank() << "), deficient around columns";
        for (int d : deficient) msg << ' ' << d;
        throw RankDeficiencyError(msg.str(), deficient);
    }
    Eigen::VectorXd x = llt.solve(rhs);
    x += llt.solve(rhs - S * x);  // one refinement step
    double denom = rhs.norm() + S.norm() * x.norm();
    if (denom > 0.0 && (S * x - rhs).norm() > 1e-8 * denom) {
        std::ostringstream msg;
        msg << context << ": normal equations too ill-conditioned to solve reliably";
        throw RankDeficiencyError(msg.str(), {});
    }
    return x;
}

struct BlockView {
    std::vector<int> start;  // block start indices, ascending
    std::vector<int> size;
    int J = 0;

    int num_blocks() const { return static_cast<int>(start.size()); }
};

BlockView blocks_from_active(const std::vector<char>& active, int J) {
    BlockView bv;
    bv.J = J;
    int s = 0;
    for (int j = 0; j < J; ++j) {
        bool tied_next = j < J - 1 && active[static_cast<std::size_t>(j)];
        if (!tied_next) {
            bv.start.push_back(s);
            bv.size.push_back(j - s + 1);
            s = j + 1;
        }
    }
    return bv;
}

BlockView blocks_from_pattern(const std::vector<std::vector<int>>& blocks, int J) {
    BlockView bv;
    bv.J = J;
    int expect = 0;
    for (const auto& blk : blocks) {
        if (blk.empty()) throw ArgumentError("tie pattern blocks must be nonempty");
        if (blk.front() != expect)
            throw ArgumentError("tie pattern must partition 0..J-1 contiguously in order");
        for (std::size_t k = 1; k < blk.size(); ++k)
            if (blk[k] != blk[k - 1] + 1)
                throw ArgumentError("tie pattern blocks must be contiguous index runs");
        bv.start.push_back(blk.front());
        bv.size.push_back(static_cast<int>(blk.size()));
        expect = blk.back() + 1;
    }
    if (expect != J) throw ArgumentError("tie pattern must cover all J coefficients");
    return bv;
}

/// gamma for the equality-constrained subproblem of a block structure
Eigen::VectorXd block_solve(const Eigen::MatrixXd& S, const Eigen::VectorXd& b,
                            const BlockView& bv) {
    const int g = bv.num_blocks();
    Eigen::MatrixXd M(g, g);
    Eigen::VectorXd rhs(g);
    for (int a = 0; a < g; ++a) {
        rhs[a] = b.segment(bv.start[static_cast<std::size_t>(a)], bv.size[static_cast<std::size_t>(a)]).sum();
        for (int c = 0; c < g; ++c)
            M(a, c) = S.block(bv.start[static_cast<std::size_t>(a)], bv.start[static_cast<std::size_t>(c)],
                              bv.size[static_cast<std::size_t>(a)], bv.size[static_cast<std::size_t>(c)]).sum();
    }
    Eigen::VectorXd beta = solve_spd(M, rhs, "tie-pattern subproblem");
    Eigen::VectorXd gamma(bv.J);
    for (int a = 0; a < g; ++a)
        gamma.segment(bv.start[static_cast<std::size_t>(a)], bv.size[static_cast<std::size_t>(a)]).setConstant(beta[a]);
    return gamma;
}

double reduced_stationarity(const Eigen::MatrixXd& S, const Eigen::VectorXd& b,
                            const Eigen::VectorXd& gamma, const BlockView& bv) {
    Eigen::VectorXd grad = S * gamma - b;
    double worst = 0.0;
    for (int a = 0; a < bv.num_blocks(); ++a)
        worst = std::max(worst, std::abs(grad.segment(bv.start[static_cast<std::size_t>(a)],
                                                      bv.size[static_cast<std::size_t>(a)]).sum()));
    return worst;
}

double sd_with_bessel(const Eigen::VectorXd& r) {
    if (r.size() < 2) return 0.0;
    double mean = r.mean();
    double ss = (r.array() - mean).square().sum();
    return std::sqrt(ss / static_cast<double>(r.size() - 1));
}

void finalize_fit(SplineFit& fit, const DesignMatrix& design, const Eigen::VectorXd& y) {
    fit.fitted = design.values * fit.gamma;
    fit.residual_sd = sd_with_bessel(y - fit.fitted);
    fit.tie_pattern = detect_ties(fit.gamma);
    fit.df = static_cast<int>(fit.tie_pattern.size());
}

}  // namespace

TieMatrix tie_matrix(const std::vector<std::vector<int>>& blocks, int J) {
    BlockView bv = blocks_from_pattern(blocks, J);
    TieMatrix tm;
    tm.G = Eigen::MatrixXd::Zero(bv.num_blocks(), J);
    for (int a = 0; a < bv.num_blocks(); ++a)
        for (int k = 0; k < bv.size[static_cast<std::size_t>(a)]; ++k)
            tm.G(a, bv.start[static_cast<std::size_t>(a)] + k) = 1.0;
    return tm;
}

std::vector<std::vector<int>> detect_ties(const Eigen::VectorXd& gamma) {
    const int J = static_cast<int>(gamma.size());
    double tol = 1e-9 * (gamma.maxCoeff() - gamma.minCoeff());
    std::vector<std::vector<int>> blocks;
    blocks.push_back({0});
    for (int j = 1; j < J; ++j) {
        if (std::abs(gamma[j] - gamma[j - 1]) <= tol)
            blocks.back().push_back(j);
        else
            blocks.push_back({j});
    }
    return blocks;
}

SplineFit fit_unconstrained(const DesignMatrix& design, const PenaltyMatrix& penalty,
                            const Eigen::VectorXd& y, double lambda) {
    const Eigen::Index n = design.rows();
    const Eigen::Index J = design.cols();
    if (y.size() != n) throw ArgumentError("y length must match the design rows");
    if (lambda < 0.0) throw ArgumentError("lambda must be nonnegative");
    if (penalty.size() != J) throw ArgumentError("penalty size must match the basis size");
    if (lambda == 0.0 && n < J)
        throw RankDeficiencyError("unpenalized fit needs n >= J data points", {});

    // QR on the stacked system [B; sqrt(lambda) L^T]: stable even when the
    // penalty dwarfs the data term
    const Eigen::Index r = lambda > 0.0 ? penalty.factor.cols() : 0;
    Eigen::MatrixXd stacked(n + r, J);
    stacked.topRows(n) = design.values;
    if (r > 0) stacked.bottomRows(r) = std::sqrt(lambda) * penalty.factor.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + r);
    rhs.head(n) = y;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stacked);
    if (qr.rank() < J) {
        std::vector<int> deficient;
        Eigen::VectorXi pivots = qr.colsPermutation().indices();
        for (Eigen::Index k = qr.rank(); k < J; ++k) deficient.push_back(pivots[k]);
        std::ostringstream msg;
        msg << "unconstrained fit: design plus penalty is rank deficient (rank " << qr.rank()
            << " of " << J << "), deficient columns";
        for (int d : deficient) msg << ' ' << d;
        throw RankDeficiencyError(msg.str(), deficient);
    }

    SplineFit fit;
    fit.gamma = qr.solve(rhs);
    fit.lambda = lambda;
    fit.direction = +1;
    fit.fitted = design.values * fit.gamma;
    fit.residual_sd = sd_with_bessel(y - fit.fitted);
    // by definition all coefficients count: df = J
    fit.tie_pattern.clear();
    for (int j = 0; j < J; ++j) fit.tie_pattern.push_back({j});
    fit.df = static_cast<int>(J);
    fit.kkt_residual = (stacked.transpose() * (stacked * fit.gamma - rhs)).cwiseAbs().maxCoeff();
    return fit;
}

Eigen::VectorXd solve_tie_pattern(const DesignMatrix& design, const PenaltyMatrix& penalty,
                                  const Eigen::VectorXd& y, double lambda,
                                  const std::vector<std::vector<int>>& blocks) {
    Eigen::MatrixXd S = design.values.transpose() * design.values + lambda * penalty.omega;
    Eigen::VectorXd b = design.values.transpose() * y;
    return block_solve(S, b, blocks_from_pattern(blocks, static_cast<int>(design.cols())));
}

SplineFit fit_monotone(const DesignMatrix& design, const PenaltyMatrix& penalty,
                       const Eigen::VectorXd& y, double lambda, int direction) {
    const Eigen::Index n = design.rows();
    const int J = static_cast<int>(design.cols());
    if (direction != +1 && direction != -1) throw ArgumentError("direction must be +1 or -1");
    if (y.size() != n) throw ArgumentError("y length must match the design rows");
    if (lambda < 0.0) throw ArgumentError("lambda must be nonnegative");
    if (lambda == 0.0 && n < J)
        throw RankDeficiencyError("unpenalized fit needs n >= J data points", {});

    if (direction == -1) {
        // nonincreasing fit == negated nondecreasing fit of -y
        SplineFit fit = fit_monotone(design, penalty, -y, lambda, +1);
        fit.gamma = -fit.gamma;
        fit.direction = -1;
        fit.lambda = lambda;
        finalize_fit(fit, design, y);
        return fit;
    }

    Eigen::MatrixXd S = design.values.transpose() * design.values + lambda * penalty.omega;
    Eigen::VectorXd b = design.values.transpose() * y;
    const double dual_scale = std::max(1.0, b.cwiseAbs().maxCoeff());

    // start from the fully tied feasible point
    std::vector<char> active(static_cast<std::size_t>(J - 1), 1);
    BlockView bv = blocks_from_active(active, J);
    Eigen::VectorXd gamma = block_solve(S, b, bv);

    const int max_iter = 50 * J + 200;
    for (int iter = 0; iter < max_iter; ++iter) {
        bv = blocks_from_active(active, J);
        Eigen::VectorXd cand = block_solve(S, b, bv);

        double cscale = std::max(cand.maxCoeff() - cand.minCoeff(), 1e-30);
        double feas_eps = 1e-11 * cscale;
        int worst_block = -1;
        double alpha = 1.0;
        for (int j = 0; j < J - 1; ++j) {
            if (active[static_cast<std::size_t>(j)]) continue;
            double c1 = cand[j] - cand[j + 1];
            if (c1 <= feas_eps) continue;
            double c0 = gamma[j] - gamma[j + 1];
            double a = c0 / (c0 - c1);
            if (a < alpha - 1e-12) {
                alpha = a;
                worst_block = j;
            } else if (worst_block < 0 && a <= alpha) {
                worst_block = j;
            }
        }

        if (worst_block < 0) {
            // candidate feasible: check duals on active constraints
            gamma = cand;
            Eigen::VectorXd r = 2.0 * (b - S * gamma);
            int drop = -1;
            double acc = 0.0;
            for (int j = 0; j < J - 1; ++j) {
                acc += r[j];
                if (active[static_cast<std::size_t>(j)] && acc < -1e-8 * dual_scale) {
                    drop = j;  // Bland: smallest index
                    break;
                }
            }
            if (drop < 0) {
                SplineFit fit;
                fit.gamma = gamma;
                fit.lambda = lambda;
                fit.direction = +1;
                fit.kkt_residual = reduced_stationarity(S, b, gamma, bv);
                finalize_fit(fit, design, y);
                return fit;
            }
            active[static_cast<std::size_t>(drop)] = 0;
        } else {
            // blocked: step to the first violated constraint and tie it
            alpha = std::min(std::max(alpha, 0.0), 1.0);
            gamma += alpha * (cand - gamma);
            active[static_cast<std::size_t>(worst_block)] = 1;
        }
    }

    throw SolverFailure("active-set iteration cap reached", gamma,
                        reduced_stationarity(S, b, gamma, blocks_from_active(active, J)));
}

Eigen::VectorXd pava(const Eigen::VectorXd& y, const Eigen::VectorXd& weights) {
    const Eigen::Index m = y.size();
    if (weights.size() != m) throw ArgumentError("weights length must match y");
    if ((weights.array() <= 0.0).any()) throw ArgumentError("weights must be positive");

    std::vector<double> value;
    std::vector<double> weight;
    std::vector<Eigen::Index> count;
    value.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        value.push_back(y[i]);
        weight.push_back(weights[i]);
        count.push_back(1);
        while (value.size() > 1 && value[value.size() - 2] > value.back()) {
            double w = weight[weight.size() - 2] + weight.back();
            double v = (weight[weight.size() - 2] * value[value.size() - 2] +
                        weight.back() * value.back()) / w;
            value.pop_back(); weight.pop_back();
            Eigen::Index c = count.back(); count.pop_back();
            value.back() = v;
            weight.back() = w;
            count.back() += c;
        }
    }
    Eigen::VectorXd out(m);
    Eigen::Index pos = 0;
    for (std::size_t k = 0; k < value.size(); ++k)
        for (Eigen::Index c = 0; c < count[k]; ++c) out[pos++] = value[k];
    return out;
}

double ConeProblem::objective(const Eigen::VectorXd& gamma) const {
    double fit = (y - B * gamma).squaredNorm();
    double pen = lambda * (L.transpose() * gamma).squaredNorm();
    return fit + pen;
}

ConeProblem socp_rewrite(const DesignMatrix& design, const PenaltyMatrix& penalty,
                         const Eigen::VectorXd& y, double lambda) {
    ConeProblem cp;
    cp.n = static_cast<int>(design.rows());
    cp.J = static_cast<int>(design.cols());
    cp.lambda = lambda;
    cp.A = Eigen::MatrixXd::Zero(cp.J - 1, cp.J);
    for (int j = 0; j < cp.J - 1; ++j) {
        cp.A(j, j) = 1.0;
        cp.A(j, j + 1) = -1.0;
    }
    cp.L = lambda == 0.0 ? Eigen::MatrixXd::Zero(cp.J, 0) : penalty.factor;
    cp.B = design.values;
    cp.y = y;
    return cp;
}

std::string cone_problem_to_json(const ConeProblem& cp) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["kind"] = "cone_problem";
    j["n"] = cp.n;
    j["J"] = cp.J;
    j["lambda"] = cp.lambda;
    auto dump = [](const Eigen::MatrixXd& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    j["A"] = dump(cp.A);
    j["L"] = dump(cp.L);
    j["B"] = dump(cp.B);
    j["y"] = std::vector<double>(cp.y.data(), cp.y.data() + cp.y.size());
    return j.dump(2);
}

MseCrossoverReport mse_crossover_probe(const Eigen::VectorXd& truth, const DesignMatrix& design,
                                       const PenaltyMatrix& penalty, double sigma, int reps,
                                       std::uint64_t seed) {
    const Eigen::Index n = design.rows();
    const int J = static_cast<int>(design.cols());
    if (truth.size() != n) throw ArgumentError("truth length must match the design rows");
    if (reps < 1) throw ArgumentError("need at least one repetition");

    Rng root(seed);
    double sum_mono = 0.0, sum_ls = 0.0;
    int wins = 0;
    std::map<std::string, int> pattern_count;
    std::map<std::string, std::vector<std::vector<int>>> pattern_blocks;

    for (int r = 0; r < reps; ++r) {
        Rng stream = root.substream(static_cast<std::uint64_t>(r));
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) y[i] = truth[i] + sigma * stream.normal();
        SplineFit mono = fit_monotone(design, penalty, y, 0.0);
        SplineFit ls = fit_unconstrained(design, penalty, y, 0.0);
        double e_mono = (mono.fitted - truth).squaredNorm();
        double e_ls = (ls.fitted - truth).squaredNorm();
        sum_mono += e_mono;
        sum_ls += e_ls;
        if (e_mono < e_ls) ++wins;

        std::ostringstream key;
        for (const auto& blk : mono.tie_pattern) key << blk.size() << ',';
        pattern_count[key.str()]++;
        pattern_blocks.emplace(key.str(), mono.tie_pattern);
    }

    std::string modal;
    int best = -1;
    for (const auto& [key, cnt] : pattern_count)
        if (cnt > best) { best = cnt; modal = key; }

    const std::vector<std::vector<int>>& blocks = pattern_blocks.at(modal);
    const int g = static_cast<int>(blocks.size());
    Eigen::MatrixXd G = tie_matrix(blocks, J).G;
    Eigen::MatrixXd BtB = design.values.transpose() * design.values;
    Eigen::MatrixXd H = design.values * BtB.ldlt().solve(design.values.transpose());
    Eigen::MatrixXd BG = design.values * G.transpose();
    Eigen::MatrixXd Hg = BG * (G * BtB * G.transpose()).ldlt().solve(BG.transpose());

    MseCrossoverReport rep;
    rep.mse_monotone = sum_mono / reps;
    rep.mse_ls = sum_ls / reps;
    rep.win_fraction = static_cast<double>(wins) / reps;
    rep.modal_df = g;
    double quad = truth.dot((H - Hg) * truth);
    rep.threshold = g < J ? quad / static_cast<double>(J - g) : 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (H - Hg + (H - Hg).transpose()));
    rep.projection_gap_min_eig = eig.eigenvalues().minCoeff();
    rep.monotone_better = rep.mse_monotone < rep.mse_ls;
    return rep;
}

}  // namespace monospline
