#include "secgame/lincontrol.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "secgame/errors.hpp"

namespace secgame {

const char* to_string(MaskMode mode) {
    return mode == MaskMode::FullNode ? "full_node" : "inter_node_only";
}

MaskMode mask_mode_from_string(const std::string& s) {
    if (s == "full_node") return MaskMode::FullNode;
    if (s == "inter_node_only") return MaskMode::InterNodeOnly;
    throw ParseError("unknown mask mode: " + s);
}

bool is_hurwitz(const Eigen::MatrixXd& M, double margin) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    return es.eigenvalues().real().maxCoeff() < -margin;
}

namespace {
constexpr double kHurwitzMargin = 1e-9;
constexpr double kResidualTol = 1e-8;
}  // namespace

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& Acl,
                               const Eigen::MatrixXd& Rhs) {
    const Eigen::Index m = Acl.rows();
    if (Acl.cols() != m || Rhs.rows() != m || Rhs.cols() != m)
        throw ValidationError("solve_lyapunov: dimension mismatch");

    Eigen::ComplexSchur<Eigen::MatrixXd> schur(Acl);
    if (schur.info() != Eigen::Success)
        throw IllConditionedError("solve_lyapunov: Schur decomposition failed");
    const Eigen::MatrixXcd& T = schur.matrixT();
    const Eigen::MatrixXcd& U = schur.matrixU();

    if (T.diagonal().real().maxCoeff() >= -kHurwitzMargin) {
        std::ostringstream oss;
        oss << "solve_lyapunov: matrix not Hurwitz (max Re eig = "
            << T.diagonal().real().maxCoeff() << ")";
        throw NotHurwitzError(oss.str());
    }

    // Acl' P + P Acl = -Rhs reduces to T^H Y + Y T = C with Y = U^H P U.
    const Eigen::MatrixXcd C = -U.adjoint() * Rhs * U;
    Eigen::MatrixXcd Y(m, m);
    const Eigen::MatrixXcd Th = T.adjoint();  // lower triangular
    for (Eigen::Index k = 0; k < m; ++k) {
        Eigen::VectorXcd rhs = C.col(k);
        if (k > 0) rhs.noalias() -= Y.leftCols(k) * T.block(0, k, k, 1);
        Eigen::MatrixXcd Lk = Th;
        Lk.diagonal().array() += T(k, k);
        Y.col(k) = Lk.triangularView<Eigen::Lower>().solve(rhs);
    }

    Eigen::MatrixXd P = (U * Y * U.adjoint()).real();
    P = 0.5 * (P + P.transpose()).eval();

    const double scale = std::max(1.0, Rhs.norm());
    const double residual = (Acl.transpose() * P + P * Acl + Rhs).norm();
    if (!(residual <= kResidualTol * scale)) {
        std::ostringstream oss;
        oss << "solve_lyapunov: residual " << residual << " exceeds tolerance";
        throw IllConditionedError(oss.str());
    }
    return P;
}

double h2_cost(const StateSpaceModel& model, const Eigen::MatrixXd& K) {
    const Eigen::MatrixXd Acl = model.A - model.B * K;
    const Eigen::MatrixXd P =
        solve_lyapunov(Acl, model.Q + K.transpose() * model.R * K);
    return (model.D.transpose() * P * model.D).trace();
}

Eigen::MatrixXd h2_gradient(const StateSpaceModel& model,
                            const Eigen::MatrixXd& K) {
    const Eigen::MatrixXd Acl = model.A - model.B * K;
    const Eigen::MatrixXd P =
        solve_lyapunov(Acl, model.Q + K.transpose() * model.R * K);
    const Eigen::MatrixXd L =
        solve_lyapunov(Acl.transpose(), model.D * model.D.transpose());
    return 2.0 * (model.R * K - model.B.transpose() * P) * L;
}

GainMask build_mask(const std::vector<int>& pattern,
                    const NodePartition& partition, MaskMode mode) {
    const int n = static_cast<int>(partition.size());
    if (static_cast<int>(pattern.size()) != n)
        throw ValidationError("build_mask: pattern length != node count");

    int m = 0, r = 0;
    for (const auto& blk : partition) {
        m += blk.num_states;
        r += blk.num_inputs;
    }
    GainMask mask = GainMask::Ones(r, m);

    int soff = 0, ioff = 0;
    std::vector<int> state_off(n), input_off(n);
    for (int k = 0; k < n; ++k) {
        state_off[k] = soff;
        input_off[k] = ioff;
        soff += partition[k].num_states;
        ioff += partition[k].num_inputs;
    }

    for (int k = 0; k < n; ++k) {
        if (pattern[k] != 0) continue;
        // Node k fell: zero its block row and block column of K.
        mask.block(input_off[k], 0, partition[k].num_inputs, m).setZero();
        mask.block(0, state_off[k], r, partition[k].num_states).setZero();
        if (mode == MaskMode::InterNodeOnly) {
            // Self-feedback block stays.
            mask.block(input_off[k], state_off[k], partition[k].num_inputs,
                       partition[k].num_states)
                .setOnes();
        }
    }
    return mask;
}

namespace {

Eigen::MatrixXd apply_mask(const Eigen::MatrixXd& M, const GainMask& mask) {
    return M.cwiseProduct(mask.cast<double>());
}

}  // namespace

SynthesisReport synth_structured(const StateSpaceModel& model,
                                 const GainMask& mask,
                                 const SynthOptions& opts) {
    const int m = model.num_states();
    const int r = model.num_inputs();
    if (mask.rows() != r || mask.cols() != m)
        throw ValidationError("synth_structured: mask dimension mismatch");

    if (!is_hurwitz(model.A, kHurwitzMargin))
        throw NoStabilizingStartError(
            "synth_structured: zero initial gain is not stabilizing");

    SynthesisReport report;
    report.K = Eigen::MatrixXd::Zero(r, m);
    report.J = h2_cost(model, report.K);

    if ((mask.array() == 0).all()) {
        // Empty support: the open-loop gain is the only feasible point.
        report.converged = true;
        return report;
    }

    const double tol = opts.grad_tol * (1.0 + std::abs(report.J));

    Eigen::MatrixXd K = report.K;
    double J = report.J;
    Eigen::MatrixXd grad = apply_mask(h2_gradient(model, K), mask);
    double gnorm = grad.cwiseAbs().maxCoeff();

    Eigen::MatrixXd K_prev, g_prev;
    double step = 1.0 / std::max(1.0, gnorm);
    int iter = 0;
    for (; iter < opts.max_iter && gnorm > tol; ++iter) {
        // Barzilai-Borwein trial step after the first iteration.
        if (iter > 0) {
            const Eigen::MatrixXd dK = K - K_prev;
            const Eigen::MatrixXd dG = grad - g_prev;
            const double sy = (dK.array() * dG.array()).sum();
            if (sy > 0) {
                const double ss = dK.squaredNorm();
                step = std::min(ss / sy, 1e6);
            }
        }

        const double g2 = grad.squaredNorm();
        double t = step;
        bool stepped = false;
        while (t >= opts.min_step) {
            const Eigen::MatrixXd K_try = K - t * grad;
            if (is_hurwitz(model.A - model.B * K_try, kHurwitzMargin)) {
                const double J_try = h2_cost(model, K_try);
                if (J_try <= J - opts.armijo_c * t * g2) {
                    K_prev = K;
                    g_prev = grad;
                    K = K_try;
                    J = J_try;
                    stepped = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!stepped) break;  // line search stalled; report best found

        grad = apply_mask(h2_gradient(model, K), mask);
        gnorm = grad.cwiseAbs().maxCoeff();
    }

    report.K = apply_mask(K, mask);  // exact zeros off support
    report.J = J;
    report.iterations = iter;
    report.final_gradient_norm = gnorm;
    report.converged = gnorm <= tol;
    return report;
}

SynthesisReport synth_unstructured(const StateSpaceModel& model,
                                   const SynthOptions& opts) {
    const GainMask mask =
        GainMask::Ones(model.num_inputs(), model.num_states());
    return synth_structured(model, mask, opts);
}

}  // namespace secgame
