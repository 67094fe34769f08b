#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "secgame/model.hpp"

namespace secgame {

// Which links are removed when a node falls: the whole block row/column of K,
// or only the inter-node blocks (self-feedback kept).
enum class MaskMode : std::uint8_t { FullNode, InterNodeOnly };

const char* to_string(MaskMode mode);
MaskMode mask_mode_from_string(const std::string& s);

// Binary support for the feedback gain; 1 = entry may be nonzero.
using GainMask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

struct SynthOptions {
    double grad_tol = 1e-7;    // scaled by (1 + |J0|)
    int max_iter = 5000;
    double armijo_c = 1e-4;
    double min_step = 1e-16;
};

struct SynthesisReport {
    Eigen::MatrixXd K;
    double J = 0.0;
    int iterations = 0;
    double final_gradient_norm = 0.0;  // projected, inf-norm
    bool converged = false;
};

bool is_hurwitz(const Eigen::MatrixXd& M, double margin = 1e-9);

// Solves Acl' P + P Acl + Rhs = 0 by complex Schur reduction. P is
// symmetrized before return. Throws NotHurwitz / IllConditioned.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& Acl,
                               const Eigen::MatrixXd& Rhs);

// J(K) = trace(D' P D) with Acl = A - B K and Rhs = Q + K' R K.
double h2_cost(const StateSpaceModel& model, const Eigen::MatrixXd& K);

// grad J = 2 (R K - B' P) L, with L the controllability Gramian of (Acl, D).
Eigen::MatrixXd h2_gradient(const StateSpaceModel& model,
                            const Eigen::MatrixXd& K);

// Node-pattern sparsity mask for K. pattern[k] = 0 marks node k+1 as fallen.
GainMask build_mask(const std::vector<int>& pattern,
                    const NodePartition& partition, MaskMode mode);

// Projected gradient descent over the mask support, Armijo backtracking with
// a Barzilai-Borwein trial step, started from K = 0.
SynthesisReport synth_structured(const StateSpaceModel& model,
                                 const GainMask& mask,
                                 const SynthOptions& opts = {});

// Unstructured H2 optimum: structured synthesis with an all-ones mask.
SynthesisReport synth_unstructured(const StateSpaceModel& model,
                                   const SynthOptions& opts = {});

}  // namespace secgame
