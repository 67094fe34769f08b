#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "secgame/lossmap.hpp"
#include "secgame/model.hpp"
#include "secgame/robust.hpp"

namespace secgame {

struct LoadOptions {
    // Widens the Hurwitz threshold to -1e-6 for models sitting near the axis.
    bool allow_marginal = false;
};

// JSON model manifest. Matrices are row-major arrays; numbers may be stored
// as full-precision decimal strings. Q may be "consensus" and R "identity".
StateSpaceModel load_model(const std::filesystem::path& path,
                           const LoadOptions& opts = {});

void save_model(const StateSpaceModel& model, const std::filesystem::path& path,
                const std::string& ordering = "grouped");

// Manifest: {models:[paths...], phi:[...]|"uniform", nominal_index}.
// Relative model paths resolve against the manifest's directory.
ModelSet load_model_set(const std::filesystem::path& path,
                        const LoadOptions& opts = {});

// Consensus state weight diag(L_bar, I_n, I_{m-2n}) with
// L_bar = n I_n - 1 1^T, under the angles-first state ordering.
Eigen::MatrixXd build_consensus_Q(const NodePartition& partition);

// Permutation g where reordered state k corresponds to grouped state g(k)
// (grouped = per-node [angle, frequency, rest] blocks).
std::vector<int> consensus_reorder_permutation(const NodePartition& partition);

void save_loss_table(const LossTable& table, const std::filesystem::path& path);

// Verifies the stored hash against expected_hash when provided.
LossTable load_loss_table(
    const std::filesystem::path& path,
    const std::optional<std::string>& expected_hash = std::nullopt);

}  // namespace secgame
