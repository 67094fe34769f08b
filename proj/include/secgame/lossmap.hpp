#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "secgame/lincontrol.hpp"
#include "secgame/model.hpp"

namespace secgame {

// Attack-outcome pattern over n nodes. bit k of `index` is node k+1's
// survival flag (node 1 = least significant bit); index 0 is all-attacked.
struct SparsityPattern {
    std::vector<int> bits;
    std::uint32_t index = 0;
};

SparsityPattern pattern_from_index(std::uint32_t index, int n);
std::uint32_t pattern_to_index(const std::vector<int>& bits);

inline constexpr int kDefaultNodeCap = 16;

// Throws CapExceeded when n > cap.
std::vector<SparsityPattern> enumerate_patterns(int n,
                                                int cap = kDefaultNodeCap);

struct LossEntry {
    double J = 0.0;
    double delta = 0.0;
    bool converged = true;
};

// The 2^n-entry H2-performance loss vector for one model (or a model set
// expectation), indexed by pattern index.
struct LossTable {
    std::string model_hash;
    MaskMode mode = MaskMode::FullNode;
    int n = 0;
    double J_opt = 0.0;
    std::vector<LossEntry> entries;

    double delta(std::uint32_t pattern_index) const {
        return entries[pattern_index].delta;
    }
    bool any_nonconverged() const;
};

struct LossResult {
    double J = 0.0;
    double delta = 0.0;
    bool converged = true;
};

LossResult loss_for_pattern(const StateSpaceModel& model,
                            const SparsityPattern& pattern, MaskMode mode,
                            double J_opt, const SynthOptions& opts = {});

// Deterministic hash of everything the table depends on.
std::string model_content_hash(const StateSpaceModel& model, MaskMode mode,
                               const SynthOptions& opts);

LossTable build_loss_table(const StateSpaceModel& model, MaskMode mode,
                           const SynthOptions& opts = {}, int jobs = 1,
                           int cap = kDefaultNodeCap);

// Nodes (1-based) sorted by descending single-node-attack loss; ties broken
// by ascending node index.
std::vector<int> importance_ranking(const LossTable& table);

struct WeightedModel {
    const StateSpaceModel* model = nullptr;
    double phi = 0.0;
};

// Per-pattern expectation over a model set: delta = sum_j phi_j delta_j.
LossTable expected_loss_table(const std::vector<WeightedModel>& models,
                              MaskMode mode, const SynthOptions& opts = {},
                              int jobs = 1, int cap = kDefaultNodeCap);

LossTable expected_loss_table(const std::vector<LossTable>& tables,
                              const std::vector<double>& phi);

}  // namespace secgame
