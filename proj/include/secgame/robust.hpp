#pragma once

#include <optional>
#include <vector>

#include "secgame/game.hpp"
#include "secgame/lossmap.hpp"
#include "secgame/model.hpp"

namespace secgame {

// Uncertain model set sharing node structure, B, and D.
struct ModelSet {
    std::vector<StateSpaceModel> models;
    std::vector<double> phi;  // occurrence probabilities, sum to 1
    int nominal_index = 0;

    int size() const { return static_cast<int>(models.size()); }
    const StateSpaceModel& nominal() const { return models[nominal_index]; }
};

// Shared checks: model validity, matching dimensions, common B and D, weights.
void validate_model_set(const ModelSet& set);

// Per-model loss tables, built once and reused across cost pairs.
struct ModelSetTables {
    std::vector<LossTable> per_model;
    LossTable expected;
};

ModelSetTables build_model_set_tables(const ModelSet& set, MaskMode mode,
                                      const SynthOptions& opts = {},
                                      int jobs = 1, int cap = kDefaultNodeCap);

// Attacker's payoff of a fixed strategy pair evaluated under one model's
// loss table; no re-optimization.
double evaluate_strategy(const Action& attack, const Action& defense,
                         const LossTable& model_table);

// Payoff mismatch (%) of applying the nominal model's CBSE to model i,
// relative to model i's own CBSE payoff. Throws DegenerateDenominator when
// model i's own equilibrium payoff is zero.
double nominal_mismatch(const ModelSetTables& tables, const GameConfig& config,
                        int model_index, int nominal_index);

// CBSE of the game whose losses are the expectation over the set.
CbseResult solve_average_game(const ModelSetTables& tables,
                              const GameConfig& config);

double average_mismatch(const ModelSetTables& tables, const GameConfig& config,
                        int model_index);

struct MismatchStats {
    std::vector<double> values;  // percent, one per (model, cost pair)
    int degenerate_count = 0;
    double min = 0.0, max = 0.0, mean = 0.0, median = 0.0;
    double q1 = 0.0, q3 = 0.0;
};

MismatchStats summarize(std::vector<double> values, int degenerate_count);

struct MismatchReport {
    MismatchStats nominal;
    MismatchStats average;
};

// Aggregates both mismatch metrics over models x uniform-cost pairs.
MismatchReport mismatch_statistics(
    const ModelSetTables& tables,
    const std::vector<std::pair<double, double>>& cost_grid,
    const GameConfig& base_config, int nominal_index);

// Performance loss (%) of the nominal model's unstructured optimal gain
// applied to model i, against model i's own optimum.
double controller_mismatch(const ModelSet& set, int model_index,
                           const SynthOptions& opts = {});

}  // namespace secgame
