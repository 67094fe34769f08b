#pragma once

#include <cstdint>
#include <vector>

#include "secgame/lossmap.hpp"

namespace secgame {

// Per-node investment levels on the {0, 1/L, ..., 1} grid.
struct Action {
    std::vector<double> levels;
    double cost = 0.0;
};

struct GameConfig {
    int n = 0;
    int level_count_attacker = 3;  // L_a
    int level_count_defender = 3;  // L_d
    std::vector<double> gamma_a;   // scaled cost per node, full effort
    std::vector<double> gamma_d;
    double payoff_tie_tol = 1e-8;
    double cost_tie_tol = 1e-12;
    std::uint64_t action_cap = 1u << 24;
    int jobs = 1;
};

inline constexpr double kBudgetSlack = 1e-12;

// Budget-feasible level vectors in lexicographic order (node 1 varies
// slowest); prefixes over budget are pruned.
std::vector<Action> enumerate_actions(int n, int levels,
                                      const std::vector<double>& gamma,
                                      std::uint64_t cap = 1u << 24);

// P_k = a_k (1 - d_k).
double prob_success(double attack_level, double defense_level);

double pattern_prob(const Action& attack, const Action& defense,
                    const SparsityPattern& pattern);

// Expected H2 loss: sum over all 2^n patterns of occurrence probability
// times the pattern's loss.
double payoff_attacker(const Action& attack, const Action& defense,
                       const LossTable& table);

struct BestResponse {
    double max_payoff = 0.0;
    std::vector<std::size_t> responses;  // indices into the attacker's action list
};

BestResponse best_response_set(const Action& defense,
                               const std::vector<Action>& attacker_actions,
                               const LossTable& table, double tol);

// Among payoff-tied responses, minimum cost; remaining ties go to the first
// action in enumeration (lexicographic) order.
std::size_t min_cost_response(const std::vector<std::size_t>& responses,
                              const std::vector<Action>& attacker_actions,
                              double cost_tie_tol);

struct CbseResult {
    Action attacker_strategy;
    Action defender_strategy;
    double attacker_payoff = 0.0;
    double defender_payoff = 0.0;
    double attacker_cost = 0.0;
    double defender_cost = 0.0;
    int num_attacker_ties = 0;
    int num_defender_ties = 0;
    bool used_nonconverged_losses = false;
};

// Cost-based backward induction: per-defender-action cheapest attacker best
// response, then the defender's payoff-maximizing, cost-minimizing choice.
CbseResult solve_cbbi(const GameConfig& config, const LossTable& table);

struct BruteForceResult {
    double se_payoff = 0.0;
    std::vector<std::pair<Action, Action>> se_pairs;  // (attacker, defender)
};

// Exhaustive Stackelberg oracle without cost-based selection.
BruteForceResult brute_force_se(const GameConfig& config,
                                const LossTable& table,
                                std::uint64_t pair_cap = 10'000'000);

struct IoResult {
    Action attacker_strategy;
    Action defender_strategy;
    double realized_payoff = 0.0;
};

// Each player optimizes against an inactive opponent; the defender assumes
// the attacker's own no-defense profile.
IoResult individual_optimization(const GameConfig& config,
                                 const LossTable& table);

}  // namespace secgame
