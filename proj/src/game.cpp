#include "secgame/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "secgame/errors.hpp"
#include "secgame/parallel.hpp"

namespace secgame {

namespace {

double action_cost(const std::vector<double>& levels,
                   const std::vector<double>& gamma) {
    double c = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) c += gamma[i] * levels[i];
    return c;
}

// Payoff ties use a relative tolerance with an absolute floor.
bool payoff_tied(double value, double best, double tol) {
    return value >= best - (tol * std::abs(best) + 1e-12);
}

}  // namespace

std::vector<Action> enumerate_actions(int n, int levels,
                                      const std::vector<double>& gamma,
                                      std::uint64_t cap) {
    if (n < 1 || levels < 1)
        throw ValidationError("enumerate_actions: n and L must be >= 1");
    if (static_cast<int>(gamma.size()) != n)
        throw ValidationError("enumerate_actions: cost vector length != n");
    for (double g : gamma)
        if (!(g > 0)) throw ValidationError("enumerate_actions: costs must be positive");

    std::vector<Action> actions;
    std::vector<double> current(n, 0.0);

    // DFS in level order per node; node 1 varies slowest, so emission order
    // is lexicographic over level vectors.
    auto recurse = [&](auto&& self, int node, double cost_so_far) -> void {
        if (node == n) {
            if (actions.size() >= cap) {
                std::ostringstream oss;
                oss << "enumerate_actions: feasible set exceeds cap " << cap;
                throw CapExceededError(oss.str());
            }
            actions.push_back(Action{current, cost_so_far});
            return;
        }
        for (int lvl = 0; lvl <= levels; ++lvl) {
            const double level = static_cast<double>(lvl) / levels;
            const double cost = cost_so_far + gamma[node] * level;
            if (cost > 1.0 + kBudgetSlack) break;  // higher levels only cost more
            current[node] = level;
            self(self, node + 1, cost);
        }
        current[node] = 0.0;
    };
    recurse(recurse, 0, 0.0);
    return actions;
}

double prob_success(double attack_level, double defense_level) {
    return attack_level * (1.0 - defense_level);
}

double pattern_prob(const Action& attack, const Action& defense,
                    const SparsityPattern& pattern) {
    double p = 1.0;
    for (std::size_t k = 0; k < pattern.bits.size(); ++k) {
        const double pk = prob_success(attack.levels[k], defense.levels[k]);
        p *= pattern.bits[k] ? (1.0 - pk) : pk;
    }
    return p;
}

double payoff_attacker(const Action& attack, const Action& defense,
                       const LossTable& table) {
    const int n = table.n;
    const std::uint32_t count = 1u << n;
    std::vector<double> pk(n);
    for (int k = 0; k < n; ++k)
        pk[k] = prob_success(attack.levels[k], defense.levels[k]);

    double payoff = 0.0;
    for (std::uint32_t idx = 0; idx < count; ++idx) {
        const double delta = table.entries[idx].delta;
        if (delta == 0.0) continue;
        double p = 1.0;
        for (int k = 0; k < n; ++k)
            p *= ((idx >> k) & 1u) ? (1.0 - pk[k]) : pk[k];
        payoff += p * delta;
    }
    return payoff;
}

BestResponse best_response_set(const Action& defense,
                               const std::vector<Action>& attacker_actions,
                               const LossTable& table, double tol) {
    if (attacker_actions.empty())
        throw ValidationError("best_response_set: empty action set");

    std::vector<double> payoffs(attacker_actions.size());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < attacker_actions.size(); ++i) {
        payoffs[i] = payoff_attacker(attacker_actions[i], defense, table);
        best = std::max(best, payoffs[i]);
    }

    BestResponse out;
    out.max_payoff = best;
    for (std::size_t i = 0; i < attacker_actions.size(); ++i)
        if (payoff_tied(payoffs[i], best, tol)) out.responses.push_back(i);
    return out;
}

std::size_t min_cost_response(const std::vector<std::size_t>& responses,
                              const std::vector<Action>& attacker_actions,
                              double cost_tie_tol) {
    if (responses.empty())
        throw ValidationError("min_cost_response: empty response set");
    std::size_t best = responses.front();
    for (std::size_t idx : responses) {
        // Strictly cheaper wins; within tolerance the earlier (lexicographically
        // smaller) action is kept.
        if (attacker_actions[idx].cost < attacker_actions[best].cost - cost_tie_tol &&
            idx != best)
            best = idx;
    }
    return best;
}

namespace {

struct DefenderOutcome {
    double attacker_payoff = 0.0;  // at the cheapest best response
    std::size_t response = 0;
    int num_ties = 0;
};

DefenderOutcome evaluate_defense(const Action& defense,
                                 const std::vector<Action>& attacker_actions,
                                 const LossTable& table,
                                 const GameConfig& config) {
    const BestResponse br =
        best_response_set(defense, attacker_actions, table, config.payoff_tie_tol);
    DefenderOutcome out;
    out.response =
        min_cost_response(br.responses, attacker_actions, config.cost_tie_tol);
    out.attacker_payoff =
        payoff_attacker(attacker_actions[out.response], defense, table);
    out.num_ties = static_cast<int>(br.responses.size());
    return out;
}

bool pattern_uses_nonconverged(const Action& a, const Action& d,
                               const LossTable& table) {
    const std::uint32_t count = 1u << table.n;
    for (std::uint32_t idx = 0; idx < count; ++idx) {
        if (table.entries[idx].converged) continue;
        SparsityPattern p = pattern_from_index(idx, table.n);
        if (pattern_prob(a, d, p) > 0.0) return true;
    }
    return false;
}

void check_config(const GameConfig& config, const LossTable& table) {
    if (config.n != table.n)
        throw ValidationError("game config node count != loss table node count");
    if (static_cast<int>(config.gamma_a.size()) != config.n ||
        static_cast<int>(config.gamma_d.size()) != config.n)
        throw ValidationError("cost vector length != n");
}

}  // namespace

CbseResult solve_cbbi(const GameConfig& config, const LossTable& table) {
    check_config(config, table);
    const auto attacker_actions = enumerate_actions(
        config.n, config.level_count_attacker, config.gamma_a, config.action_cap);
    const auto defender_actions = enumerate_actions(
        config.n, config.level_count_defender, config.gamma_d, config.action_cap);

    std::vector<DefenderOutcome> outcomes(defender_actions.size());
    parallel_for(defender_actions.size(), config.jobs, [&](std::size_t i) {
        outcomes[i] =
            evaluate_defense(defender_actions[i], attacker_actions, table, config);
    });

    // Defender maximizes -U^a, i.e. minimizes the attacker's payoff.
    double best_payoff = std::numeric_limits<double>::infinity();
    for (const auto& o : outcomes) best_payoff = std::min(best_payoff, o.attacker_payoff);

    std::size_t chosen = defender_actions.size();
    int defender_ties = 0;
    for (std::size_t i = 0; i < defender_actions.size(); ++i) {
        if (!payoff_tied(-outcomes[i].attacker_payoff, -best_payoff,
                         config.payoff_tie_tol))
            continue;
        ++defender_ties;
        if (chosen == defender_actions.size() ||
            defender_actions[i].cost <
                defender_actions[chosen].cost - config.cost_tie_tol)
            chosen = i;
    }

    CbseResult result;
    result.defender_strategy = defender_actions[chosen];
    result.attacker_strategy = attacker_actions[outcomes[chosen].response];
    result.attacker_payoff = outcomes[chosen].attacker_payoff;
    result.defender_payoff = -result.attacker_payoff;
    result.attacker_cost = result.attacker_strategy.cost;
    result.defender_cost = result.defender_strategy.cost;
    result.num_attacker_ties = outcomes[chosen].num_ties;
    result.num_defender_ties = defender_ties;
    result.used_nonconverged_losses =
        table.any_nonconverged() &&
        pattern_uses_nonconverged(result.attacker_strategy,
                                  result.defender_strategy, table);
    return result;
}

BruteForceResult brute_force_se(const GameConfig& config, const LossTable& table,
                                std::uint64_t pair_cap) {
    check_config(config, table);
    const auto attacker_actions = enumerate_actions(
        config.n, config.level_count_attacker, config.gamma_a, config.action_cap);
    const auto defender_actions = enumerate_actions(
        config.n, config.level_count_defender, config.gamma_d, config.action_cap);

    const std::uint64_t pairs =
        static_cast<std::uint64_t>(attacker_actions.size()) * defender_actions.size();
    if (pairs > pair_cap)
        throw CapExceededError("brute_force_se: action pair count exceeds cap");

    std::vector<double> max_payoff(defender_actions.size());
    for (std::size_t j = 0; j < defender_actions.size(); ++j) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& a : attacker_actions)
            best = std::max(best, payoff_attacker(a, defender_actions[j], table));
        max_payoff[j] = best;
    }
    const double se_payoff =
        *std::min_element(max_payoff.begin(), max_payoff.end());

    BruteForceResult result;
    result.se_payoff = se_payoff;
    for (std::size_t j = 0; j < defender_actions.size(); ++j) {
        if (!payoff_tied(-max_payoff[j], -se_payoff, config.payoff_tie_tol))
            continue;
        for (const auto& a : attacker_actions) {
            const double u = payoff_attacker(a, defender_actions[j], table);
            if (payoff_tied(u, max_payoff[j], config.payoff_tie_tol))
                result.se_pairs.emplace_back(a, defender_actions[j]);
        }
    }
    return result;
}

IoResult individual_optimization(const GameConfig& config,
                                 const LossTable& table) {
    check_config(config, table);
    const auto attacker_actions = enumerate_actions(
        config.n, config.level_count_attacker, config.gamma_a, config.action_cap);
    const auto defender_actions = enumerate_actions(
        config.n, config.level_count_defender, config.gamma_d, config.action_cap);

    const Action no_defense{std::vector<double>(config.n, 0.0), 0.0};
    const BestResponse br = best_response_set(no_defense, attacker_actions, table,
                                              config.payoff_tie_tol);
    const std::size_t a_idx =
        min_cost_response(br.responses, attacker_actions, config.cost_tie_tol);
    const Action& a_io = attacker_actions[a_idx];

    // The defender plans against the attacker's own no-defense profile.
    double best = std::numeric_limits<double>::infinity();
    for (const auto& d : defender_actions)
        best = std::min(best, payoff_attacker(a_io, d, table));
    std::size_t d_idx = defender_actions.size();
    for (std::size_t j = 0; j < defender_actions.size(); ++j) {
        if (!payoff_tied(-payoff_attacker(a_io, defender_actions[j], table), -best,
                         config.payoff_tie_tol))
            continue;
        if (d_idx == defender_actions.size() ||
            defender_actions[j].cost <
                defender_actions[d_idx].cost - config.cost_tie_tol)
            d_idx = j;
    }

    IoResult result;
    result.attacker_strategy = a_io;
    result.defender_strategy = defender_actions[d_idx];
    result.realized_payoff =
        payoff_attacker(result.attacker_strategy, result.defender_strategy, table);
    return result;
}

}  // namespace secgame
