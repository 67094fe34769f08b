#include "secgame/robust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "secgame/errors.hpp"
#include "secgame/lincontrol.hpp"

namespace secgame {

void validate_model_set(const ModelSet& set) {
    if (set.models.empty()) throw ValidationError("model set is empty");
    if (set.phi.size() != set.models.size())
        throw ValidationError("phi length != model count");
    if (set.nominal_index < 0 || set.nominal_index >= set.size())
        throw ValidationError("nominal index out of range");
    const double sum = std::accumulate(set.phi.begin(), set.phi.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-12)
        throw WeightSumMismatchError("model weights do not sum to 1");

    const auto& first = set.models.front();
    for (const auto& model : set.models) {
        validate_model(model);
        if (model.num_nodes() != first.num_nodes() ||
            model.num_states() != first.num_states() ||
            model.num_inputs() != first.num_inputs())
            throw ValidationError("model set dimensions inconsistent");
        const double b_scale = std::max(1.0, first.B.norm());
        if ((model.B - first.B).norm() > 1e-9 * b_scale)
            throw ValidationError("B differs across model set");
        const double d_scale = std::max(1.0, first.D.norm());
        if ((model.D - first.D).norm() > 1e-9 * d_scale)
            throw ValidationError("D differs across model set");
    }
}

ModelSetTables build_model_set_tables(const ModelSet& set, MaskMode mode,
                                      const SynthOptions& opts, int jobs,
                                      int cap) {
    ModelSetTables tables;
    tables.per_model.reserve(set.models.size());
    for (const auto& model : set.models)
        tables.per_model.push_back(build_loss_table(model, mode, opts, jobs, cap));
    tables.expected = expected_loss_table(tables.per_model, set.phi);
    return tables;
}

double evaluate_strategy(const Action& attack, const Action& defense,
                         const LossTable& model_table) {
    return payoff_attacker(attack, defense, model_table);
}

namespace {

double mismatch_percent(const CbseResult& evaluated_design,
                        const CbseResult& own_design,
                        const LossTable& model_table) {
    const double own = own_design.attacker_payoff;
    if (own == 0.0)
        throw DegenerateDenominatorError(
            "mismatch undefined: per-model CBSE payoff is zero");
    const double applied =
        evaluate_strategy(evaluated_design.attacker_strategy,
                          evaluated_design.defender_strategy, model_table);
    return std::abs((applied - own) / own) * 100.0;
}

}  // namespace

double nominal_mismatch(const ModelSetTables& tables, const GameConfig& config,
                        int model_index, int nominal_index) {
    const CbseResult nominal = solve_cbbi(config, tables.per_model[nominal_index]);
    const CbseResult own = solve_cbbi(config, tables.per_model[model_index]);
    return mismatch_percent(nominal, own, tables.per_model[model_index]);
}

CbseResult solve_average_game(const ModelSetTables& tables,
                              const GameConfig& config) {
    return solve_cbbi(config, tables.expected);
}

double average_mismatch(const ModelSetTables& tables, const GameConfig& config,
                        int model_index) {
    const CbseResult avg = solve_average_game(tables, config);
    const CbseResult own = solve_cbbi(config, tables.per_model[model_index]);
    return mismatch_percent(avg, own, tables.per_model[model_index]);
}

MismatchStats summarize(std::vector<double> values, int degenerate_count) {
    MismatchStats stats;
    stats.degenerate_count = degenerate_count;
    stats.values = std::move(values);
    if (stats.values.empty()) return stats;

    std::vector<double> sorted = stats.values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    auto quantile = [&](double q) {
        const double pos = q * (n - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, n - 1);
        const double frac = pos - lo;
        return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
    };
    stats.min = sorted.front();
    stats.max = sorted.back();
    stats.mean =
        std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
    stats.median = quantile(0.5);
    stats.q1 = quantile(0.25);
    stats.q3 = quantile(0.75);
    return stats;
}

MismatchReport mismatch_statistics(
    const ModelSetTables& tables,
    const std::vector<std::pair<double, double>>& cost_grid,
    const GameConfig& base_config, int nominal_index) {
    if (cost_grid.empty()) throw ValidationError("mismatch_statistics: empty grid");

    std::vector<double> nominal_values, average_values;
    int nominal_degenerate = 0, average_degenerate = 0;

    for (const auto& [ga, gd] : cost_grid) {
        GameConfig config = base_config;
        config.gamma_a.assign(config.n, ga);
        config.gamma_d.assign(config.n, gd);

        const CbseResult nominal_design =
            solve_cbbi(config, tables.per_model[nominal_index]);
        const CbseResult average_design = solve_average_game(tables, config);

        for (std::size_t i = 0; i < tables.per_model.size(); ++i) {
            const CbseResult own = solve_cbbi(config, tables.per_model[i]);
            if (own.attacker_payoff == 0.0) {
                ++nominal_degenerate;
                ++average_degenerate;
                continue;
            }
            const auto& table = tables.per_model[i];
            auto mu = [&](const CbseResult& design) {
                const double applied = evaluate_strategy(
                    design.attacker_strategy, design.defender_strategy, table);
                return std::abs((applied - own.attacker_payoff) /
                                own.attacker_payoff) *
                       100.0;
            };
            nominal_values.push_back(mu(nominal_design));
            average_values.push_back(mu(average_design));
        }
    }

    MismatchReport report;
    report.nominal = summarize(std::move(nominal_values), nominal_degenerate);
    report.average = summarize(std::move(average_values), average_degenerate);
    return report;
}

double controller_mismatch(const ModelSet& set, int model_index,
                           const SynthOptions& opts) {
    const SynthesisReport nominal = synth_unstructured(set.nominal(), opts);
    const StateSpaceModel& target = set.models[model_index];
    const SynthesisReport own = synth_unstructured(target, opts);
    const double J_mismatched = h2_cost(target, nominal.K);  // throws NotHurwitz
    return (J_mismatched - own.J) / own.J * 100.0;
}

}  // namespace secgame
