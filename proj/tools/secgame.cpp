// secgame: cost-based Stackelberg security-investment games over linear
// network control systems. Subcommands cover validation, loss tables,
// equilibrium solves, cost/level sweeps, robust model-set games, and the
// individual-optimization baseline. Outputs are machine-readable JSON/CSV.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "secgame/errors.hpp"
#include "secgame/game.hpp"
#include "secgame/lossmap.hpp"
#include "secgame/modelio.hpp"
#include "secgame/parallel.hpp"
#include "secgame/robust.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace secgame;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 ok, 2 parse/validation, 3 solver, 4 cap exceeded, 1 other.
int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e) ||
        dynamic_cast<const ValidationError*>(&e) ||
        dynamic_cast<const HashMismatchError*>(&e) ||
        dynamic_cast<const WeightSumMismatchError*>(&e))
        return 2;
    if (dynamic_cast<const CapExceededError*>(&e)) return 4;
    if (dynamic_cast<const Error*>(&e)) return 3;
    return 1;
}

struct CommonOpts {
    int jobs = default_jobs();
    std::string mode = "full_node";
    std::string cache_dir;
    std::string out;
    std::uint64_t seed = 0;  // recorded only; the game is deterministic
};

fs::path cache_directory(const CommonOpts& opts) {
    if (!opts.cache_dir.empty()) return opts.cache_dir;
    if (const char* env = std::getenv("SECGAME_CACHE_DIR")) return env;
    return {};
}

json run_record(const std::string& command, const json& params,
                const json& inputs) {
    json rec;
    rec["tool"] = "secgame";
    rec["version"] = kVersion;
    rec["command"] = command;
    rec["params"] = params;
    rec["inputs"] = inputs;
    return rec;
}

void emit(const json& doc, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << doc.dump(1) << "\n";
    } else {
        std::ofstream file(out);
        if (!file) throw ParseError("cannot write " + out);
        file << doc.dump(1) << "\n";
    }
}

void emit_text(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        std::ofstream file(out);
        if (!file) throw ParseError("cannot write " + out);
        file << text;
    }
}

// Builds the loss table, going through the cache directory when set.
LossTable cached_loss_table(const StateSpaceModel& model, MaskMode mode,
                            const SynthOptions& synth, int jobs,
                            const fs::path& cache_dir, int cap = kDefaultNodeCap) {
    if (cache_dir.empty())
        return build_loss_table(model, mode, synth, jobs, cap);
    const std::string hash = model_content_hash(model, mode, synth);
    const fs::path path = cache_dir / ("losstable-" + hash + ".json");
    if (fs::exists(path)) return load_loss_table(path, hash);
    const LossTable table = build_loss_table(model, mode, synth, jobs, cap);
    fs::create_directories(cache_dir);
    save_loss_table(table, path);
    return table;
}

bool is_model_set(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return doc.contains("models");
}

GameConfig make_config(int n, int La, int Ld, double ga, double gd, int jobs) {
    GameConfig config;
    config.n = n;
    config.level_count_attacker = La;
    config.level_count_defender = Ld;
    config.gamma_a.assign(n, ga);
    config.gamma_d.assign(n, gd);
    config.jobs = jobs;
    return config;
}

json action_json(const Action& action) {
    return json{{"levels", action.levels}, {"cost", action.cost}};
}

json cbse_json(const CbseResult& result, double J_opt) {
    json doc;
    doc["attacker_strategy"] = action_json(result.attacker_strategy);
    doc["defender_strategy"] = action_json(result.defender_strategy);
    doc["attacker_payoff"] = result.attacker_payoff;
    doc["defender_payoff"] = result.defender_payoff;
    doc["fractional_payoff_pct"] =
        J_opt > 0 ? result.attacker_payoff / J_opt * 100.0 : 0.0;
    doc["attacker_cost"] = result.attacker_cost;
    doc["defender_cost"] = result.defender_cost;
    doc["num_attacker_ties"] = result.num_attacker_ties;
    doc["num_defender_ties"] = result.num_defender_ties;
    doc["used_nonconverged_losses"] = result.used_nonconverged_losses;
    return doc;
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> values;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        values.push_back(std::stod(item));
    }
    if (values.empty()) throw ParseError("empty grid: " + spec);
    return values;
}

int cmd_validate(const std::string& input) {
    if (is_model_set(input)) {
        const ModelSet set = load_model_set(input);
        std::cout << "ok: model set with " << set.size() << " models, n = "
                  << set.models.front().num_nodes() << "\n";
    } else {
        const StateSpaceModel model = load_model(input);
        std::cout << "ok: model '" << model.name << "' m = " << model.num_states()
                  << ", r = " << model.num_inputs() << ", n = "
                  << model.num_nodes() << "\n";
    }
    return 0;
}

int cmd_losses(const std::string& input, const CommonOpts& opts, int cap) {
    const auto t0 = std::chrono::steady_clock::now();
    const StateSpaceModel model = load_model(input);
    const MaskMode mode = mask_mode_from_string(opts.mode);
    const SynthOptions synth;
    const LossTable table = cached_loss_table(model, mode, synth, opts.jobs,
                                              cache_directory(opts), cap);

    json params = {{"mode", opts.mode}, {"jobs", opts.jobs}, {"seed", opts.seed}};
    json doc = run_record("losses", params,
                          json{{"model", input}, {"model_hash", table.model_hash}});
    doc["J_opt"] = table.J_opt;
    doc["n"] = table.n;
    const std::uint32_t all_ones = (1u << table.n) - 1;
    json per_node = json::array();
    for (int node = 1; node <= table.n; ++node) {
        const double delta = table.delta(all_ones & ~(1u << (node - 1)));
        per_node.push_back({{"node", node},
                            {"delta", delta},
                            {"fractional_loss_pct", delta / table.J_opt * 100.0}});
    }
    doc["single_node_losses"] = per_node;
    doc["open_loop"] = {
        {"delta", table.delta(0)},
        {"fractional_loss_pct", table.delta(0) / table.J_opt * 100.0}};
    doc["importance_ranking"] = importance_ranking(table);
    json entries = json::array();
    for (std::size_t i = 0; i < table.entries.size(); ++i)
        entries.push_back({{"index", i},
                           {"J", table.entries[i].J},
                           {"delta", table.entries[i].delta},
                           {"converged", table.entries[i].converged}});
    doc["entries"] = entries;
    doc["any_nonconverged"] = table.any_nonconverged();
    doc["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(doc, opts.out);
    return 0;
}

int cmd_solve(const std::string& input, const CommonOpts& opts, double ga,
              double gd, int La, int Ld, const std::string& game) {
    const auto t0 = std::chrono::steady_clock::now();
    const MaskMode mode = mask_mode_from_string(opts.mode);
    const SynthOptions synth;
    const fs::path cache = cache_directory(opts);

    json params = {{"ga", ga},   {"gd", gd},   {"La", La},
                   {"Ld", Ld},   {"game", game}, {"mode", opts.mode},
                   {"jobs", opts.jobs}, {"seed", opts.seed}};
    json doc;

    if (game == "fixed") {
        const StateSpaceModel model = load_model(input);
        const LossTable table =
            cached_loss_table(model, mode, synth, opts.jobs, cache);
        const auto config = make_config(model.num_nodes(), La, Ld, ga, gd, opts.jobs);
        const CbseResult result = solve_cbbi(config, table);
        doc = run_record("solve", params,
                         json{{"model", input}, {"model_hash", table.model_hash}});
        doc["result"] = cbse_json(result, table.J_opt);
    } else if (game == "average" || game == "nominal-eval") {
        const ModelSet set = load_model_set(input);
        ModelSetTables tables;
        for (const auto& model : set.models)
            tables.per_model.push_back(
                cached_loss_table(model, mode, synth, opts.jobs, cache));
        tables.expected = expected_loss_table(tables.per_model, set.phi);
        const auto config =
            make_config(set.models.front().num_nodes(), La, Ld, ga, gd, opts.jobs);
        doc = run_record("solve", params, json{{"model_set", input}});
        if (game == "average") {
            const CbseResult result = solve_average_game(tables, config);
            doc["result"] = cbse_json(result, tables.expected.J_opt);
        } else {
            // Evaluate the nominal model's CBSE on every model in the set.
            const CbseResult nominal =
                solve_cbbi(config, tables.per_model[set.nominal_index]);
            doc["nominal_design"] =
                cbse_json(nominal, tables.per_model[set.nominal_index].J_opt);
            json evals = json::array();
            for (int i = 0; i < set.size(); ++i) {
                const double applied = evaluate_strategy(
                    nominal.attacker_strategy, nominal.defender_strategy,
                    tables.per_model[i]);
                json row = {{"model_index", i},
                            {"applied_payoff", applied},
                            {"fractional_payoff_pct",
                             applied / tables.per_model[i].J_opt * 100.0}};
                try {
                    row["mismatch_pct"] =
                        nominal_mismatch(tables, config, i, set.nominal_index);
                } catch (const DegenerateDenominatorError&) {
                    row["mismatch_pct"] = nullptr;
                    row["degenerate"] = true;
                }
                evals.push_back(row);
            }
            doc["per_model"] = evals;
        }
    } else {
        throw ParseError("unknown game variant: " + game);
    }
    doc["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(doc, opts.out);
    return 0;
}

int cmd_sweep(const std::string& input, const CommonOpts& opts,
              const std::string& ga_grid, const std::string& gd_grid, int La,
              int Ld, const std::string& level_grid) {
    const StateSpaceModel model = load_model(input);
    const MaskMode mode = mask_mode_from_string(opts.mode);
    const SynthOptions synth;
    const LossTable table =
        cached_loss_table(model, mode, synth, opts.jobs, cache_directory(opts));
    const int n = model.num_nodes();

    std::ostringstream csv;
    auto strategy_str = [](const Action& a) {
        std::ostringstream oss;
        for (std::size_t i = 0; i < a.levels.size(); ++i) {
            if (i) oss << " ";
            oss << a.levels[i];
        }
        return oss.str();
    };

    if (!level_grid.empty()) {
        // Level sweep at fixed costs: both (L_a varies, L_d fixed) and the
        // symmetric case, one row per combination.
        const double ga = parse_grid(ga_grid).front();
        const double gd = parse_grid(gd_grid).front();
        csv << "La,Ld,gamma_a,gamma_d,attacker_payoff,fractional_payoff_pct,"
               "a_star,d_star\n";
        for (double La_val : parse_grid(level_grid)) {
            for (double Ld_val : parse_grid(level_grid)) {
                const auto config = make_config(n, static_cast<int>(La_val),
                                                static_cast<int>(Ld_val), ga, gd,
                                                opts.jobs);
                const CbseResult r = solve_cbbi(config, table);
                csv << static_cast<int>(La_val) << "," << static_cast<int>(Ld_val)
                    << "," << ga << "," << gd << "," << r.attacker_payoff << ","
                    << r.attacker_payoff / table.J_opt * 100.0 << ",\""
                    << strategy_str(r.attacker_strategy) << "\",\""
                    << strategy_str(r.defender_strategy) << "\"\n";
            }
        }
    } else {
        csv << "gamma_a,gamma_d,attacker_payoff,fractional_payoff_pct,a_star,"
               "d_star,attacker_ties,defender_ties\n";
        for (double ga : parse_grid(ga_grid)) {
            for (double gd : parse_grid(gd_grid)) {
                const auto config = make_config(n, La, Ld, ga, gd, opts.jobs);
                const CbseResult r = solve_cbbi(config, table);
                csv << ga << "," << gd << "," << r.attacker_payoff << ","
                    << r.attacker_payoff / table.J_opt * 100.0 << ",\""
                    << strategy_str(r.attacker_strategy) << "\",\""
                    << strategy_str(r.defender_strategy) << "\","
                    << r.num_attacker_ties << "," << r.num_defender_ties << "\n";
            }
        }
    }
    emit_text(csv.str(), opts.out);
    return 0;
}

int cmd_robust(const std::string& input, const CommonOpts& opts,
               const std::string& cost_grid_spec, int La, int Ld) {
    const ModelSet set = load_model_set(input);
    const MaskMode mode = mask_mode_from_string(opts.mode);
    const SynthOptions synth;
    const fs::path cache = cache_directory(opts);

    ModelSetTables tables;
    for (const auto& model : set.models)
        tables.per_model.push_back(
            cached_loss_table(model, mode, synth, opts.jobs, cache));
    tables.expected = expected_loss_table(tables.per_model, set.phi);

    // Grid spec: "ga:gd;ga:gd;..."
    std::vector<std::pair<double, double>> grid;
    std::stringstream ss(cost_grid_spec);
    std::string pair;
    while (std::getline(ss, pair, ';')) {
        if (pair.empty()) continue;
        const auto colon = pair.find(':');
        if (colon == std::string::npos)
            throw ParseError("cost grid entries must be ga:gd, got " + pair);
        grid.emplace_back(std::stod(pair.substr(0, colon)),
                          std::stod(pair.substr(colon + 1)));
    }
    if (grid.empty()) throw ParseError("empty cost grid");

    const int n = set.models.front().num_nodes();
    std::ostringstream csv;
    csv << "gamma_a,gamma_d,model_index,ideal_pct,nominal_pct,average_pct,"
           "mu_nominal_pct,mu_average_pct,degenerate\n";

    std::vector<double> mu_nom, mu_avg;
    int degenerate = 0;
    for (const auto& [ga, gd] : grid) {
        const auto config = make_config(n, La, Ld, ga, gd, opts.jobs);
        const CbseResult nominal =
            solve_cbbi(config, tables.per_model[set.nominal_index]);
        const CbseResult average = solve_average_game(tables, config);
        for (int i = 0; i < set.size(); ++i) {
            const auto& table = tables.per_model[i];
            const CbseResult own = solve_cbbi(config, table);
            const double ideal_pct = own.attacker_payoff / table.J_opt * 100.0;
            const double nom_applied = evaluate_strategy(
                nominal.attacker_strategy, nominal.defender_strategy, table);
            const double avg_applied = evaluate_strategy(
                average.attacker_strategy, average.defender_strategy, table);
            csv << ga << "," << gd << "," << i << "," << ideal_pct << ","
                << nom_applied / table.J_opt * 100.0 << ","
                << avg_applied / table.J_opt * 100.0 << ",";
            if (own.attacker_payoff == 0.0) {
                ++degenerate;
                csv << ",,1\n";
                continue;
            }
            const double mn =
                std::abs((nom_applied - own.attacker_payoff) / own.attacker_payoff) *
                100.0;
            const double ma =
                std::abs((avg_applied - own.attacker_payoff) / own.attacker_payoff) *
                100.0;
            mu_nom.push_back(mn);
            mu_avg.push_back(ma);
            csv << mn << "," << ma << ",0\n";
        }
    }

    const MismatchStats stat_nom = summarize(mu_nom, degenerate);
    const MismatchStats stat_avg = summarize(mu_avg, degenerate);
    auto stats_json = [](const MismatchStats& s) {
        return json{{"min", s.min},       {"q1", s.q1},   {"median", s.median},
                    {"q3", s.q3},         {"max", s.max}, {"mean", s.mean},
                    {"count", s.values.size()},
                    {"degenerate_count", s.degenerate_count}};
    };
    json summary = run_record(
        "robust",
        json{{"cost_grid", cost_grid_spec}, {"La", La}, {"Ld", Ld},
             {"mode", opts.mode}, {"cost_pair_weighting", "uniform"}},
        json{{"model_set", input}});
    summary["nominal_game"] = stats_json(stat_nom);
    summary["average_game"] = stats_json(stat_avg);

    const std::string base = opts.out.empty() ? "robust" : opts.out;
    emit_text(csv.str(), base + ".csv");
    emit(summary, base + ".json");
    std::cout << "wrote " << base << ".csv and " << base << ".json\n";
    return 0;
}

int cmd_io_baseline(const std::string& input, const CommonOpts& opts, double ga,
                    double gd, int La, int Ld) {
    const StateSpaceModel model = load_model(input);
    const MaskMode mode = mask_mode_from_string(opts.mode);
    const SynthOptions synth;
    const LossTable table =
        cached_loss_table(model, mode, synth, opts.jobs, cache_directory(opts));
    const auto config = make_config(model.num_nodes(), La, Ld, ga, gd, opts.jobs);

    const CbseResult cbse = solve_cbbi(config, table);
    const IoResult io = individual_optimization(config, table);

    json doc = run_record("io-baseline",
                          json{{"ga", ga}, {"gd", gd}, {"La", La}, {"Ld", Ld},
                               {"mode", opts.mode}},
                          json{{"model", input}, {"model_hash", table.model_hash}});
    doc["cbse"] = cbse_json(cbse, table.J_opt);
    doc["io"] = {{"attacker_strategy", action_json(io.attacker_strategy)},
                 {"defender_strategy", action_json(io.defender_strategy)},
                 {"realized_payoff", io.realized_payoff},
                 {"fractional_payoff_pct",
                  io.realized_payoff / table.J_opt * 100.0}};
    doc["deltas"] = {
        {"attacker_payoff_io_minus_cbse",
         io.realized_payoff - cbse.attacker_payoff},
        {"attacker_cost_io_minus_cbse",
         io.attacker_strategy.cost - cbse.attacker_cost},
        {"defender_cost_io_minus_cbse",
         io.defender_strategy.cost - cbse.defender_cost}};
    emit(doc, opts.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cost-based Stackelberg security-investment games for linear "
                 "network control systems"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string input;
    double ga = 1.0, gd = 1.0;
    int La = 3, Ld = 3;
    int cap = kDefaultNodeCap;
    std::string game = "fixed";
    std::string ga_grid, gd_grid, level_grid, cost_grid;

    auto add_common = [&](CLI::App* cmd, bool with_mode = true) {
        cmd->add_option("--jobs", opts.jobs, "Worker threads");
        cmd->add_option("--cache-dir", opts.cache_dir,
                        "Loss-table cache directory (env SECGAME_CACHE_DIR)");
        cmd->add_option("--out", opts.out, "Output path (default stdout)");
        cmd->add_option("--seed", opts.seed, "Recorded in the run header only");
        if (with_mode)
            cmd->add_option("--mode", opts.mode,
                            "Mask mode: full_node | inter_node_only");
    };

    auto* validate = app.add_subcommand("validate", "Validate a model or model set");
    validate->add_option("input", input)->required();

    auto* losses =
        app.add_subcommand("losses", "Build the loss table and importance ranking");
    losses->add_option("input", input)->required();
    losses->add_option("--node-cap", cap, "Max node count (2^n patterns)");
    add_common(losses);

    auto* solve = app.add_subcommand("solve", "Solve for a CBSE");
    solve->add_option("input", input)->required();
    solve->add_option("--ga", ga, "Attacker cost per node")->required();
    solve->add_option("--gd", gd, "Defender cost per node")->required();
    solve->add_option("--La", La, "Attacker level parameter");
    solve->add_option("--Ld", Ld, "Defender level parameter");
    solve->add_option("--game", game, "fixed | average | nominal-eval");
    add_common(solve);

    auto* sweep = app.add_subcommand("sweep", "Cost-grid or level sweep (CSV)");
    sweep->add_option("input", input)->required();
    sweep->add_option("--ga-grid", ga_grid, "Comma-separated attacker costs")
        ->required();
    sweep->add_option("--gd-grid", gd_grid, "Comma-separated defender costs")
        ->required();
    sweep->add_option("--La", La);
    sweep->add_option("--Ld", Ld);
    sweep->add_option("--sweep-levels", level_grid,
                      "Level values; sweeps L_a x L_d at the first cost pair");
    add_common(sweep);

    auto* robust = app.add_subcommand("robust", "Model-set mismatch statistics");
    robust->add_option("input", input)->required();
    robust->add_option("--cost-grid", cost_grid, "Pairs ga:gd;ga:gd;...")
        ->required();
    robust->add_option("--La", La);
    robust->add_option("--Ld", Ld);
    add_common(robust);

    auto* io = app.add_subcommand("io-baseline",
                                  "Individual optimization vs CBSE comparison");
    io->add_option("input", input)->required();
    io->add_option("--ga", ga)->required();
    io->add_option("--gd", gd)->required();
    io->add_option("--La", La);
    io->add_option("--Ld", Ld);
    add_common(io);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(input);
        if (losses->parsed()) return cmd_losses(input, opts, cap);
        if (solve->parsed()) return cmd_solve(input, opts, ga, gd, La, Ld, game);
        if (sweep->parsed())
            return cmd_sweep(input, opts, ga_grid, gd_grid, La, Ld, level_grid);
        if (robust->parsed()) return cmd_robust(input, opts, cost_grid, La, Ld);
        if (io->parsed()) return cmd_io_baseline(input, opts, ga, gd, La, Ld);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 1;
}
