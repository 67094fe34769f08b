#include "secgame/modelio.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "secgame/errors.hpp"

namespace secgame {

namespace {

using nlohmann::json;

double parse_number(const json& v, const std::string& what) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            std::size_t pos = 0;
            const double d = std::stod(v.get<std::string>(), &pos);
            if (pos == v.get<std::string>().size()) return d;
        } catch (const std::exception&) {
        }
    }
    throw ParseError("invalid number in " + what);
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Eigen::MatrixXd parse_matrix(const json& arr, int rows, int cols,
                             const std::string& what) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != rows * cols)
        throw ParseError(what + ": expected " + std::to_string(rows * cols) +
                         " entries");
    Eigen::MatrixXd M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            M(i, j) = parse_number(arr[i * cols + j], what);
    return M;
}

json dump_matrix(const Eigen::MatrixXd& M) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            arr.push_back(format_number(M(i, j)));
    return arr;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return doc;
}

void write_json_atomic(const json& doc, const std::filesystem::path& path) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw ParseError("cannot write " + tmp.string());
        out << doc.dump(1) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

std::vector<int> consensus_reorder_permutation(const NodePartition& partition) {
    const int n = static_cast<int>(partition.size());
    std::vector<int> offsets(n);
    int m = 0;
    for (int i = 0; i < n; ++i) {
        offsets[i] = m;
        m += partition[i].num_states;
    }
    if (m < 2 * n)
        throw ValidationError("consensus ordering needs >= 2 states per node");

    std::vector<int> perm;
    perm.reserve(m);
    for (int i = 0; i < n; ++i) {
        if (partition[i].num_states < 2)
            throw ValidationError("consensus ordering needs >= 2 states per node");
        perm.push_back(offsets[i]);  // angle
    }
    for (int i = 0; i < n; ++i) perm.push_back(offsets[i] + 1);  // frequency
    for (int i = 0; i < n; ++i)
        for (int s = 2; s < partition[i].num_states; ++s)
            perm.push_back(offsets[i] + s);
    return perm;
}

Eigen::MatrixXd build_consensus_Q(const NodePartition& partition) {
    const int n = static_cast<int>(partition.size());
    int m = 0;
    for (const auto& blk : partition) m += blk.num_states;
    if (m < 2 * n) throw ValidationError("PartitionTooSmall: need m >= 2n");

    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(m, m);
    // Angle block: Laplacian of the complete graph, n I - 1 1^T.
    Q.topLeftCorner(n, n) =
        static_cast<double>(n) * Eigen::MatrixXd::Identity(n, n) -
        Eigen::MatrixXd::Ones(n, n);
    return Q;
}

StateSpaceModel load_model(const std::filesystem::path& path,
                           const LoadOptions& opts) {
    const json doc = read_json(path);
    StateSpaceModel model;
    try {
        model.name = doc.value("name", path.stem().string());
        const json& dims = doc.at("dims");
        const int m = dims.at("m").get<int>();
        const int r = dims.at("r").get<int>();
        const int q = dims.at("q").get<int>();
        const int n = dims.at("n").get<int>();

        for (const auto& blk : doc.at("partition"))
            model.partition.push_back(
                NodeBlock{blk.at(0).get<int>(), blk.at(1).get<int>()});
        if (static_cast<int>(model.partition.size()) != n)
            throw ParseError("partition length != n");

        model.A = parse_matrix(doc.at("A"), m, m, "A");
        model.B = parse_matrix(doc.at("B"), m, r, "B");
        model.D = parse_matrix(doc.at("D"), m, q, "D");

        const std::string ordering = doc.value("ordering", "grouped");
        if (doc.at("Q").is_string() && doc.at("Q") == "consensus") {
            Eigen::MatrixXd Q = build_consensus_Q(model.partition);
            if (ordering == "grouped") {
                // Manifest states are grouped per node; permute the
                // angles-first weight back to the stored ordering.
                const auto perm = consensus_reorder_permutation(model.partition);
                Eigen::MatrixXd Qg(m, m);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) Qg(perm[i], perm[j]) = Q(i, j);
                Q = Qg;
            } else if (ordering != "reordered") {
                throw ParseError("unknown ordering tag: " + ordering);
            }
            model.Q = Q;
        } else {
            model.Q = parse_matrix(doc.at("Q"), m, m, "Q");
        }

        if (doc.at("R").is_string() && doc.at("R") == "identity")
            model.R = Eigen::MatrixXd::Identity(r, r);
        else
            model.R = parse_matrix(doc.at("R"), r, r, "R");
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }

    ValidationOptions vopts;
    if (opts.allow_marginal) vopts.hurwitz_margin = 1e-6;
    validate_model(model, vopts);
    return model;
}

void save_model(const StateSpaceModel& model, const std::filesystem::path& path,
                const std::string& ordering) {
    json doc;
    doc["name"] = model.name;
    doc["dims"] = {{"m", model.num_states()},
                   {"r", model.num_inputs()},
                   {"q", model.num_disturbances()},
                   {"n", model.num_nodes()}};
    doc["ordering"] = ordering;
    json partition = json::array();
    for (const auto& blk : model.partition)
        partition.push_back({blk.num_states, blk.num_inputs});
    doc["partition"] = partition;
    doc["A"] = dump_matrix(model.A);
    doc["B"] = dump_matrix(model.B);
    doc["D"] = dump_matrix(model.D);
    doc["Q"] = dump_matrix(model.Q);
    doc["R"] = dump_matrix(model.R);
    write_json_atomic(doc, path);
}

ModelSet load_model_set(const std::filesystem::path& path,
                        const LoadOptions& opts) {
    const json doc = read_json(path);
    ModelSet set;
    try {
        const json& models = doc.at("models");
        for (const auto& entry : models) {
            std::filesystem::path model_path = entry.get<std::string>();
            if (model_path.is_relative())
                model_path = path.parent_path() / model_path;
            set.models.push_back(load_model(model_path, opts));
        }
        const int count = set.size();
        if (doc.contains("phi") && !(doc["phi"].is_string())) {
            for (const auto& v : doc["phi"])
                set.phi.push_back(parse_number(v, "phi"));
        } else {
            set.phi.assign(count, 1.0 / count);
        }
        set.nominal_index = doc.value("nominal_index", 0);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    validate_model_set(set);
    return set;
}

void save_loss_table(const LossTable& table, const std::filesystem::path& path) {
    json doc;
    doc["version"] = 1;
    doc["model_hash"] = table.model_hash;
    doc["mode"] = to_string(table.mode);
    doc["n"] = table.n;
    doc["J_opt"] = format_number(table.J_opt);
    json entries = json::array();
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
        const auto& e = table.entries[i];
        entries.push_back({{"index", i},
                           {"J", format_number(e.J)},
                           {"delta", format_number(e.delta)},
                           {"converged", e.converged}});
    }
    doc["entries"] = std::move(entries);
    write_json_atomic(doc, path);
}

LossTable load_loss_table(const std::filesystem::path& path,
                          const std::optional<std::string>& expected_hash) {
    const json doc = read_json(path);
    LossTable table;
    try {
        if (doc.at("version").get<int>() != 1)
            throw ParseError("unsupported loss table version");
        table.model_hash = doc.at("model_hash").get<std::string>();
        table.mode = mask_mode_from_string(doc.at("mode").get<std::string>());
        table.n = doc.at("n").get<int>();
        table.J_opt = parse_number(doc.at("J_opt"), "J_opt");
        table.entries.resize(std::size_t{1} << table.n);
        for (const auto& e : doc.at("entries")) {
            const std::size_t idx = e.at("index").get<std::size_t>();
            if (idx >= table.entries.size()) throw ParseError("entry index out of range");
            table.entries[idx] =
                LossEntry{parse_number(e.at("J"), "J"),
                          parse_number(e.at("delta"), "delta"),
                          e.at("converged").get<bool>()};
        }
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (expected_hash && *expected_hash != table.model_hash)
        throw HashMismatchError("loss table cache is stale for " + path.string());
    return table;
}

}  // namespace secgame
