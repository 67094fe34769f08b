#include "secgame/lossmap.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstring>
#include <numeric>
#include <sstream>

#include "secgame/errors.hpp"
#include "secgame/parallel.hpp"

namespace secgame {

SparsityPattern pattern_from_index(std::uint32_t index, int n) {
    SparsityPattern p;
    p.index = index;
    p.bits.resize(n);
    for (int k = 0; k < n; ++k) p.bits[k] = (index >> k) & 1u;
    return p;
}

std::uint32_t pattern_to_index(const std::vector<int>& bits) {
    std::uint32_t index = 0;
    for (std::size_t k = 0; k < bits.size(); ++k)
        if (bits[k]) index |= (1u << k);
    return index;
}

std::vector<SparsityPattern> enumerate_patterns(int n, int cap) {
    if (n < 1) throw ValidationError("enumerate_patterns: n must be >= 1");
    if (n > cap) {
        std::ostringstream oss;
        oss << "enumerate_patterns: n = " << n << " exceeds cap " << cap;
        throw CapExceededError(oss.str());
    }
    const std::uint32_t count = 1u << n;
    std::vector<SparsityPattern> patterns;
    patterns.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i)
        patterns.push_back(pattern_from_index(i, n));
    return patterns;
}

bool LossTable::any_nonconverged() const {
    return std::any_of(entries.begin(), entries.end(),
                       [](const LossEntry& e) { return !e.converged; });
}

LossResult loss_for_pattern(const StateSpaceModel& model,
                            const SparsityPattern& pattern, MaskMode mode,
                            double J_opt, const SynthOptions& opts) {
    const GainMask mask = build_mask(pattern.bits, model.partition, mode);
    const SynthesisReport report = synth_structured(model, mask, opts);
    LossResult result;
    result.J = report.J;
    result.delta = std::max(0.0, report.J - J_opt);
    result.converged = report.converged;
    return result;
}

namespace {

class Sha256 {
  public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr);
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }

    void update(const void* data, std::size_t len) {
        EVP_DigestUpdate(ctx_, data, len);
    }
    void update(const std::string& s) { update(s.data(), s.size()); }
    void update(double v) { update(&v, sizeof(v)); }
    void update(int v) { update(&v, sizeof(v)); }
    void update(const Eigen::MatrixXd& M) {
        const int rows = static_cast<int>(M.rows());
        const int cols = static_cast<int>(M.cols());
        update(rows);
        update(cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) update(M(i, j));
    }

    std::string hex() {
        unsigned char digest[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_, digest, &len);
        static const char* hexchars = "0123456789abcdef";
        std::string out;
        out.reserve(2 * len);
        for (unsigned int i = 0; i < len; ++i) {
            out.push_back(hexchars[digest[i] >> 4]);
            out.push_back(hexchars[digest[i] & 0xf]);
        }
        return out;
    }

  private:
    EVP_MD_CTX* ctx_;
};

}  // namespace

std::string model_content_hash(const StateSpaceModel& model, MaskMode mode,
                               const SynthOptions& opts) {
    Sha256 h;
    h.update("secgame-losstable-v1");
    h.update(model.A);
    h.update(model.B);
    h.update(model.D);
    h.update(model.Q);
    h.update(model.R);
    h.update(model.num_nodes());
    for (const auto& blk : model.partition) {
        h.update(blk.num_states);
        h.update(blk.num_inputs);
    }
    h.update(std::string(to_string(mode)));
    h.update(opts.grad_tol);
    h.update(opts.max_iter);
    h.update(opts.armijo_c);
    h.update(opts.min_step);
    return h.hex();
}

LossTable build_loss_table(const StateSpaceModel& model, MaskMode mode,
                           const SynthOptions& opts, int jobs, int cap) {
    const int n = model.num_nodes();
    const auto patterns = enumerate_patterns(n, cap);

    LossTable table;
    table.model_hash = model_content_hash(model, mode, opts);
    table.mode = mode;
    table.n = n;

    const SynthesisReport opt = synth_unstructured(model, opts);
    table.J_opt = opt.J;
    table.entries.resize(patterns.size());

    parallel_for(patterns.size(), jobs, [&](std::size_t i) {
        const auto res = loss_for_pattern(model, patterns[i], mode, table.J_opt, opts);
        table.entries[i] = LossEntry{res.J, res.delta, res.converged};
    });

    // All-ones pattern is the unconstrained optimum: clamp to exactly zero.
    table.entries.back().delta = 0.0;
    return table;
}

std::vector<int> importance_ranking(const LossTable& table) {
    const std::uint32_t all_ones = (1u << table.n) - 1;
    std::vector<int> nodes(table.n);
    std::iota(nodes.begin(), nodes.end(), 1);
    std::stable_sort(nodes.begin(), nodes.end(), [&](int a, int b) {
        const double da = table.delta(all_ones & ~(1u << (a - 1)));
        const double db = table.delta(all_ones & ~(1u << (b - 1)));
        if (da != db) return da > db;
        return a < b;
    });
    return nodes;
}

LossTable expected_loss_table(const std::vector<LossTable>& tables,
                              const std::vector<double>& phi) {
    if (tables.empty() || tables.size() != phi.size())
        throw ValidationError("expected_loss_table: model/weight count mismatch");
    const double phi_sum = std::accumulate(phi.begin(), phi.end(), 0.0);
    if (std::abs(phi_sum - 1.0) > 1e-12)
        throw WeightSumMismatchError("expected_loss_table: weights do not sum to 1");

    LossTable out;
    out.mode = tables.front().mode;
    out.n = tables.front().n;
    out.entries.assign(tables.front().entries.size(), LossEntry{});

    Sha256 h;
    h.update("secgame-expected-losstable-v1");
    for (std::size_t j = 0; j < tables.size(); ++j) {
        if (tables[j].n != out.n || tables[j].mode != out.mode ||
            tables[j].entries.size() != out.entries.size())
            throw ValidationError("expected_loss_table: incompatible tables");
        h.update(tables[j].model_hash);
        h.update(phi[j]);
        out.J_opt += phi[j] * tables[j].J_opt;
        for (std::size_t i = 0; i < out.entries.size(); ++i) {
            out.entries[i].J += phi[j] * tables[j].entries[i].J;
            out.entries[i].delta += phi[j] * tables[j].entries[i].delta;
            out.entries[i].converged =
                out.entries[i].converged && tables[j].entries[i].converged;
        }
    }
    out.model_hash = h.hex();
    return out;
}

LossTable expected_loss_table(const std::vector<WeightedModel>& models,
                              MaskMode mode, const SynthOptions& opts, int jobs,
                              int cap) {
    std::vector<LossTable> tables;
    std::vector<double> phi;
    tables.reserve(models.size());
    phi.reserve(models.size());
    for (const auto& wm : models) {
        tables.push_back(build_loss_table(*wm.model, mode, opts, jobs, cap));
        phi.push_back(wm.phi);
    }
    return expected_loss_table(tables, phi);
}

}  // namespace secgame
