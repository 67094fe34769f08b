#include "secgame/model.hpp"

#include <Eigen/Eigenvalues>
#include <numeric>
#include <sstream>

#include "secgame/errors.hpp"

namespace secgame {

int StateSpaceModel::state_offset(int node) const {
    int off = 0;
    for (int i = 0; i < node; ++i) off += partition[i].num_states;
    return off;
}

int StateSpaceModel::input_offset(int node) const {
    int off = 0;
    for (int i = 0; i < node; ++i) off += partition[i].num_inputs;
    return off;
}

namespace {

bool is_symmetric(const Eigen::MatrixXd& M, double rel_tol) {
    const double scale = std::max(1.0, M.norm());
    return (M - M.transpose()).norm() <= rel_tol * scale;
}

double min_sym_eigenvalue(const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace

void validate_model(const StateSpaceModel& model, const ValidationOptions& opts) {
    const int m = model.num_states();
    const int r = model.num_inputs();
    auto fail = [&](const std::string& what) {
        throw ValidationError(model.name.empty() ? what : model.name + ": " + what);
    };

    if (m == 0) fail("A is empty");
    if (model.A.rows() != model.A.cols()) fail("A not square");
    if (model.B.rows() != m) fail("B row count != A dimension");
    if (model.D.rows() != m) fail("D row count != A dimension");
    if (model.Q.rows() != m || model.Q.cols() != m) fail("Q dimension mismatch");
    if (model.R.rows() != r || model.R.cols() != r) fail("R dimension mismatch");

    auto finite = [](const Eigen::MatrixXd& M) { return M.allFinite(); };
    if (!finite(model.A) || !finite(model.B) || !finite(model.D) ||
        !finite(model.Q) || !finite(model.R))
        fail("non-finite matrix entry");

    if (!is_symmetric(model.Q, opts.symmetry_tol)) fail("Q asymmetric");
    if (!is_symmetric(model.R, opts.symmetry_tol)) fail("R asymmetric");

    const double q_scale = std::max(1.0, model.Q.norm());
    if (min_sym_eigenvalue(model.Q) < -opts.definiteness_tol * q_scale)
        fail("Q not positive semidefinite");
    const double r_scale = std::max(1.0, model.R.norm());
    if (min_sym_eigenvalue(model.R) <= opts.definiteness_tol * r_scale)
        fail("R not positive definite");

    if (model.partition.empty()) fail("empty node partition");
    int sum_m = 0, sum_r = 0;
    for (const auto& blk : model.partition) {
        if (blk.num_states < 0 || blk.num_inputs < 0) fail("negative partition block");
        sum_m += blk.num_states;
        sum_r += blk.num_inputs;
    }
    if (sum_m != m) fail("partition state counts do not sum to A dimension");
    if (sum_r != r) fail("partition input counts do not sum to B column count");

    Eigen::EigenSolver<Eigen::MatrixXd> es(model.A, false);
    const double max_re = es.eigenvalues().real().maxCoeff();
    if (!(max_re < -opts.hurwitz_margin)) {
        std::ostringstream oss;
        oss << "A not Hurwitz (max Re eig = " << max_re << ")";
        fail(oss.str());
    }
}

}  // namespace secgame
