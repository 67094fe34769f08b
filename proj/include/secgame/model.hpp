#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace secgame {

// One (states, inputs) block per network node.
struct NodeBlock {
    int num_states = 0;
    int num_inputs = 0;
};

using NodePartition = std::vector<NodeBlock>;

// Linear network control system
//   x' = A x + B u + D w,  u = -K x,
// with H2 weights Q (states) and R (inputs). The partition maps rows/columns
// of K onto nodes so attack-induced sparsity can be expressed per node.
struct StateSpaceModel {
    std::string name;
    Eigen::MatrixXd A;  // m x m
    Eigen::MatrixXd B;  // m x r
    Eigen::MatrixXd D;  // m x q
    Eigen::MatrixXd Q;  // m x m
    Eigen::MatrixXd R;  // r x r
    NodePartition partition;

    int num_states() const { return static_cast<int>(A.rows()); }
    int num_inputs() const { return static_cast<int>(B.cols()); }
    int num_disturbances() const { return static_cast<int>(D.cols()); }
    int num_nodes() const { return static_cast<int>(partition.size()); }

    // Offset of node k's block in the state / input vector.
    int state_offset(int node) const;
    int input_offset(int node) const;
};

struct ValidationOptions {
    double symmetry_tol = 1e-9;       // relative, Frobenius
    double hurwitz_margin = 1e-9;     // require max Re(eig) < -margin
    double definiteness_tol = 1e-12;  // eigenvalue floor for Q >= 0, R > 0
};

// Throws ValidationError naming the violated invariant; NotHurwitz is a
// validation failure here since the open-loop loss must be finite.
void validate_model(const StateSpaceModel& model,
                    const ValidationOptions& opts = {});

}  // namespace secgame
