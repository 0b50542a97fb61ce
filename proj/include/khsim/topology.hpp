#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "khsim/netlist.hpp"

namespace khsim {

struct JunctionRef {
    int dof = 0;  // 0-based
    double critical_current = 0.0;
    std::string name;
};

// Circuit matrices. The node-coordinate matrices carry the raw stamps; the
// DOF matrices are their congruence with node_from_dof, which differs from
// the identity only when an auxiliary capacitor spans two non-ground nodes.
// DOF k then is the branch flux between node k+1 and reference_node[k].
struct CircuitModel {
    int n_dof = 0;
    Eigen::MatrixXd cmat;
    Eigen::MatrixXd linv;
    Eigen::MatrixXd rinv;

    Eigen::MatrixXd node_cmat;
    Eigen::MatrixXd node_linv;
    Eigen::MatrixXd node_rinv;
    Eigen::MatrixXd node_from_dof;

    std::vector<JunctionRef> junctions;
    std::vector<std::string> node_names;
    std::vector<int> auxiliary_nodes;  // 1-based
    std::vector<int> reference_node;   // per DOF, 0 = ground

    // Capacitance and inverse inductance of the elements that connect each
    // DOF's node directly to its reference node.
    Eigen::VectorXd branch_capacitance;
    Eigen::VectorXd branch_inverse_inductance;

    [[nodiscard]] const JunctionRef* junction_at(int dof) const;
};

[[nodiscard]] CircuitModel assemble_matrices(const CircuitSpec& spec);

// 1-based ids of nodes with an all-zero capacitance row.
[[nodiscard]] std::vector<int> detect_singular_capacitance(const CircuitModel& model);

enum class AuxPlacement {
    across_inductor,  // parallel to the single inductor at the node, if there is one
    to_ground,
};

[[nodiscard]] double default_auxiliary_capacitance(const CircuitSpec& spec);

[[nodiscard]] CircuitSpec insert_auxiliary_capacitor(const CircuitSpec& spec, int node, double value,
                                                     AuxPlacement placement = AuxPlacement::across_inductor);

enum class ConstraintLaw { kvl, kcl };

struct ConstraintCount {
    int kvl_count = 0;
    int kcl_count = 0;
    ConstraintLaw chosen = ConstraintLaw::kvl;
};

[[nodiscard]] ConstraintCount constraint_counts(const CircuitSpec& spec);

struct EffectiveParams {
    double inductance = 0.0;
    double capacitance = 0.0;
    double impedance = 0.0;
};

// k is 0-based.
[[nodiscard]] EffectiveParams effective_params(const CircuitModel& model, int k);

}  // namespace khsim
