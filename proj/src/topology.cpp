#include "khsim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace khsim {

namespace {

void stamp(Eigen::MatrixXd& mat, int a, int b, double w) {
    if (a > 0) {
        mat(a - 1, a - 1) += w;
    }
    if (b > 0) {
        mat(b - 1, b - 1) += w;
    }
    if (a > 0 && b > 0) {
        mat(a - 1, b - 1) -= w;
        mat(b - 1, a - 1) -= w;
    }
}

int auxiliary_node_of(const CircuitSpec& spec, const ElementDecl& e) {
    const std::string suffix = e.name.substr(4);
    if (e.node_b > 0 && spec.label(e.node_b) == suffix) {
        return e.node_b;
    }
    return e.node_a > 0 ? e.node_a : e.node_b;
}

}  // namespace

const JunctionRef* CircuitModel::junction_at(int dof) const {
    const auto it = std::find_if(junctions.begin(), junctions.end(),
                                 [&](const JunctionRef& j) { return j.dof == dof; });
    return it == junctions.end() ? nullptr : &*it;
}

CircuitModel assemble_matrices(const CircuitSpec& spec) {
    const int n = spec.node_count;
    if (n <= 0) {
        throw InputError("circuit has no independent nodes");
    }
    CircuitModel model;
    model.n_dof = n;
    model.node_cmat = Eigen::MatrixXd::Zero(n, n);
    model.node_linv = Eigen::MatrixXd::Zero(n, n);
    model.node_rinv = Eigen::MatrixXd::Zero(n, n);
    model.reference_node.assign(static_cast<std::size_t>(n), 0);
    for (int k = 1; k <= n; ++k) {
        model.node_names.push_back(spec.label(k));
    }

    for (const auto& e : spec.elements) {
        if (!(e.value > 0.0) || !std::isfinite(e.value)) {
            throw InputError("element '" + e.name + "' has a zero or invalid value");
        }
        if (e.node_a < 0 || e.node_a > n || e.node_b < 0 || e.node_b > n || e.node_a == e.node_b) {
            throw InputError("element '" + e.name + "' has invalid terminals");
        }
        switch (e.kind) {
            case ElementKind::capacitor:
                stamp(model.node_cmat, e.node_a, e.node_b, e.value);
                if (e.is_auxiliary() && e.node_a > 0 && e.node_b > 0) {
                    const int aux = auxiliary_node_of(spec, e);
                    const int other = aux == e.node_a ? e.node_b : e.node_a;
                    if (model.reference_node[aux - 1] != 0) {
                        throw InputError("node " + spec.label(aux) + " carries two auxiliary capacitors");
                    }
                    model.reference_node[aux - 1] = other;
                }
                if (e.is_auxiliary()) {
                    model.auxiliary_nodes.push_back(auxiliary_node_of(spec, e));
                }
                break;
            case ElementKind::inductor:
                stamp(model.node_linv, e.node_a, e.node_b, 1.0 / e.value);
                break;
            case ElementKind::resistor:
                stamp(model.node_rinv, e.node_a, e.node_b, 1.0 / e.value);
                break;
            case ElementKind::junction: {
                if (e.node_a != 0 && e.node_b != 0) {
                    throw InputError("junction '" + e.name + "' must connect a node to ground");
                }
                const int node = e.node_a == 0 ? e.node_b : e.node_a;
                model.junctions.push_back({node - 1, e.value, e.name});
                break;
            }
        }
    }

    // node flux = sum of DOF fluxes along the reference chain
    model.node_from_dof = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k <= n; ++k) {
        int node = k;
        for (int steps = 0; node != 0; ++steps) {
            if (steps > n) {
                throw InputError("auxiliary capacitors form a loop");
            }
            model.node_from_dof(k - 1, node - 1) = 1.0;
            node = model.reference_node[node - 1];
        }
    }
    const Eigen::MatrixXd& t = model.node_from_dof;
    model.cmat = t.transpose() * model.node_cmat * t;
    model.linv = t.transpose() * model.node_linv * t;
    model.rinv = t.transpose() * model.node_rinv * t;

    for (const auto& j : model.junctions) {
        if (model.reference_node[j.dof] != 0) {
            throw InputError("junction '" + j.name + "' sits on a node whose flux is not ground-referenced");
        }
    }

    model.branch_capacitance = Eigen::VectorXd::Zero(n);
    model.branch_inverse_inductance = Eigen::VectorXd::Zero(n);
    for (const auto& e : spec.elements) {
        if (e.kind != ElementKind::capacitor && e.kind != ElementKind::inductor) {
            continue;
        }
        int dof = -1;
        if (e.node_a > 0 && model.reference_node[e.node_a - 1] == e.node_b) {
            dof = e.node_a - 1;
        } else if (e.node_b > 0 && model.reference_node[e.node_b - 1] == e.node_a) {
            dof = e.node_b - 1;
        }
        if (dof < 0) {
            continue;
        }
        if (e.kind == ElementKind::capacitor) {
            model.branch_capacitance(dof) += e.value;
        } else {
            model.branch_inverse_inductance(dof) += 1.0 / e.value;
        }
    }
    return model;
}

std::vector<int> detect_singular_capacitance(const CircuitModel& model) {
    std::vector<int> nodes;
    for (int k = 0; k < model.node_cmat.rows(); ++k) {
        if (model.node_cmat.row(k).cwiseAbs().maxCoeff() == 0.0) {
            nodes.push_back(k + 1);
        }
    }
    return nodes;
}

double default_auxiliary_capacitance(const CircuitSpec& spec) {
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& e : spec.elements) {
        if (e.kind == ElementKind::capacitor) {
            smallest = std::min(smallest, e.value);
        }
    }
    if (!std::isfinite(smallest)) {
        throw InputError("circuit has no capacitor to size the auxiliary element from");
    }
    return smallest / 100.0;
}

CircuitSpec insert_auxiliary_capacitor(const CircuitSpec& spec, int node, double value, AuxPlacement placement) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InputError("auxiliary capacitance must be positive");
    }
    const auto singular = detect_singular_capacitance(assemble_matrices(spec));
    if (std::find(singular.begin(), singular.end(), node) == singular.end()) {
        throw InputError("node " + (node >= 1 && node <= spec.node_count ? spec.label(node) : std::to_string(node)) +
                         " is not singular");
    }
    int other = 0;
    if (placement == AuxPlacement::across_inductor) {
        const ElementDecl* inductor = nullptr;
        int count = 0;
        for (const auto& e : spec.elements) {
            if (e.kind == ElementKind::inductor && (e.node_a == node || e.node_b == node)) {
                inductor = &e;
                ++count;
            }
        }
        if (count == 1) {
            other = inductor->node_a == node ? inductor->node_b : inductor->node_a;
        }
    }
    CircuitSpec out = spec;
    ElementDecl aux{ElementKind::capacitor, "Caux" + spec.label(node), node, other, value};
    if (out.find(aux.name) != nullptr) {
        throw InputError("element name '" + aux.name + "' already in use");
    }
    out.elements.push_back(std::move(aux));
    return out;
}

ConstraintCount constraint_counts(const CircuitSpec& spec) {
    const int nodes_with_ground = spec.node_count + 1;
    const int branches = static_cast<int>(spec.elements.size());
    return {branches - nodes_with_ground + 1, nodes_with_ground - 1, ConstraintLaw::kvl};
}

EffectiveParams effective_params(const CircuitModel& model, int k) {
    if (k < 0 || k >= model.n_dof) {
        throw InputError("DOF index out of range");
    }
    const double c = model.cmat(k, k);
    const double li = model.linv(k, k);
    if (!(c > 0.0) || !(li > 0.0)) {
        throw InputError("DOF " + std::to_string(k + 1) + " has no capacitance or inductance on its diagonal");
    }
    const double l = 1.0 / li;
    return {l, c, std::sqrt(l / c)};
}

}  // namespace khsim
