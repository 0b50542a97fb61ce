#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "khsim/topology.hpp"

namespace khsim {

struct JunctionTerm {
    int dof = 0;
    double critical_current = 0.0;
    double k_j = 0.0;

    [[nodiscard]] double josephson_energy() const { return critical_current / k_j; }
    [[nodiscard]] double josephson_inductance() const { return 1.0 / (critical_current * k_j); }
};

// x' = m x + g(x) with x = (q_1..q_N, phi_1..phi_N); each junction adds
// -I_c0 sin(k_J phi_k) to q'_k.
struct FirstOrderSystem {
    int n_dof = 0;
    Eigen::MatrixXd m;
    Eigen::MatrixXd cinv;
    Eigen::MatrixXd linv;
    Eigen::MatrixXd rinv;
    std::vector<JunctionTerm> junctions;
    std::vector<std::string> warnings;

    [[nodiscard]] bool is_linear() const { return junctions.empty(); }
};

[[nodiscard]] FirstOrderSystem build_system(const CircuitModel& model, double k_j);

// Junctions replaced by their Josephson inductance L_J = 1/(I_c0 k_J).
[[nodiscard]] FirstOrderSystem linearized(const FirstOrderSystem& sys);

struct ClassicalState {
    Eigen::VectorXd q;
    Eigen::VectorXd phi;
    double t = 0.0;

    [[nodiscard]] Eigen::VectorXd stacked() const;
    static ClassicalState from_stacked(const Eigen::VectorXd& x, double t);
};

[[nodiscard]] Eigen::VectorXd classical_rhs(const FirstOrderSystem& sys, const Eigen::VectorXd& x);
[[nodiscard]] ClassicalState classical_rhs(const FirstOrderSystem& sys, const ClassicalState& x);

// Fixed-step RK4, round(t_end/dt) steps; the t = 0 state and every
// sample_every-th step are returned.
[[nodiscard]] std::vector<ClassicalState> integrate_classical(const FirstOrderSystem& sys, const ClassicalState& x0,
                                                              double dt, double t_end, int sample_every = 1);

struct Mode {
    double damping = 0.0;            // -Re s
    double angular_frequency = 0.0;  // Im s >= 0
    bool overdamped = false;         // real eigenvalue
};

struct EigenReport {
    std::vector<std::complex<double>> eigenvalues;  // sorted by |Im s|, then Re s
    std::vector<Mode> modes;
};

[[nodiscard]] EigenReport eigenfrequencies(const FirstOrderSystem& sys);

struct EnergyDissipation {
    double energy = 0.0;
    double dissipation = 0.0;
};

[[nodiscard]] EnergyDissipation energy_and_dissipation(const FirstOrderSystem& sys, const Eigen::VectorXd& x);

// T_min / 200 with T_min the shortest per-DOF linearized period
// 2 pi sqrt(C~_k L~_k), junctions counted through L_J.
[[nodiscard]] double auto_time_step(const CircuitModel& model, const FirstOrderSystem& sys);

}  // namespace khsim
