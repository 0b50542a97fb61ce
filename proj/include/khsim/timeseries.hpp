#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace khsim {

// Normalized expectation traces, one column per DOF: charge[k][i] is
// <q_k(t_i)>/Q_k0 and flux[k][i] is <phi_k(t_i)>/Phi_k0.
struct TimeSeries {
    std::vector<std::string> labels;
    std::vector<double> times;
    std::vector<std::vector<double>> charge;
    std::vector<std::vector<double>> flux;
    std::vector<double> energy;       // J
    std::vector<double> dissipation;  // W
    std::vector<double> charge_scale;
    std::vector<double> flux_scale;
    double t_ref = 1.0;  // t_norm = t / t_ref

    double max_hermiticity_defect = std::numeric_limits<double>::quiet_NaN();
    double max_commutator_defect = std::numeric_limits<double>::quiet_NaN();
    double max_projected_commutator_defect = std::numeric_limits<double>::quiet_NaN();

    [[nodiscard]] std::size_t size() const { return times.size(); }
    [[nodiscard]] int n_dof() const { return static_cast<int>(charge.size()); }
};

}  // namespace khsim
