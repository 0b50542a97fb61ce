#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "khsim/config.hpp"
#include "khsim/quantum.hpp"

namespace khsim {

struct Preset {
    std::string name;
    std::string description;
    std::string netlist;
    RunConfig config;
};

[[nodiscard]] const std::vector<std::string>& preset_names();
[[nodiscard]] Preset preset(std::string_view name);

// Transmon in terms of its transition frequency and E_J0/E_c ratio.
struct TransmonParams {
    double capacitance = 0.0;        // C_q = e^2 sqrt(2 ratio) / (h f_ge)
    double charging_energy = 0.0;    // E_c = e^2 / 2 C_q
    double josephson_energy = 0.0;   // E_J0 = ratio * E_c
    double critical_current = 0.0;   // I_c0 = E_J0 k_J
    double josephson_inductance = 0.0;
    double impedance = 0.0;          // sqrt(L_J / C_q)
};

[[nodiscard]] TransmonParams transmon_params(double f_ge, double ratio, const PhysicalConstants& constants = {});

}  // namespace khsim
