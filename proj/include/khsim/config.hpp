#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "khsim/analysis.hpp"
#include "khsim/quantum.hpp"
#include "khsim/topology.hpp"

namespace khsim {

enum class RunMethod { automatic, rk4_full, linear_propagator, classical };

[[nodiscard]] RunMethod parse_method(std::string_view text);
[[nodiscard]] std::string method_name(RunMethod method);

struct RunConfig {
    double t_end = 0.0;
    std::optional<double> dt;  // empty: T_min / 200
    RunMethod method = RunMethod::automatic;
    std::vector<int> dims;  // empty: 3 per DOF; one entry: applied to all
    std::map<std::string, InitialAmplitudes> initial;  // by node label; others start in vacuum
    std::optional<double> k_j;
    SyncTolerances tolerances;
    ZeroPointBasis zero_point = ZeroPointBasis::coupled;
    int sample_every = 1;
    std::optional<double> t_ref;  // default: bare branch period of DOF 1
    std::optional<double> aux_capacitance;
    AuxPlacement aux_placement = AuxPlacement::across_inductor;
    std::optional<std::pair<std::string, std::string>> sync_pair;  // node labels
    double excitation_scale = 1.0;
    bool diagnostics = false;
    std::string output_dir = ".";
};

// INI-like text: sections [sim] (required), [quantum], [initial.<node>],
// [tolerances]; `key = value`; `#` comments.
[[nodiscard]] RunConfig parse_config(std::string_view text);
[[nodiscard]] RunConfig load_config(const std::string& path);

// Signed real with optional engineering suffix.
[[nodiscard]] double parse_real(std::string_view text);
// `re,im` or a single real.
[[nodiscard]] std::complex<double> parse_complex(std::string_view text);

[[nodiscard]] std::string read_text_file(const std::string& path);

}  // namespace khsim
