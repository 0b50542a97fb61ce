#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "khsim/analysis.hpp"
#include "khsim/config.hpp"
#include "khsim/eom.hpp"
#include "khsim/quantum.hpp"

namespace khsim {

// Everything up to, but excluding, time integration.
struct PreparedRun {
    CircuitSpec spec;  // after auxiliary insertion
    CircuitModel model;
    FirstOrderSystem sys;
    QuantumWorkspace ws;
    RunMethod method = RunMethod::rk4_full;  // resolved, never automatic
    double dt = 0.0;
    double t_ref = 0.0;
    std::pair<int, int> sync_pair{0, 1};
    std::vector<std::string> warnings;
};

struct ScenarioResult {
    PreparedRun run;
    TimeSeries series;
    std::optional<SyncReport> sync;
    std::optional<EigenReport> eigen;
    std::vector<std::string> warnings;
};

[[nodiscard]] PreparedRun prepare_run(const CircuitSpec& spec, const RunConfig& config,
                                      const PhysicalConstants& constants = {});

[[nodiscard]] ScenarioResult run_scenario(const CircuitSpec& spec, const RunConfig& config,
                                          const PhysicalConstants& constants = {});
[[nodiscard]] ScenarioResult run_scenario(std::string_view netlist, const RunConfig& config,
                                          const PhysicalConstants& constants = {});

// Classical RK4 from the initial expectation values, normalized with the
// workspace scales.
[[nodiscard]] TimeSeries classical_series(const FirstOrderSystem& sys, const QuantumWorkspace& ws, double dt,
                                          double t_end, int sample_every, double t_ref);

// Integration of a prepared run with its resolved method.
[[nodiscard]] TimeSeries integrate(const PreparedRun& run, double t_end, int sample_every, bool diagnostics);

}  // namespace khsim
