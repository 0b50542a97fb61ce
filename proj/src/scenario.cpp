#include "khsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace khsim {

namespace {

// Re-throws with the pipeline stage prepended, keeping the error category.
template <typename F>
auto staged(const char* stage, F&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(stage) + ": " + e.what());
    } catch (const InputError& e) {
        throw InputError(std::string(stage) + ": " + e.what());
    }
}

int dof_of(const CircuitModel& model, const std::string& label) {
    for (int k = 0; k < model.n_dof; ++k) {
        if (model.node_names[static_cast<std::size_t>(k)] == label) {
            return k;
        }
    }
    throw InputError("no node labelled '" + label + "'");
}

}  // namespace

PreparedRun prepare_run(const CircuitSpec& input, const RunConfig& config, const PhysicalConstants& constants) {
    if (!(config.t_end > 0.0)) {
        throw InputError("config: t_end must be positive");
    }
    PreparedRun run;
    run.spec = input;
    run.model = staged("assemble", [&] { return assemble_matrices(run.spec); });
    for (const int node : detect_singular_capacitance(run.model)) {
        const double value = config.aux_capacitance ? *config.aux_capacitance : default_auxiliary_capacitance(run.spec);
        run.spec = staged("auxiliary", [&] {
            return insert_auxiliary_capacitor(run.spec, node, value, config.aux_placement);
        });
        run.warnings.push_back("node " + run.spec.label(node) + " has no capacitance; inserted auxiliary capacitor " +
                               run.spec.elements.back().name + " = " + format_double(value) + " F");
    }
    if (!run.warnings.empty()) {
        run.model = staged("assemble", [&] { return assemble_matrices(run.spec); });
    }
    const double k_j = config.k_j.value_or(constants.k_j());
    run.sys = staged("system", [&] { return build_system(run.model, k_j); });
    run.warnings.insert(run.warnings.end(), run.sys.warnings.begin(), run.sys.warnings.end());

    run.method = config.method;
    if (run.method == RunMethod::automatic) {
        run.method = run.sys.is_linear() ? RunMethod::linear_propagator : RunMethod::rk4_full;
    }
    if (run.method == RunMethod::linear_propagator && !run.sys.is_linear()) {
        throw InputError("config: method linear-propagator is not valid for a circuit with junctions");
    }
    run.dt = config.dt ? *config.dt : staged("time step", [&] { return auto_time_step(run.model, run.sys); });

    FockSpec fock;
    if (config.dims.empty()) {
        fock.dims.assign(static_cast<std::size_t>(run.model.n_dof), 3);
    } else if (config.dims.size() == 1) {
        fock.dims.assign(static_cast<std::size_t>(run.model.n_dof), config.dims.front());
    } else {
        fock.dims = config.dims;
    }
    std::vector<InitialAmplitudes> amps(static_cast<std::size_t>(run.model.n_dof));
    for (const auto& [label, amp] : config.initial) {
        amps[static_cast<std::size_t>(staged("config", [&] { return dof_of(run.model, label); }))] = amp;
    }
    WorkspaceOptions wopt;
    wopt.basis = config.zero_point;
    wopt.k_j = k_j;
    wopt.excitation_scale = config.excitation_scale;
    run.ws = staged("quantize", [&] { return make_workspace(run.model, constants, fock, amps, wopt); });

    if (config.t_ref) {
        run.t_ref = *config.t_ref;
    } else {
        double li = run.model.branch_inverse_inductance(0);
        for (const auto& j : run.sys.junctions) {
            if (j.dof == 0) {
                li += 1.0 / j.josephson_inductance();
            }
        }
        const double c = run.model.branch_capacitance(0);
        run.t_ref = li > 0.0 && c > 0.0 ? 2.0 * std::numbers::pi * std::sqrt(c / li) : 1.0;
    }

    if (config.sync_pair) {
        run.sync_pair = staged("config", [&] {
            return std::pair{dof_of(run.model, config.sync_pair->first), dof_of(run.model, config.sync_pair->second)};
        });
    } else {
        int last = run.model.n_dof - 1;
        while (last > 0 && std::find(run.model.auxiliary_nodes.begin(), run.model.auxiliary_nodes.end(), last + 1) !=
                               run.model.auxiliary_nodes.end()) {
            --last;
        }
        run.sync_pair = {0, last};
    }
    return run;
}

TimeSeries classical_series(const FirstOrderSystem& sys, const QuantumWorkspace& ws, double dt, double t_end,
                            int sample_every, double t_ref) {
    if (sample_every < 1) {
        throw InputError("sample_every must be at least 1");
    }
    const int n = sys.n_dof;
    ClassicalState x0;
    x0.q.resize(n);
    x0.phi.resize(n);
    for (int k = 0; k < n; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        x0.q(k) = expectation_value(ws.state, ws.initial.q[ku]);
        x0.phi(k) = expectation_value(ws.state, ws.initial.phi[ku]);
    }
    const auto traj = integrate_classical(sys, x0, dt, t_end, sample_every);
    TimeSeries s;
    s.labels = ws.labels;
    s.t_ref = t_ref;
    s.charge.assign(static_cast<std::size_t>(n), {});
    s.flux.assign(static_cast<std::size_t>(n), {});
    for (const auto& sc : ws.scales) {
        s.charge_scale.push_back(sc.charge);
        s.flux_scale.push_back(sc.flux);
    }
    for (const auto& st : traj) {
        s.times.push_back(st.t);
        for (int k = 0; k < n; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            s.charge[ku].push_back(st.q(k) / ws.scales[ku].charge);
            s.flux[ku].push_back(st.phi(k) / ws.scales[ku].flux);
        }
        const auto ed = energy_and_dissipation(sys, st.stacked());
        s.energy.push_back(ed.energy);
        s.dissipation.push_back(ed.dissipation);
    }
    return s;
}

TimeSeries integrate(const PreparedRun& run, double t_end, int sample_every, bool diagnostics) {
    if (run.method == RunMethod::classical) {
        return staged("integrate", [&] {
            return classical_series(run.sys, run.ws, run.dt, t_end, sample_every, run.t_ref);
        });
    }
    IntegrationOptions opt;
    opt.dt = run.dt;
    opt.t_end = t_end;
    opt.method = run.method == RunMethod::linear_propagator ? QuantumMethod::linear_propagator : QuantumMethod::rk4_full;
    opt.sample_every = sample_every;
    opt.diagnostics = diagnostics;
    opt.t_ref = run.t_ref;
    return staged("integrate", [&] { return integrate_quantum(run.ws, run.sys, opt); });
}

ScenarioResult run_scenario(const CircuitSpec& spec, const RunConfig& config, const PhysicalConstants& constants) {
    ScenarioResult result;
    result.run = prepare_run(spec, config, constants);
    result.warnings = result.run.warnings;
    result.eigen = staged("eigen", [&] { return eigenfrequencies(linearized(result.run.sys)); });
    result.series = integrate(result.run, config.t_end, config.sample_every, config.diagnostics);
    if (result.run.sync_pair.first != result.run.sync_pair.second) {
        try {
            result.sync = sync_report(result.series, result.run.sync_pair, config.tolerances);
        } catch (const InputError& e) {
            result.warnings.push_back(std::string("analyze: ") + e.what());
        }
    }
    return result;
}

ScenarioResult run_scenario(std::string_view netlist, const RunConfig& config, const PhysicalConstants& constants) {
    const CircuitSpec spec = staged("parse", [&] { return parse_netlist(netlist); });
    return run_scenario(spec, config, constants);
}

}  // namespace khsim
