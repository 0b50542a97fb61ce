#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "khsim/output.hpp"
#include "khsim/presets.hpp"
#include "khsim/scenario.hpp"

namespace fs = std::filesystem;
using namespace khsim;

namespace {

struct Options {
    std::string netlist;
    std::string config;
    std::string preset;
    std::string out = ".";
    std::string format = "csv";
    std::string t_end;
    std::string dt;
    std::string method;
    std::string sweep;
};

struct Job {
    std::string name;
    CircuitSpec spec;
    RunConfig config;
};

struct Sweep {
    std::string element;
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
};

Sweep parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    const auto c1 = text.find(':', eq);
    const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
    if (eq == std::string::npos || c2 == std::string::npos) {
        throw InputError("--sweep expects <element>=<start>:<stop>:<n>");
    }
    Sweep s;
    s.element = text.substr(0, eq);
    s.start = parse_value(text.substr(eq + 1, c1 - eq - 1));
    s.stop = parse_value(text.substr(c1 + 1, c2 - c1 - 1));
    try {
        s.count = std::stoi(text.substr(c2 + 1));
    } catch (const std::exception&) {
        throw InputError("--sweep point count is not an integer");
    }
    if (s.count < 1) {
        throw InputError("--sweep needs at least one point");
    }
    return s;
}

Job load_job(const Options& o) {
    Job job;
    std::string netlist_text;
    if (!o.preset.empty()) {
        if (!o.netlist.empty()) {
            throw InputError("give either --preset or --netlist, not both");
        }
        const Preset p = preset(o.preset);
        job.name = p.name;
        netlist_text = p.netlist;
        job.config = p.config;
    } else {
        if (o.netlist.empty()) {
            throw InputError("--netlist or --preset is required");
        }
        job.name = fs::path(o.netlist).stem().string();
        netlist_text = read_text_file(o.netlist);
    }
    if (!o.config.empty()) {
        job.config = load_config(o.config);
    } else if (o.preset.empty() && o.t_end.empty()) {
        throw InputError("--config or --t-end is required with --netlist");
    }
    try {
        job.spec = parse_netlist(netlist_text);
    } catch (const InputError& e) {
        throw InputError(std::string("parse: ") + e.what());
    }
    if (!o.t_end.empty()) {
        job.config.t_end = parse_value(o.t_end);
    }
    if (!o.dt.empty()) {
        if (o.dt == "auto") {
            job.config.dt.reset();
        } else {
            job.config.dt = parse_value(o.dt);
        }
    }
    if (!o.method.empty()) {
        job.config.method = parse_method(o.method);
    }
    if (o.out != ".") {
        job.config.output_dir = o.out;
    }
    return job;
}

void print_eigen(const EigenReport& report) {
    std::printf("eigenvalues (rad/s):\n");
    for (const auto& s : report.eigenvalues) {
        std::printf("  %+.9e %+.9ei\n", s.real(), s.imag());
    }
    std::printf("modes:\n");
    for (const auto& m : report.modes) {
        if (m.overdamped) {
            std::printf("  overdamped  alpha = %.6e 1/s\n", m.damping);
        } else {
            std::printf("  f = %.6f GHz  alpha = %.6e 1/s\n", m.angular_frequency / (2.0 * M_PI) / 1e9, m.damping);
        }
    }
}

void print_sync(const ScenarioResult& r) {
    if (!r.sync) {
        std::printf("sync: not available\n");
        return;
    }
    const auto& s = *r.sync;
    const auto& labels = r.series.labels;
    std::printf("sync pair: %s, %s\n", labels[static_cast<std::size_t>(r.run.sync_pair.first)].c_str(),
                labels[static_cast<std::size_t>(r.run.sync_pair.second)].c_str());
    std::printf("  strict_sync      %s\n", s.strict_sync ? "true" : "false");
    std::printf("  phase_sync       %s\n", s.phase_sync ? "true" : "false");
    std::printf("  transient_time   %.6e s (%.2f t_ref)\n", s.transient_time, s.transient_time / r.series.t_ref);
    std::printf("  phase_sync_time  %.6e s\n", s.phase_sync_time);
    std::printf("  steady amplitude %.6f, %.6f\n", s.steady_amplitudes[0], s.steady_amplitudes[1]);
    std::printf("  amplitude_ratio  %.6f\n", s.amplitude_ratio);
    std::printf("  phase_lag        %.6f rad\n", s.phase_lag);
    std::printf("  decay_rate       %.6e 1/s\n", s.decay_rate);
}

Metadata metadata_for(const Job& job, const ScenarioResult& r) {
    Metadata m;
    m["run"] = job.name;
    m["method"] = method_name(r.run.method);
    m["dt"] = format_double(r.run.dt);
    m["t_end"] = format_double(job.config.t_end);
    m["nodes"] = std::to_string(r.run.model.n_dof);
    return m;
}

void write_outputs(const Job& job, const ScenarioResult& r, const std::string& format, const std::string& stem) {
    fs::create_directories(job.config.output_dir);
    const fs::path base = fs::path(job.config.output_dir) / stem;
    if (format == "csv" || format == "both") {
        write_csv(r.series, base.string() + ".csv", metadata_for(job, r));
        std::printf("wrote %s.csv\n", base.string().c_str());
    }
    if (format == "svg" || format == "both") {
        write_svg(r.series, r.run.sync_pair, base.string() + ".svg", job.name);
        std::printf("wrote %s.svg\n", base.string().c_str());
    }
}

void warn(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) {
        std::cerr << "WARN: " << w << '\n';
    }
}

void run_single(const Job& job, const std::string& format) {
    const ScenarioResult r = run_scenario(job.spec, job.config);
    warn(r.warnings);
    std::printf("run %s: method %s, dt %.6g s, %zu samples\n", job.name.c_str(), method_name(r.run.method).c_str(),
                r.run.dt, r.series.size());
    print_sync(r);
    write_outputs(job, r, format, job.name);
}

void run_sweep(const Job& job, const Sweep& sweep, const std::string& format) {
    if (job.spec.find(sweep.element) == nullptr) {
        throw InputError("--sweep: no element named '" + sweep.element + "'");
    }
    std::vector<double> values;
    for (int i = 0; i < sweep.count; ++i) {
        values.push_back(sweep.count == 1 ? sweep.start
                                          : sweep.start + (sweep.stop - sweep.start) * i / (sweep.count - 1));
    }
    std::vector<std::optional<ScenarioResult>> results(values.size());
    std::vector<std::string> errors(values.size());
    std::vector<std::thread> workers;
    for (std::size_t i = 0; i < values.size(); ++i) {
        workers.emplace_back([&, i] {
            try {
                CircuitSpec spec = job.spec;
                for (auto& e : spec.elements) {
                    if (e.name == sweep.element) {
                        e.value = values[i];
                    }
                }
                results[i] = run_scenario(spec, job.config);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        });
    }
    for (auto& w : workers) {
        w.join();
    }

    fs::create_directories(job.config.output_dir);
    const std::string summary = (fs::path(job.config.output_dir) / (job.name + "_sweep.csv")).string();
    std::FILE* f = std::fopen(summary.c_str(), "w");
    if (f == nullptr) {
        throw InputError("cannot write '" + summary + "'");
    }
    std::fprintf(f, "%s,strict_sync,transient_time,phase_lag,amplitude_ratio,amp_a,amp_b,decay_rate,error\n",
                 sweep.element.c_str());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!results[i] || !results[i]->sync) {
            std::fprintf(f, "%.17g,,,,,,,,\"%s\"\n", values[i],
                         errors[i].empty() ? "no sync report" : errors[i].c_str());
            continue;
        }
        const auto& s = *results[i]->sync;
        std::fprintf(f, "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,\n", values[i], s.strict_sync ? 1 : 0,
                     s.transient_time, s.phase_lag, s.amplitude_ratio, s.steady_amplitudes[0], s.steady_amplitudes[1],
                     s.decay_rate);
        warn(results[i]->warnings);
        write_outputs(job, *results[i], format, job.name + "_" + std::to_string(i));
    }
    std::fclose(f);
    std::printf("wrote %s\n", summary.c_str());
}

void add_run_options(CLI::App* app, Options& o) {
    app->add_option("--netlist", o.netlist, "netlist file");
    app->add_option("--config", o.config, "run configuration file");
    app->add_option("--preset", o.preset, "built-in scenario");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--format", o.format, "csv, svg or both")->check(CLI::IsMember({"csv", "svg", "both"}));
    app->add_option("--t-end", o.t_end, "simulated time in seconds");
    app->add_option("--dt", o.dt, "time step (s) or auto");
    app->add_option("--method", o.method, "rk4-full, linear-propagator, classical or auto");
    app->add_option("--sweep", o.sweep, "<element>=<start>:<stop>:<n>, points run in parallel");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kirchhoff-Heisenberg circuit simulator"};
    app.require_subcommand(1);
    Options o;

    auto* run = app.add_subcommand("run", "simulate a netlist with a config file");
    add_run_options(run, o);
    auto* pre = app.add_subcommand("preset", "run a built-in scenario");
    pre->add_option("name", o.preset, "preset name")->required();
    add_run_options(pre, o);
    auto* list = app.add_subcommand("presets", "list built-in scenarios");
    auto* eig = app.add_subcommand("eigen", "complex eigenfrequencies of the linearized circuit");
    eig->add_option("--netlist", o.netlist, "netlist file");
    eig->add_option("--preset", o.preset, "built-in scenario");
    auto* cls = app.add_subcommand("classical", "classical (c-number) integration");
    add_run_options(cls, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (list->parsed()) {
            for (const auto& name : preset_names()) {
                std::printf("%-16s %s\n", name.c_str(), preset(name).description.c_str());
            }
            return 0;
        }
        if (eig->parsed()) {
            Options eo = o;
            eo.t_end = "1";
            const Job job = load_job(eo);
            const PreparedRun p = prepare_run(job.spec, job.config);
            warn(p.warnings);
            print_eigen(eigenfrequencies(linearized(p.sys)));
            return 0;
        }
        Job job = load_job(o);
        if (cls->parsed()) {
            job.config.method = RunMethod::classical;
        }
        if (!o.sweep.empty()) {
            run_sweep(job, parse_sweep(o.sweep), o.format);
        } else {
            run_single(job, o.format);
        }
        return 0;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
