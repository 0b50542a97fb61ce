#include "khsim/presets.hpp"

#include <cmath>

namespace khsim {

namespace {

constexpr double kPeriod = 0.2e-9;  // 1 / 5 GHz

std::string two_resonators(const char* r_local, const char* c2) {
    return std::string("# two RLC resonators, RLC coupler\n") +
           "C C1 1 0 1.01p\nL L1 1 0 1n\nR R1 1 0 " + r_local + "\n" +
           "C C12 1 2 20.26f\nL L12 1 2 10n\nR R12 1 2 4k\n" +
           "C C2 2 0 " + c2 + "\nL L2 2 0 1n\nR R2 2 0 " + r_local + "\n";
}

std::string pathological(const char* r12, const char* l23) {
    return std::string("# resonators coupled by a resistive strip with series inductance\n") +
           "C C1 1 0 1.01p\nL L1 1 0 1n\n" +
           "R R12 1 2 " + r12 + "\nL L23 2 3 " + l23 + "\n" +
           "C C3 3 0 1.01p\nL L3 3 0 1n\n";
}

RunConfig base_config(double periods, std::vector<int> dims, RunMethod method) {
    RunConfig cfg;
    cfg.t_end = periods * kPeriod;
    cfg.dt = kPeriod / 200.0;
    cfg.t_ref = kPeriod;
    cfg.method = method;
    cfg.dims = std::move(dims);
    cfg.zero_point = ZeroPointBasis::bare;
    cfg.initial["1"] = {{1.0, 0.0}, {1.0, 0.0}};
    return cfg;
}

Preset make_regime(bool second) {
    Preset p;
    p.name = second ? "regime2" : "regime1";
    p.description = second ? "detuned resonators (f_2r = 5050 MHz), high local loss"
                           : "resonant resonators, low local loss";
    p.netlist = second ? two_resonators("0.1571M", "0.99p") : two_resonators("15.71M", "1.01p");
    p.config = base_config(second ? 300.0 : 100.0, {3, 3}, RunMethod::rk4_full);
    p.config.sync_pair = std::pair{std::string("1"), std::string("2")};
    return p;
}

Preset make_transmons() {
    const auto tp = transmon_params(5e9, 50.0);
    Preset p;
    p.name = "transmons";
    p.description = "two transmons (f_ge = 5 GHz, E_J0/E_c = 50) coupled by a 4 kOhm resistor";
    p.netlist = "# two transmons, resistive coupler\n"
                "C Cq1 1 0 " + format_double(tp.capacitance) + "\n" +
                "J J1 1 0 " + format_double(tp.critical_current) + "\n" +
                "R R12 1 2 4k\n" +
                "C Cq2 2 0 " + format_double(tp.capacitance) + "\n" +
                "J J2 2 0 " + format_double(tp.critical_current) + "\n";
    p.config = base_config(20.0, {4, 4}, RunMethod::rk4_full);
    p.config.initial["2"] = {{0.2, 0.0}, {-0.8, 0.0}};
    p.config.sync_pair = std::pair{std::string("1"), std::string("2")};
    return p;
}

Preset make_pathological(char which) {
    Preset p;
    p.name = std::string("pathological-") + which;
    const bool e = which == 'e';
    p.netlist = e ? pathological("1k", "100n") : pathological("4k", "1n");
    p.config = base_config(e ? 800.0 : 100.0, {2, 2, 2}, RunMethod::linear_propagator);
    p.config.aux_capacitance = which == 'a' ? 1.01e-12 : 1.01e-15;
    p.config.sync_pair = std::pair{std::string("1"), std::string("3")};
    if (e) {
        p.config.initial["3"] = {{0.2, 0.0}, {-0.8, 0.0}};
        p.description = "R12 = 1 kOhm, L23 = 100 L1, C_aux = C1/1000, resonator 3 excited";
    } else {
        p.description = which == 'a' ? "R12 = 4 kOhm, L23 = L1, C_aux = C1" : "R12 = 4 kOhm, L23 = L1, C_aux = C1/1000";
    }
    return p;
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"regime1",        "regime2",        "transmons",
                                                "pathological-a", "pathological-c", "pathological-e"};
    return names;
}

Preset preset(std::string_view name) {
    if (name == "regime1") {
        return make_regime(false);
    }
    if (name == "regime2") {
        return make_regime(true);
    }
    if (name == "transmons") {
        return make_transmons();
    }
    if (name == "pathological-a" || name == "pathological-c" || name == "pathological-e") {
        return make_pathological(name.back());
    }
    throw InputError("unknown preset '" + std::string(name) + "'");
}

TransmonParams transmon_params(double f_ge, double ratio, const PhysicalConstants& constants) {
    if (!(f_ge > 0.0) || !(ratio > 0.0)) {
        throw InputError("transmon parameters must be positive");
    }
    const double e2 = constants.e_charge * constants.e_charge;
    TransmonParams tp;
    tp.capacitance = e2 * std::sqrt(2.0 * ratio) / (constants.h * f_ge);
    tp.charging_energy = e2 / (2.0 * tp.capacitance);
    tp.josephson_energy = ratio * tp.charging_energy;
    tp.critical_current = tp.josephson_energy * constants.k_j();
    tp.josephson_inductance = 1.0 / (tp.critical_current * constants.k_j());
    tp.impedance = std::sqrt(tp.josephson_inductance / tp.capacitance);
    return tp;
}

}  // namespace khsim
