#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "khsim/eom.hpp"
#include "khsim/presets.hpp"
#include "khsim/quantum.hpp"

using namespace khsim;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
const double kJ = PhysicalConstants{}.k_j();

FirstOrderSystem system_of(const std::string& netlist) {
    return build_system(assemble_matrices(parse_netlist(netlist)), kJ);
}

const char* kPureR = "C C1 1 0 1.01p\nL L1 1 0 1n\nR R12 1 2 4k\nC C2 2 0 1.01p\nL L2 2 0 1n\n";

}  // namespace

TEST_CASE("two-resonator coefficients follow the hand-derived equations") {
    const auto sys = system_of(preset("regime1").netlist);
    const double c1 = 1.01e-12, c2 = 1.01e-12, c12 = 20.26e-15;
    const double l1 = 1e-9, l2 = 1e-9, l12 = 10e-9;
    const double r1 = 15.71e6, r2 = 15.71e6, r12 = 4e3;
    const double ct1 = c1 + c12, ct2 = c2 + c12;
    const double det = ct1 * ct2 - c12 * c12;
    const double rt1 = 1.0 / (1.0 / r1 + 1.0 / r12), rt2 = 1.0 / (1.0 / r2 + 1.0 / r12);
    const double lt1 = 1.0 / (1.0 / l1 + 1.0 / l12), lt2 = 1.0 / (1.0 / l2 + 1.0 / l12);
    // q1' row
    CHECK(sys.m(0, 0) == Approx(-ct2 / (rt1 * det) + c12 / (r12 * det)).epsilon(1e-12));
    CHECK(sys.m(0, 1) == Approx(-c12 / (rt1 * det) + ct1 / (r12 * det)).epsilon(1e-12));
    CHECK(sys.m(0, 2) == Approx(-1.0 / lt1).epsilon(1e-12));
    CHECK(sys.m(0, 3) == Approx(1.0 / l12).epsilon(1e-12));
    // q2' row
    CHECK(sys.m(1, 0) == Approx(ct2 / (r12 * det) - c12 / (rt2 * det)).epsilon(1e-12));
    CHECK(sys.m(1, 1) == Approx(c12 / (r12 * det) - ct1 / (rt2 * det)).epsilon(1e-12));
    CHECK(sys.m(1, 2) == Approx(1.0 / l12).epsilon(1e-12));
    CHECK(sys.m(1, 3) == Approx(-1.0 / lt2).epsilon(1e-12));
    // phi' rows
    CHECK(sys.m(2, 0) == Approx(ct2 / det).epsilon(1e-12));
    CHECK(sys.m(2, 1) == Approx(c12 / det).epsilon(1e-12));
    CHECK(sys.m(3, 0) == Approx(c12 / det).epsilon(1e-12));
    CHECK(sys.m(3, 1) == Approx(ct1 / det).epsilon(1e-12));
    CHECK(sys.m.bottomRightCorner(2, 2).isZero(0.0));
}

TEST_CASE("single lossless resonator") {
    const auto sys = system_of("C C1 1 0 2p\nL L1 1 0 3n\n");
    CHECK(sys.m(0, 0) == 0.0);
    CHECK(sys.m(0, 1) == Approx(-1.0 / 3e-9));
    CHECK(sys.m(1, 0) == Approx(1.0 / 2e-12));
    CHECK(sys.m(1, 1) == 0.0);
}

TEST_CASE("auxiliary-circuit charge rows carry the resistor sign pattern") {
    auto spec = parse_netlist("C C1 1 0 1.01p\nL L1 1 0 1n\nR R12 1 2 4k\nL L23 2 3 1n\nC C3 3 0 1.01p\nL L3 3 0 1n\n");
    const double caux = 1.01e-15;
    const auto sys = build_system(assemble_matrices(insert_auxiliary_capacitor(spec, 2, caux)), kJ);
    const double c[3] = {1.01e-12, caux, 1.01e-12};
    // node 1 sits on one side of R12, the auxiliary DOF and node 3 on the other
    const double row_sign[3] = {-1.0, 1.0, 1.0};
    const double col_sign[3] = {1.0, -1.0, -1.0};
    for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) {
            const double expect = row_sign[k] * col_sign[l] / (4e3 * c[l]);
            CHECK(sys.m(k, l) == Approx(expect).epsilon(1e-12));
        }
        CHECK(sys.m(k, 3 + k) == Approx(-1e9).epsilon(1e-12));
    }
}

TEST_CASE("block structure and trace identity") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> val(0.5, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::string text = "C C1 1 0 " + format_double(val(rng)) + "p\nL L1 1 0 " + format_double(val(rng)) +
                                 "n\nR R1 1 0 " + format_double(val(rng)) + "k\nC C12 1 2 " +
                                 format_double(val(rng)) + "p\nR R12 1 2 " + format_double(val(rng)) + "k\nC C2 2 0 " +
                                 format_double(val(rng)) + "p\nL L2 2 0 " + format_double(val(rng)) + "n\n";
        const auto sys = system_of(text);
        const int n = sys.n_dof;
        CHECK((sys.m.bottomLeftCorner(n, n) - sys.cinv).isZero(0.0));
        CHECK(sys.m.bottomRightCorner(n, n).isZero(0.0));
        const double tr = (sys.rinv * sys.cinv).trace();
        CHECK(sys.m.trace() == Approx(-tr).epsilon(1e-12));
        CHECK(sys.m.trace() <= 0.0);
    }
}

TEST_CASE("classical_rhs") {
    const auto sys = system_of(preset("transmons").netlist);
    CHECK(classical_rhs(sys, Eigen::VectorXd::Zero(4)).isZero(0.0));
    const auto tp = transmon_params(5e9, 50.0);
    const double phi = 1e-4 / kJ;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
    x(2) = phi;
    CHECK(classical_rhs(sys, x)(0) == Approx(-phi / tp.josephson_inductance).epsilon(1e-8));
}

TEST_CASE("junction sharing a node with an inductor warns") {
    const auto sys = system_of("C C1 1 0 1p\nL L1 1 0 1n\nJ J1 1 0 1u\n");
    CHECK(sys.warnings.size() == 1);
    CHECK(system_of(preset("transmons").netlist).warnings.empty());
}

TEST_CASE("singular capacitance is rejected") {
    const auto model = assemble_matrices(
        parse_netlist("C C1 1 0 1.01p\nL L1 1 0 1n\nR R12 1 2 4k\nL L23 2 3 1n\nC C3 3 0 1.01p\nL L3 3 0 1n\n"));
    CHECK_THROWS_AS((void)build_system(model, kJ), InputError);
}

TEST_CASE("lossless LC against closed form") {
    const double c = 1.01e-12, l = 1e-9;
    const auto sys = system_of("C C1 1 0 1.01p\nL L1 1 0 1n\n");
    const double w = 1.0 / std::sqrt(l * c);
    const double period = 2 * kPi / w;
    const double q0 = 1e-18;
    ClassicalState x0{Eigen::VectorXd::Constant(1, q0), Eigen::VectorXd::Zero(1), 0.0};

    SUBCASE("dt = T/200 matches the exact RK4 recursion") {
        const double dt = period / 200;
        const auto traj = integrate_classical(sys, x0, dt, 10 * period);
        REQUIRE(traj.size() == 2001);
        // one RK4 step multiplies the complex amplitude by R(i w dt)
        const std::complex<double> z{0.0, w * dt};
        const std::complex<double> r = 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
        double worst = 0.0;
        double worst_exact = 0.0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const double expect = q0 * std::pow(r, static_cast<double>(i)).real();
            worst = std::max(worst, std::abs(traj[i].q(0) - expect) / q0);
            worst_exact = std::max(worst_exact, std::abs(traj[i].q(0) - q0 * std::cos(w * traj[i].t)) / q0);
        }
        CHECK(worst < 1e-8);
        // RK4 phase error is (w dt)^5 / 120 per step, 5.1e-7 after 2000 steps
        CHECK(worst_exact < 1e-6);
    }
    SUBCASE("dt = T/1000 reaches 1e-8 against cos") {
        const auto traj = integrate_classical(sys, x0, period / 1000, 10 * period);
        double worst = 0.0;
        for (const auto& s : traj) {
            worst = std::max(worst, std::abs(s.q(0) - q0 * std::cos(w * s.t)) / q0);
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("dissipative energy is non-increasing") {
    const auto sys = system_of(preset("regime2").netlist);
    ClassicalState x0{Eigen::Vector2d(1e-18, 0.0), Eigen::Vector2d(0.0, 1e-17), 0.0};
    const auto traj = integrate_classical(sys, x0, 1e-12, 5e-9);
    double prev = energy_and_dissipation(sys, traj.front().stacked()).energy;
    for (const auto& s : traj) {
        const double e = energy_and_dissipation(sys, s.stacked()).energy;
        CHECK(e <= prev * (1.0 + 1e-15));
        prev = e;
    }
}

TEST_CASE("pure-R pair settles into the parallel mode") {
    const auto sys = system_of(kPureR);
    const double w = 1.0 / std::sqrt(1e-9 * 1.01e-12);
    const double amp = 1e-16;
    ClassicalState x0{Eigen::Vector2d::Zero(), Eigen::Vector2d(amp, 0.0), 0.0};
    const double tau = 4e3 * 1.01e-12;
    const auto traj = integrate_classical(sys, x0, 1e-12, 12 * tau);
    double worst = 0.0;
    for (const auto& s : traj) {
        if (s.t > 10 * tau) {
            const double expect = 0.5 * amp * std::cos(w * s.t);
            worst = std::max({worst, std::abs(s.phi(0) - expect), std::abs(s.phi(1) - expect)});
        }
    }
    CHECK(worst < 1e-3 * amp);
}

TEST_CASE("first-order system equals the second-order flux equations") {
    const double c = 1.01e-12, l = 1e-9, r = 4e3;
    const auto sys = system_of(kPureR);
    const double dt = 1e-12;
    ClassicalState x0{Eigen::Vector2d::Zero(), Eigen::Vector2d(1e-16, 0.0), 0.0};
    const auto traj = integrate_classical(sys, x0, dt, 2e-9);
    // C phi1'' + (phi1' - phi2')/R + phi1/L = 0 and the mirror equation
    const auto f = [&](const Eigen::Vector4d& y) {
        Eigen::Vector4d d;
        d(0) = y(2);
        d(1) = y(3);
        d(2) = (-(y(2) - y(3)) / r - y(0) / l) / c;
        d(3) = (-(y(3) - y(2)) / r - y(1) / l) / c;
        return d;
    };
    Eigen::Vector4d y(1e-16, 0.0, 0.0, 0.0);
    double worst = 0.0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const Eigen::Vector4d k1 = f(y);
        const Eigen::Vector4d k2 = f(y + 0.5 * dt * k1);
        const Eigen::Vector4d k3 = f(y + 0.5 * dt * k2);
        const Eigen::Vector4d k4 = f(y + dt * k3);
        y += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        worst = std::max(worst, (traj[i].phi - y.head(2)).cwiseAbs().maxCoeff());
    }
    CHECK(worst / 1e-16 < 1e-8);
}

TEST_CASE("eigenfrequencies") {
    SUBCASE("pure-R coupling") {
        const auto report = eigenfrequencies(system_of(kPureR));
        REQUIRE(report.modes.size() == 2);
        const double wr = 1.0 / std::sqrt(1e-9 * 1.01e-12);
        const auto& par = report.modes[1].damping < report.modes[0].damping ? report.modes[1] : report.modes[0];
        const auto& sym = &par == &report.modes[0] ? report.modes[1] : report.modes[0];
        CHECK(std::abs(par.damping) < 1e-3 * par.angular_frequency);
        CHECK(par.angular_frequency == Approx(wr).epsilon(1e-9));
        CHECK(sym.damping == Approx(1.0 / (4e3 * 1.01e-12)).epsilon(0.01));
        CHECK(sym.angular_frequency == Approx(wr).epsilon(0.01));
    }
    SUBCASE("uncoupled lossless pair is degenerate") {
        const auto report = eigenfrequencies(system_of("C C1 1 0 1.01p\nL L1 1 0 1n\nC C2 2 0 1.01p\nL L2 2 0 1n\n"));
        const double wr = 1.0 / std::sqrt(1e-9 * 1.01e-12);
        REQUIRE(report.eigenvalues.size() == 4);
        for (const auto& s : report.eigenvalues) {
            CHECK(std::abs(s.real()) < 1e-9 * wr);
            CHECK(std::abs(s.imag()) == Approx(wr).epsilon(1e-12));
        }
    }
    SUBCASE("parallel RLC") {
        const double r = 50.0, l = 1e-9, c = 1e-12;
        const auto report = eigenfrequencies(system_of("C C 1 0 1p\nL L 1 0 1n\nR R 1 0 50\n"));
        const double a = 1.0 / (2 * r * c);
        REQUIRE(report.modes.size() == 1);
        CHECK(report.modes[0].damping == Approx(a).epsilon(1e-9));
        CHECK(report.modes[0].angular_frequency == Approx(std::sqrt(1.0 / (l * c) - a * a)).epsilon(1e-9));
    }
    SUBCASE("eigenvalues come in conjugate pairs") {
        const auto report = eigenfrequencies(system_of(preset("regime2").netlist));
        for (const auto& s : report.eigenvalues) {
            const bool found = std::any_of(report.eigenvalues.begin(), report.eigenvalues.end(), [&](auto o) {
                return std::abs(o - std::conj(s)) <= 1e-9 * std::abs(s);
            });
            CHECK(found);
        }
    }
    SUBCASE("junctions must be linearized first") {
        const auto sys = system_of(preset("transmons").netlist);
        CHECK_THROWS_AS((void)eigenfrequencies(sys), InputError);
        const auto report = eigenfrequencies(linearized(sys));
        CHECK(report.modes.size() == 2);
    }
}

TEST_CASE("random lossless circuits have imaginary spectra") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> val(0.5, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::string text;
        for (int n = 1; n <= 3; ++n) {
            text += "C Cg" + std::to_string(n) + " " + std::to_string(n) + " 0 " + format_double(val(rng)) + "p\n";
            text += "L Lg" + std::to_string(n) + " " + std::to_string(n) + " 0 " + format_double(val(rng)) + "n\n";
        }
        text += "C C12 1 2 " + format_double(val(rng)) + "p\nL L23 2 3 " + format_double(val(rng)) + "n\n";
        const auto report = eigenfrequencies(system_of(text));
        double max_re = 0.0, max_im = 0.0;
        for (const auto& s : report.eigenvalues) {
            max_re = std::max(max_re, std::abs(s.real()));
            max_im = std::max(max_im, std::abs(s.imag()));
        }
        CHECK(max_re < 1e-9 * max_im);
    }
}

TEST_CASE("energy and dissipation") {
    const auto sys = system_of(preset("regime1").netlist);
    const auto zero = energy_and_dissipation(sys, Eigen::VectorXd::Zero(4));
    CHECK(zero.energy == 0.0);
    CHECK(zero.dissipation == 0.0);

    SUBCASE("power balance along a trajectory") {
        const auto rsys = system_of(preset("regime2").netlist);
        ClassicalState x0{Eigen::Vector2d(1e-18, 0.0), Eigen::Vector2d::Zero(), 0.0};
        const double dt = 1e-13;
        const auto traj = integrate_classical(rsys, x0, dt, 1e-9);
        std::vector<double> e, d;
        for (const auto& s : traj) {
            const auto ed = energy_and_dissipation(rsys, s.stacked());
            e.push_back(ed.energy);
            d.push_back(ed.dissipation);
        }
        const double eps = 1e-2 * 2 * *std::max_element(d.begin(), d.end());
        double worst = 0.0;
        for (std::size_t i = 2; i + 2 < e.size(); ++i) {
            const double dedt = (-e[i + 2] + 8 * e[i + 1] - 8 * e[i - 1] + e[i - 2]) / (12 * dt);
            worst = std::max(worst, std::abs(dedt + 2 * d[i]) / std::max(std::abs(dedt), eps));
        }
        CHECK(worst < 1e-4);
    }
    SUBCASE("junction energy is quadratic for small flux") {
        const auto tsys = system_of(preset("transmons").netlist);
        const auto tp = transmon_params(5e9, 50.0);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
        x(2) = 1e-3 / kJ;
        const double expect = x(2) * x(2) / (2 * tp.josephson_inductance);
        CHECK(energy_and_dissipation(tsys, x).energy == Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("non-finite states are reported") {
    FirstOrderSystem sys;
    sys.n_dof = 1;
    sys.m = Eigen::Matrix2d::Zero();
    sys.m(0, 0) = 1e3;
    ClassicalState x0{Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Zero(1), 0.0};
    CHECK_THROWS_AS((void)integrate_classical(sys, x0, 1.0, 1000.0), NumericalError);
}

TEST_CASE("automatic time step") {
    const auto model = assemble_matrices(parse_netlist(preset("regime1").netlist));
    const auto sys = build_system(model, kJ);
    const double t1r = 2 * kPi * std::sqrt(1e-9 * 1.01e-12);
    CHECK(auto_time_step(model, sys) == Approx(t1r / 200).epsilon(1e-12));
    CHECK(auto_time_step(model, sys) == Approx(1e-12).epsilon(2e-3));

    const auto tmodel = assemble_matrices(parse_netlist(preset("transmons").netlist));
    CHECK(auto_time_step(tmodel, build_system(tmodel, kJ)) == Approx(0.2e-9 / 200).epsilon(1e-9));

    auto spec = parse_netlist("C C1 1 0 1.01p\nL L1 1 0 1n\nR R12 1 2 4k\nL L23 2 3 1n\nC C3 3 0 1.01p\nL L3 3 0 1n\n");
    const auto pmodel = assemble_matrices(insert_auxiliary_capacitor(spec, 2, 1.01e-15));
    const double t23 = 2 * kPi * std::sqrt(1e-9 * 1.01e-15);
    CHECK(auto_time_step(pmodel, build_system(pmodel, kJ)) == Approx(t23 / 200).epsilon(1e-12));
}
