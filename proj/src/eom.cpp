#include "khsim/eom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace khsim {

FirstOrderSystem build_system(const CircuitModel& model, double k_j) {
    const int n = model.n_dof;
    for (int k : detect_singular_capacitance(model)) {
        throw InputError("capacitance matrix is singular at node " + model.node_names.at(k - 1) +
                         "; insert an auxiliary capacitor first");
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(model.cmat);
    if (!lu.isInvertible() || !(lu.rcond() > 1e-14)) {
        throw InputError("capacitance matrix is singular");
    }
    FirstOrderSystem sys;
    sys.n_dof = n;
    sys.cinv = lu.inverse();
    sys.cinv = 0.5 * (sys.cinv + sys.cinv.transpose()).eval();
    sys.linv = model.linv;
    sys.rinv = model.rinv;
    sys.m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    sys.m.topLeftCorner(n, n) = -sys.rinv * sys.cinv;
    sys.m.topRightCorner(n, n) = -sys.linv;
    sys.m.bottomLeftCorner(n, n) = sys.cinv;

    for (const auto& j : model.junctions) {
        if (!(k_j > 0.0)) {
            throw InputError("k_J must be positive");
        }
        sys.junctions.push_back({j.dof, j.critical_current, k_j});
        if (model.linv(j.dof, j.dof) != 0.0) {
            sys.warnings.push_back("junction '" + j.name + "' shares node " + model.node_names.at(j.dof) +
                                   " with a linear inductor; their currents add");
        }
    }
    return sys;
}

FirstOrderSystem linearized(const FirstOrderSystem& sys) {
    FirstOrderSystem out = sys;
    for (const auto& j : sys.junctions) {
        out.linv(j.dof, j.dof) += 1.0 / j.josephson_inductance();
        out.m(j.dof, sys.n_dof + j.dof) -= 1.0 / j.josephson_inductance();
    }
    out.junctions.clear();
    return out;
}

Eigen::VectorXd ClassicalState::stacked() const {
    Eigen::VectorXd x(q.size() + phi.size());
    x << q, phi;
    return x;
}

ClassicalState ClassicalState::from_stacked(const Eigen::VectorXd& x, double t) {
    const auto n = x.size() / 2;
    return {x.head(n), x.tail(n), t};
}

Eigen::VectorXd classical_rhs(const FirstOrderSystem& sys, const Eigen::VectorXd& x) {
    Eigen::VectorXd dx = sys.m * x;
    for (const auto& j : sys.junctions) {
        dx(j.dof) -= j.critical_current * std::sin(j.k_j * x(sys.n_dof + j.dof));
    }
    return dx;
}

ClassicalState classical_rhs(const FirstOrderSystem& sys, const ClassicalState& x) {
    return ClassicalState::from_stacked(classical_rhs(sys, x.stacked()), x.t);
}

std::vector<ClassicalState> integrate_classical(const FirstOrderSystem& sys, const ClassicalState& x0, double dt,
                                                double t_end, int sample_every) {
    if (!(dt > 0.0) || !(t_end >= 0.0)) {
        throw InputError("integration needs dt > 0 and t_end >= 0");
    }
    if (sample_every < 1) {
        throw InputError("sample_every must be at least 1");
    }
    const long long steps = std::llround(t_end / dt);
    std::vector<ClassicalState> out;
    out.reserve(static_cast<std::size_t>(steps / sample_every) + 1);
    Eigen::VectorXd x = x0.stacked();
    out.push_back(ClassicalState::from_stacked(x, x0.t));
    for (long long i = 0; i < steps; ++i) {
        const Eigen::VectorXd k1 = classical_rhs(sys, x);
        const Eigen::VectorXd k2 = classical_rhs(sys, x + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = classical_rhs(sys, x + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = classical_rhs(sys, x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite()) {
            throw NumericalError("classical state became non-finite at step " + std::to_string(i + 1));
        }
        if ((i + 1) % sample_every == 0) {
            out.push_back(ClassicalState::from_stacked(x, x0.t + static_cast<double>(i + 1) * dt));
        }
    }
    return out;
}

EigenReport eigenfrequencies(const FirstOrderSystem& sys) {
    if (!sys.is_linear()) {
        throw InputError("eigenfrequencies need a linear system; linearize junctions first");
    }
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(sys.m, false);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigenvalue computation did not converge");
    }
    EigenReport report;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        report.eigenvalues.push_back(solver.eigenvalues()(i));
    }
    std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  if (std::abs(a.imag()) != std::abs(b.imag())) {
                      return std::abs(a.imag()) < std::abs(b.imag());
                  }
                  if (a.real() != b.real()) {
                      return a.real() < b.real();
                  }
                  return a.imag() < b.imag();
              });
    double scale = 0.0;
    for (const auto& s : report.eigenvalues) {
        scale = std::max(scale, std::abs(s));
    }
    const double tol = 1e-9 * scale;
    for (const auto& s : report.eigenvalues) {
        if (std::abs(s.imag()) <= tol) {
            report.modes.push_back({-s.real(), 0.0, true});
        } else if (s.imag() > 0.0) {
            report.modes.push_back({-s.real(), s.imag(), false});
        }
    }
    return report;
}

EnergyDissipation energy_and_dissipation(const FirstOrderSystem& sys, const Eigen::VectorXd& x) {
    const int n = sys.n_dof;
    const Eigen::VectorXd q = x.head(n);
    const Eigen::VectorXd phi = x.tail(n);
    const Eigen::VectorXd phidot = sys.cinv * q;
    EnergyDissipation out;
    out.energy = 0.5 * q.dot(phidot) + 0.5 * phi.dot(sys.linv * phi);
    for (const auto& j : sys.junctions) {
        out.energy += j.josephson_energy() * (1.0 - std::cos(j.k_j * phi(j.dof)));
    }
    out.dissipation = 0.5 * phidot.dot(sys.rinv * phidot);
    return out;
}

double auto_time_step(const CircuitModel& model, const FirstOrderSystem& sys) {
    // bare branch resonances, so an auxiliary capacitor contributes its own
    double t_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < model.n_dof; ++k) {
        const double c = model.branch_capacitance(k);
        double li = model.branch_inverse_inductance(k);
        for (const auto& j : sys.junctions) {
            if (j.dof == k) {
                li += 1.0 / j.josephson_inductance();
            }
        }
        if (c > 0.0 && li > 0.0) {
            t_min = std::min(t_min, 2.0 * std::numbers::pi * std::sqrt(c / li));
        }
    }
    if (!std::isfinite(t_min)) {
        throw InputError("cannot choose a time step automatically: no DOF has both C and L");
    }
    return t_min / 200.0;
}

}  // namespace khsim
