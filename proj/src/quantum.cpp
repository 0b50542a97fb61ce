#include "khsim/quantum.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

namespace khsim {

namespace {

using Stack = std::vector<CMatrix>;

double hermiticity_defect(const CMatrix& op) {
    const double norm = op.norm();
    return norm == 0.0 ? 0.0 : (op - op.adjoint()).norm() / norm;
}

CMatrix hermitian_function(const CMatrix& op, double k_j, double (*fn)(double)) {
    if (hermiticity_defect(op) > 1e-10) {
        throw NumericalError("matrix function needs a Hermitian argument");
    }
    const CMatrix sym = 0.5 * (op + op.adjoint());
    const Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("Hermitian eigendecomposition failed");
    }
    const Eigen::VectorXd lam = solver.eigenvalues().unaryExpr([&](double x) { return fn(k_j * x); });
    const CMatrix& u = solver.eigenvectors();
    return u * lam.cast<std::complex<double>>().asDiagonal() * u.adjoint();
}

Stack to_stack(const OperatorSet& ops) {
    Stack s = ops.q;
    s.insert(s.end(), ops.phi.begin(), ops.phi.end());
    return s;
}

OperatorSet from_stack(Stack s) {
    const auto n = static_cast<std::ptrdiff_t>(s.size() / 2);
    OperatorSet ops;
    ops.q.assign(std::make_move_iterator(s.begin()), std::make_move_iterator(s.begin() + n));
    ops.phi.assign(std::make_move_iterator(s.begin() + n), std::make_move_iterator(s.end()));
    return ops;
}

Stack rhs(const FirstOrderSystem& sys, const Stack& x) {
    const int dim = 2 * sys.n_dof;
    const auto d = x.front().rows();
    Stack out(static_cast<std::size_t>(dim), CMatrix::Zero(d, d));
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            const double c = sys.m(i, j);
            if (c != 0.0) {
                out[static_cast<std::size_t>(i)] += c * x[static_cast<std::size_t>(j)];
            }
        }
    }
    for (const auto& jn : sys.junctions) {
        out[static_cast<std::size_t>(jn.dof)] -=
            jn.critical_current * matrix_sine(x[static_cast<std::size_t>(sys.n_dof + jn.dof)], jn.k_j);
    }
    return out;
}

// axpy over stacks: a + s * b
Stack combine(const Stack& a, double s, const Stack& b) {
    Stack out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + s * b[i];
    }
    return out;
}

// Indices of basis states with no DOF in its top Fock level.
std::vector<Eigen::Index> untruncated_indices(const FockSpec& fock) {
    std::vector<Eigen::Index> idx;
    const int total = fock.total();
    for (int i = 0; i < total; ++i) {
        int rest = i;
        bool keep = true;
        for (auto k = fock.dims.size(); k-- > 0;) {
            const int level = rest % fock.dims[k];
            rest /= fock.dims[k];
            if (level == fock.dims[k] - 1) {
                keep = false;
            }
        }
        if (keep) {
            idx.push_back(i);
        }
    }
    return idx;
}

CMatrix compress(const CMatrix& op, const std::vector<Eigen::Index>& idx) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    CMatrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out(i, j) = op(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

// Accumulates traces and diagnostics sample by sample.
class Recorder {
public:
    Recorder(const QuantumWorkspace& ws, const FirstOrderSystem* sys, bool diagnostics, double t_ref)
        : ws_(ws), sys_(sys), diagnostics_(diagnostics), keep_(untruncated_indices(ws.fock)) {
        const int n = static_cast<int>(ws.scales.size());
        series_.labels = ws.labels;
        series_.charge.assign(static_cast<std::size_t>(n), {});
        series_.flux.assign(static_cast<std::size_t>(n), {});
        for (const auto& s : ws.scales) {
            series_.charge_scale.push_back(s.charge);
            series_.flux_scale.push_back(s.flux);
        }
        series_.t_ref = t_ref;
        if (diagnostics_) {
            series_.max_hermiticity_defect = 0.0;
            series_.max_commutator_defect = 0.0;
            series_.max_projected_commutator_defect = 0.0;
            for (int k = 0; k < n; ++k) {
                const CMatrix c = commutator(ws.initial.phi[static_cast<std::size_t>(k)],
                                             ws.initial.q[static_cast<std::size_t>(k)]);
                comm0_.push_back(c);
                comm0_projected_.push_back(compress(c, keep_));
            }
        }
    }

    void record(double t, const Stack& x) {
        const int n = static_cast<int>(ws_.scales.size());
        series_.times.push_back(t);
        for (int k = 0; k < n; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            series_.charge[ku].push_back(expectation_value(ws_.state, x[ku]) / ws_.scales[ku].charge);
            series_.flux[ku].push_back(expectation_value(ws_.state, x[ku + static_cast<std::size_t>(n)]) /
                                       ws_.scales[ku].flux);
        }
        if (sys_ != nullptr) {
            record_energy(x);
        }
        if (diagnostics_) {
            for (const auto& op : x) {
                series_.max_hermiticity_defect = std::max(series_.max_hermiticity_defect, hermiticity_defect(op));
            }
            for (int k = 0; k < n; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                const CMatrix c = commutator(x[ku + static_cast<std::size_t>(n)], x[ku]);
                series_.max_commutator_defect =
                    std::max(series_.max_commutator_defect, (c - comm0_[ku]).norm() / comm0_[ku].norm());
                if (!keep_.empty()) {
                    series_.max_projected_commutator_defect =
                        std::max(series_.max_projected_commutator_defect,
                                 (compress(c, keep_) - comm0_projected_[ku]).norm() / comm0_projected_[ku].norm());
                }
            }
        }
    }

    TimeSeries take() { return std::move(series_); }

private:
    static CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

    void record_energy(const Stack& x) {
        const int n = sys_->n_dof;
        std::vector<CVector> v;
        v.reserve(x.size());
        for (const auto& op : x) {
            v.push_back(op * ws_.state);
        }
        // <X_i X_j> = (X_i psi)^dagger (X_j psi) for Hermitian X_i
        const auto second = [&](int i, int j) {
            return v[static_cast<std::size_t>(i)].dot(v[static_cast<std::size_t>(j)]).real();
        };
        const Eigen::MatrixXd diss = sys_->cinv * sys_->rinv * sys_->cinv;
        double e = 0.0;
        double d = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double qq = second(i, j);
                e += 0.5 * sys_->cinv(i, j) * qq;
                d += 0.5 * diss(i, j) * qq;
                if (sys_->linv(i, j) != 0.0) {
                    e += 0.5 * sys_->linv(i, j) * second(n + i, n + j);
                }
            }
        }
        for (const auto& jn : sys_->junctions) {
            const CMatrix c = matrix_cosine(x[static_cast<std::size_t>(n + jn.dof)], jn.k_j);
            e += jn.josephson_energy() * (1.0 - expectation_value(ws_.state, c));
        }
        series_.energy.push_back(e);
        series_.dissipation.push_back(d);
    }

    const QuantumWorkspace& ws_;
    const FirstOrderSystem* sys_;
    bool diagnostics_;
    std::vector<Eigen::Index> keep_;
    std::vector<CMatrix> comm0_;
    std::vector<CMatrix> comm0_projected_;
    TimeSeries series_;
};

TimeSeries run_rk4(const QuantumWorkspace& ws, const FirstOrderSystem& sys, const IntegrationOptions& opt,
                   long long steps) {
    Recorder rec(ws, &sys, opt.diagnostics, opt.t_ref);
    Stack x = to_stack(ws.initial);
    const double dt = opt.dt;
    rec.record(0.0, x);
    for (long long i = 1; i <= steps; ++i) {
        const Stack k1 = rhs(sys, x);
        const Stack k2 = rhs(sys, combine(x, 0.5 * dt, k1));
        const Stack k3 = rhs(sys, combine(x, 0.5 * dt, k2));
        const Stack k4 = rhs(sys, combine(x, dt, k3));
        for (std::size_t j = 0; j < x.size(); ++j) {
            x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if (i % opt.sample_every == 0) {
            for (const auto& op : x) {
                if (!op.allFinite()) {
                    throw NumericalError("operator matrices became non-finite at step " + std::to_string(i));
                }
            }
            rec.record(static_cast<double>(i) * dt, x);
        }
    }
    return rec.take();
}

// Operators stay in the span of the initial ones: X(t) = P(t) X(0) with
// P(t) = exp(m t). The step exponential is taken in zero-point units where
// the entries of m are of comparable size.
TimeSeries run_propagator(const QuantumWorkspace& ws, const FirstOrderSystem& sys, const IntegrationOptions& opt,
                          long long steps) {
    const int n = sys.n_dof;
    Eigen::VectorXd s(2 * n);
    for (int k = 0; k < n; ++k) {
        s(k) = ws.scales[static_cast<std::size_t>(k)].charge;
        s(n + k) = ws.scales[static_cast<std::size_t>(k)].flux;
    }
    const Eigen::MatrixXd mn = s.cwiseInverse().asDiagonal() * sys.m * s.asDiagonal();
    const Eigen::MatrixXd step = (mn * opt.dt).exp();
    if (!step.allFinite()) {
        throw NumericalError("matrix exponential is non-finite");
    }

    const Stack x0 = to_stack(ws.initial);
    Recorder rec(ws, &sys, opt.diagnostics, opt.t_ref);
    Eigen::MatrixXd pn = Eigen::MatrixXd::Identity(2 * n, 2 * n);

    const auto operators = [&](const Eigen::MatrixXd& p) {
        Stack x(x0.size(), CMatrix::Zero(x0.front().rows(), x0.front().cols()));
        for (int i = 0; i < 2 * n; ++i) {
            for (int j = 0; j < 2 * n; ++j) {
                if (p(i, j) != 0.0) {
                    x[static_cast<std::size_t>(i)] += p(i, j) * x0[static_cast<std::size_t>(j)];
                }
            }
        }
        return x;
    };

    rec.record(0.0, x0);
    for (long long i = 1; i <= steps; ++i) {
        pn = step * pn;
        if (i % opt.sample_every == 0) {
            if (!pn.allFinite()) {
                throw NumericalError("propagator became non-finite at step " + std::to_string(i));
            }
            const Eigen::MatrixXd p = s.asDiagonal() * pn * s.cwiseInverse().asDiagonal();
            rec.record(static_cast<double>(i) * opt.dt, operators(p));
        }
    }
    return rec.take();
}

}  // namespace

double PhysicalConstants::k_j() const {
    return 2.0 * std::numbers::pi / flux_quantum();
}

int FockSpec::total() const {
    int d = 1;
    for (int n : dims) {
        d *= n;
    }
    return d;
}

void FockSpec::validate(int n_dof) const {
    if (static_cast<int>(dims.size()) != n_dof) {
        throw InputError("need one Fock dimension per DOF (" + std::to_string(n_dof) + "), got " +
                         std::to_string(dims.size()));
    }
    for (int n : dims) {
        if (n < 2) {
            throw InputError("Fock dimensions must be at least 2");
        }
    }
    if (total() > 4096) {
        throw InputError("total Hilbert dimension " + std::to_string(total()) + " is too large");
    }
}

CMatrix annihilation(int n) {
    if (n < 2) {
        throw InputError("annihilation operator needs n >= 2");
    }
    CMatrix a = CMatrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        a(i, i + 1) = std::sqrt(static_cast<double>(i + 1));
    }
    return a;
}

CMatrix embed_operator(const CMatrix& op, int k, const FockSpec& fock) {
    if (k < 0 || k >= static_cast<int>(fock.dims.size())) {
        throw InputError("embedding slot out of range");
    }
    if (op.rows() != fock.dims[static_cast<std::size_t>(k)] || op.cols() != op.rows()) {
        throw InputError("operator dimension does not match slot " + std::to_string(k));
    }
    CMatrix out = CMatrix::Identity(1, 1);
    for (int j = 0; j < static_cast<int>(fock.dims.size()); ++j) {
        const auto nj = fock.dims[static_cast<std::size_t>(j)];
        const CMatrix factor = j == k ? op : CMatrix::Identity(nj, nj);
        CMatrix next(out.rows() * factor.rows(), out.cols() * factor.cols());
        for (Eigen::Index r = 0; r < out.rows(); ++r) {
            for (Eigen::Index c = 0; c < out.cols(); ++c) {
                next.block(r * factor.rows(), c * factor.cols(), factor.rows(), factor.cols()) = out(r, c) * factor;
            }
        }
        out = std::move(next);
    }
    return out;
}

ZeroPointScale zero_point_scales(const CircuitModel& model, const PhysicalConstants& constants, int k,
                                 ZeroPointBasis basis, std::optional<double> k_j) {
    if (k < 0 || k >= model.n_dof) {
        throw InputError("DOF index out of range");
    }
    double c = 0.0;
    double li = 0.0;
    if (basis == ZeroPointBasis::coupled) {
        c = model.cmat(k, k);
        li = model.linv(k, k);
    } else {
        c = model.branch_capacitance(k);
        li = model.branch_inverse_inductance(k);
    }
    if (const auto* j = model.junction_at(k)) {
        // L_J = 1/(I_c0 k_J); a junction alone replaces L~ by L_J
        li += j->critical_current * k_j.value_or(constants.k_j());
    }
    if (!(c > 0.0) || !(li > 0.0)) {
        throw InputError("DOF " + std::to_string(k + 1) + " has a non-positive zero-point impedance");
    }
    const double z = std::sqrt(1.0 / (li * c));
    const double q0 = std::sqrt(constants.hbar / (2.0 * z));
    return {q0, z * q0, z};
}

CVector build_initial_state(const std::vector<InitialAmplitudes>& amplitudes, const FockSpec& fock) {
    if (amplitudes.size() != fock.dims.size()) {
        throw InputError("need one initial amplitude pair per DOF");
    }
    CVector psi = CVector::Ones(1);
    for (std::size_t k = 0; k < amplitudes.size(); ++k) {
        const auto& [alpha, beta] = amplitudes[k];
        const double norm = std::sqrt(std::norm(alpha) + std::norm(beta));
        if (!(norm > 0.0)) {
            throw InputError("DOF " + std::to_string(k + 1) + " has alpha = beta = 0");
        }
        CVector local = CVector::Zero(fock.dims[k]);
        local(0) = alpha / norm;
        local(1) = beta / norm;
        CVector next(psi.size() * local.size());
        for (Eigen::Index i = 0; i < psi.size(); ++i) {
            next.segment(i * local.size(), local.size()) = psi(i) * local;
        }
        psi = std::move(next);
    }
    return psi;
}

CMatrix matrix_sine(const CMatrix& op, double k_j) {
    return hermitian_function(op, k_j, [](double x) { return std::sin(x); });
}

CMatrix matrix_cosine(const CMatrix& op, double k_j) {
    return hermitian_function(op, k_j, [](double x) { return std::cos(x); });
}

QuantumWorkspace make_workspace(const CircuitModel& model, const PhysicalConstants& constants, const FockSpec& fock,
                                const std::vector<InitialAmplitudes>& amplitudes, const WorkspaceOptions& options) {
    fock.validate(model.n_dof);
    if (!(options.excitation_scale > 0.0)) {
        throw InputError("excitation scale must be positive");
    }
    QuantumWorkspace ws;
    ws.fock = fock;
    ws.labels = model.node_names;
    ws.state = build_initial_state(amplitudes, fock);
    const std::complex<double> minus_i{0.0, -1.0};
    for (int k = 0; k < model.n_dof; ++k) {
        const auto sc = zero_point_scales(model, constants, k, options.basis, options.k_j);
        ws.scales.push_back(sc);
        const CMatrix a = annihilation(fock.dims[static_cast<std::size_t>(k)]);
        const CMatrix ad = a.adjoint();
        const double g = options.excitation_scale;
        ws.initial.q.push_back(embed_operator(g * sc.charge * minus_i * (a - ad), k, fock));
        ws.initial.phi.push_back(embed_operator(g * sc.flux * (a + ad), k, fock));
    }
    return ws;
}

OperatorSet quantum_rhs(const FirstOrderSystem& sys, const OperatorSet& ops) {
    if (static_cast<int>(ops.q.size()) != sys.n_dof || static_cast<int>(ops.phi.size()) != sys.n_dof) {
        throw InputError("operator count does not match the system");
    }
    const Stack x = to_stack(ops);
    for (const auto& op : x) {
        if (op.rows() != x.front().rows() || op.cols() != x.front().rows()) {
            throw InputError("operator dimensions differ");
        }
    }
    return from_stack(rhs(sys, x));
}

TimeSeries integrate_quantum(const QuantumWorkspace& ws, const FirstOrderSystem& sys,
                             const IntegrationOptions& options) {
    if (!(options.dt > 0.0) || !(options.t_end > 0.0)) {
        throw InputError("integration needs dt > 0 and t_end > 0");
    }
    if (options.sample_every < 1) {
        throw InputError("sample_every must be at least 1");
    }
    if (static_cast<int>(ws.scales.size()) != sys.n_dof) {
        throw InputError("workspace and system disagree on the number of DOFs");
    }
    const long long steps = std::llround(options.t_end / options.dt);
    if (steps < 1) {
        throw InputError("t_end is shorter than one time step");
    }
    if (options.method == QuantumMethod::linear_propagator) {
        if (!sys.is_linear()) {
            throw InputError("linear-propagator cannot integrate a circuit with junctions");
        }
        return run_propagator(ws, sys, options, steps);
    }
    return run_rk4(ws, sys, options, steps);
}

double expectation_value(const CVector& state, const CMatrix& op) {
    const std::complex<double> v = state.dot(op * state);
    const double scale = op.norm();
    if (std::abs(v.imag()) > 1e-9 * scale) {
        throw NumericalError("expectation value has an imaginary part; the operator lost Hermiticity");
    }
    return v.real();
}

TimeSeries expectation_traces(const QuantumWorkspace& ws, const std::vector<OperatorSnapshot>& history) {
    Recorder rec(ws, nullptr, false, 1.0);
    for (const auto& snap : history) {
        rec.record(snap.t, to_stack(snap.ops));
    }
    return rec.take();
}

namespace {

struct AuxBranch {
    int dof;
    double current_scale;
};

AuxBranch auxiliary_branch(const TimeSeries& series, const CircuitModel& model, const PhysicalConstants& constants) {
    if (model.auxiliary_nodes.empty()) {
        throw InputError("circuit has no auxiliary node");
    }
    const int dof = model.auxiliary_nodes.front() - 1;
    const double c = model.branch_capacitance(dof);
    const double li = model.branch_inverse_inductance(dof);
    if (!(c > 0.0) || !(li > 0.0)) {
        throw InputError("auxiliary branch has no LC resonance to normalize against");
    }
    if (dof >= series.n_dof()) {
        throw InputError("series does not cover the auxiliary DOF");
    }
    const double l = 1.0 / li;
    const double f = 1.0 / (2.0 * std::numbers::pi * std::sqrt(l * c));
    return {dof, std::sqrt(constants.h * f / (2.0 * l))};
}

}  // namespace

std::vector<double> auxiliary_current_trace(const TimeSeries& series, const FirstOrderSystem& sys,
                                            const CircuitModel& model, const PhysicalConstants& constants) {
    const auto [dof, i0] = auxiliary_branch(series, model, constants);
    if (model.junction_at(dof) != nullptr) {
        throw InputError("auxiliary DOF carries a junction");
    }
    const int n = sys.n_dof;
    std::vector<double> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        double current = 0.0;
        for (int j = 0; j < n; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            current += sys.m(dof, j) * series.charge[ju][i] * series.charge_scale[ju];
            current += sys.m(dof, n + j) * series.flux[ju][i] * series.flux_scale[ju];
        }
        out[i] = current / i0;
    }
    return out;
}

std::vector<double> auxiliary_current_fd(const TimeSeries& series, const CircuitModel& model,
                                         const PhysicalConstants& constants) {
    const auto [dof, i0] = auxiliary_branch(series, model, constants);
    const std::size_t n = series.size();
    if (n < 3) {
        throw InputError("need at least 3 samples for a finite difference");
    }
    const auto& q = series.charge[static_cast<std::size_t>(dof)];
    const double scale = series.charge_scale[static_cast<std::size_t>(dof)] / i0;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
        out[i] = scale * (q[hi] - q[lo]) / (series.times[hi] - series.times[lo]);
    }
    return out;
}

}  // namespace khsim
