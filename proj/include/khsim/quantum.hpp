#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "khsim/eom.hpp"
#include "khsim/timeseries.hpp"
#include "khsim/topology.hpp"

namespace khsim {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct PhysicalConstants {
    double hbar = 1.054571817e-34;
    double h = 6.62607015e-34;
    double e_charge = 1.602176634e-19;

    [[nodiscard]] double flux_quantum() const { return h / (2.0 * e_charge); }
    [[nodiscard]] double k_j() const;
};

struct FockSpec {
    std::vector<int> dims;

    [[nodiscard]] int total() const;
    void validate(int n_dof) const;
};

[[nodiscard]] CMatrix annihilation(int n);

// Kronecker product with op in slot k; slot 0 is the most significant factor.
[[nodiscard]] CMatrix embed_operator(const CMatrix& op, int k, const FockSpec& fock);

enum class ZeroPointBasis {
    coupled,  // Z~_k from the diagonals of cmat and linv
    bare,     // Z_k from the elements on the DOF's own branch
};

struct ZeroPointScale {
    double charge = 0.0;
    double flux = 0.0;
    double impedance = 0.0;
};

// Junction DOFs use L_J = 1/(I_c0 k_J) in place of (or in parallel with) the
// linear inductance.
[[nodiscard]] ZeroPointScale zero_point_scales(const CircuitModel& model, const PhysicalConstants& constants, int k,
                                               ZeroPointBasis basis = ZeroPointBasis::coupled,
                                               std::optional<double> k_j = std::nullopt);

struct InitialAmplitudes {
    std::complex<double> alpha{1.0, 0.0};
    std::complex<double> beta{0.0, 0.0};
};

[[nodiscard]] CVector build_initial_state(const std::vector<InitialAmplitudes>& amplitudes, const FockSpec& fock);

[[nodiscard]] CMatrix matrix_sine(const CMatrix& op, double k_j);
[[nodiscard]] CMatrix matrix_cosine(const CMatrix& op, double k_j);

// Physical-unit operator matrices, q then phi, one per DOF.
struct OperatorSet {
    std::vector<CMatrix> q;
    std::vector<CMatrix> phi;
};

struct QuantumWorkspace {
    FockSpec fock;
    OperatorSet initial;
    CVector state;
    std::vector<ZeroPointScale> scales;
    std::vector<std::string> labels;
};

struct WorkspaceOptions {
    ZeroPointBasis basis = ZeroPointBasis::coupled;
    std::optional<double> k_j;
    // Multiplies the initial operator matrices; 1 is the physical circuit.
    double excitation_scale = 1.0;
};

[[nodiscard]] QuantumWorkspace make_workspace(const CircuitModel& model, const PhysicalConstants& constants,
                                              const FockSpec& fock, const std::vector<InitialAmplitudes>& amplitudes,
                                              const WorkspaceOptions& options = {});

[[nodiscard]] OperatorSet quantum_rhs(const FirstOrderSystem& sys, const OperatorSet& ops);

enum class QuantumMethod { rk4_full, linear_propagator };

struct IntegrationOptions {
    double dt = 0.0;
    double t_end = 0.0;
    QuantumMethod method = QuantumMethod::rk4_full;
    int sample_every = 1;
    bool diagnostics = false;  // Hermiticity and commutator defects
    double t_ref = 1.0;
};

[[nodiscard]] TimeSeries integrate_quantum(const QuantumWorkspace& ws, const FirstOrderSystem& sys,
                                           const IntegrationOptions& options);

// Real part of <psi|op|psi>; throws NumericalError if the imaginary part
// exceeds 1e-9 relative to the operator scale.
[[nodiscard]] double expectation_value(const CVector& state, const CMatrix& op);

struct OperatorSnapshot {
    double t = 0.0;
    OperatorSet ops;
};

[[nodiscard]] TimeSeries expectation_traces(const QuantumWorkspace& ws, const std::vector<OperatorSnapshot>& history);

// <q'_aux>/I_0 from the charge row of the system matrix, with
// I_0 = sqrt(h f / 2L) for the auxiliary branch resonance f = 1/(2 pi sqrt(L C)).
[[nodiscard]] std::vector<double> auxiliary_current_trace(const TimeSeries& series, const FirstOrderSystem& sys,
                                                          const CircuitModel& model, const PhysicalConstants& constants);

// Same quantity by central differences of the auxiliary charge trace.
[[nodiscard]] std::vector<double> auxiliary_current_fd(const TimeSeries& series, const CircuitModel& model,
                                                       const PhysicalConstants& constants);

}  // namespace khsim
