#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rqsim/hilbert.hpp"

namespace rqsim {

// ---------------------------------------------------------------------------
// Gates and circuits.
//
// A Gate is primitive (carries a local unitary) or composite (carries an
// eagerly built expansion). Flattening a circuit yields primitives only.
// All angles are radians. Each composite's flattened product is tested
// against the exact propagator of its target generator.
// ---------------------------------------------------------------------------

enum class GateKind {
    // primitives
    Jc,             // exp(-i theta (sigma_- b^dag + sigma_+ b)) on (qubit, mode)
    Rz,             // exp(-i angle sigma_z / 2), sigma_z = +1 on ground
    Prx,            // R_phi(theta) = Rz(phi) Rx(theta) Rz(-phi)
    PauliX,         // sigma_x
    Hadamard,
    Cnot,           // sites = [control, target]
    Swap,
    Fswap,          // SWAP with a -1 on |11>
    Uzz,            // exp(-i theta sigma_z sigma_z)
    Uxx,            // exp(-i theta sigma_x sigma_x)
    Uhop,           // exp(-i theta (e^{i alpha} s+ s-' + h.c.))
    CondRotation,   // exp(-i beta sigma_z n) on (qubit, mode): dispersive gate
    CoherentError,  // diagonal ZZ/Kerr error on (qubit, mode)
    // composites
    PhasedJc,
    QrGate,
    LcGate,
    QuadXx,
    QuadZz,
    QuadHop,
    QuadChiral,
    RzViaPrx,
    AuxDisplacement,
    AuxRotation,
    AuxKerr,
};

enum class QrOrder { Forward, Backward };

struct Gate {
    GateKind kind;
    std::vector<int> sites;
    std::vector<double> params;
    std::vector<Gate> expansion;  // nonempty iff composite

    bool primitive() const { return expansion.empty(); }
};

const char* gate_name(GateKind k);
std::optional<GateKind> gate_kind_from_name(const std::string& name);

struct TrotterMeta {
    int step_index = 0;
    double tau = 0;
    int n_steps = 1;
    int order = 2;
};

struct Circuit {
    std::vector<Gate> gates;
    std::optional<TrotterMeta> trotter;
    // logical site index -> physical site index at circuit end (empty = identity)
    std::vector<int> final_permutation;

    void push(Gate g) { gates.push_back(std::move(g)); }
    void append(const Circuit& c) {
        gates.insert(gates.end(), c.gates.begin(), c.gates.end());
    }
};

// --- primitive constructors ------------------------------------------------

Gate jc_gate(int qubit, int mode, double theta);
Gate rz_gate(int qubit, double angle);
Gate prx_gate(int qubit, double theta, double phi);
Gate x_gate(int qubit);
Gate hadamard_gate(int qubit);
Gate cnot_gate(int control, int target);
Gate swap_gate(int q1, int q2);
Gate fswap_gate(int q1, int q2);
Gate uzz_gate(int q1, int q2, double theta);
Gate uxx_gate(int q1, int q2, double theta);
Gate uhop_gate(int q1, int q2, double theta, double alpha = 0.0);
Gate cond_rotation_gate(int qubit, int mode, double beta);
Gate coherent_error_gate(int qubit, int mode, double chi_t, double kerr_t);

// --- composite constructors ---------------------------------------------------

/// Rz(-phi) . JC(theta) . Rz(phi): generator sigma_- b^dag e^{i phi} + h.c.
Gate phased_jc(int qubit, int mode, double theta, double phi);

/// Two phased-JC gates with X conjugation; approximates
/// exp(-i theta sigma_x (b^dag e^{i phi} + b e^{-i phi})) with O(theta^2) defect.
/// Forward emits [phased-JC, X, phased-JC, X]; Backward the mirror.
Gate qr_gate(int qubit, int mode, double theta, double phi,
             QrOrder order = QrOrder::Forward);

/// Hadamard-conjugated QR: approximates exp(-i theta sigma_z (b^dag e^{i phi} + h.c.)).
Gate lc_gate(int qubit, int mode, double theta, double phi,
             QrOrder order = QrOrder::Forward);

enum class QuadKind { XX, ZZ, HoppingReal, HoppingChiral };

/// Two-spin system-boson couplings built around QR (XX/ZZ/HoppingReal) or
/// phased-JC (HoppingChiral) cores. `core` selects which of the two qubits
/// carries the resonator gates (it must be the mode-adjacent one).
/// Targets, with B = b^dag e^{i phi} + b e^{-i phi}:
///   XX            exp(-i theta x1 x2 B)
///   ZZ            exp(-i theta z1 z2 B)
///   HoppingReal   exp(-i theta (s+_1 s-_2 + s-_1 s+_2) B)
///   HoppingChiral exp(-i theta (e^{i phi} s+_nc s-_c b^dag + h.c.)), exact;
///                 `transpose` swaps which qubit carries sigma_+.
Gate quadratic_coupling_circuit(QuadKind kind, int q1, int q2, int mode,
                                double theta, double phi, int core_qubit,
                                QrOrder order = QrOrder::Forward,
                                bool transpose = false, bool fermionic = false);

/// R_z(varphi) from two PRX gates, up to a global phase.
Gate rz_via_prx(int qubit, double varphi);

/// LC gate on an auxiliary qubit prepared in |0> realizes exp(-i theta (b^dag + b)).
Gate aux_displacement(int mode, int aux_qubit, double theta);

/// Trotterized dispersive evolution; with aux in |0> realizes exp(-i angle n)
/// up to a global phase. Warns on stderr when epsilon <= 10 g.
Gate aux_rotation(int mode, int aux_qubit, double angle, double epsilon, double g,
                  int n_trotter);

/// Group-commutator construction; with aux in |0> realizes exp(-i angle n^2)
/// to leading order in angle.
Gate aux_kerr(int mode, int aux_qubit, double angle);

// --- evaluation --------------------------------------------------------------

/// Local unitary of a primitive gate given the dimensions of its sites.
Matrix primitive_unitary(const Gate& g, const std::vector<int>& dims);

/// Recursively expand to primitives.
std::vector<Gate> flatten(const Gate& g);
std::vector<Gate> flatten(const Circuit& c);

/// Full-register unitary of the circuit (product of embedded primitives).
Matrix circuit_unitary(const Circuit& c, const Register& reg);
Matrix gate_unitary(const Gate& g, const Register& reg);

void apply(const Circuit& c, QuantumState& psi);
void apply(const Gate& g, QuantumState& psi);
void apply(const Circuit& c, DensityMatrix& rho);
void apply(const Gate& g, DensityMatrix& rho);

/// Thread-safe memoized local unitary for a primitive gate; key is
/// (kind, site dims, params).
const Matrix& cached_unitary(const Gate& g, const Register& reg);

/// Structural equality (kind, sites, params, expansion).
bool structurally_equal(const Gate& a, const Gate& b);
bool structurally_equal(const Circuit& a, const Circuit& b);

}  // namespace rqsim
