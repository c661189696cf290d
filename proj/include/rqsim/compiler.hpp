#pragma once

#include "rqsim/gateset.hpp"
#include "rqsim/models.hpp"

namespace rqsim {

// ---------------------------------------------------------------------------
// Lowering of models to Trotterized swap-network circuits.
//
// The device picture is a qubit chain with one resonator per position: mode k
// sits next to physical qubit k. Swap layers move logical spins between
// physical qubits; a coupling to mode k fires when its spin reaches position
// k, a two-site term fires when its spins become neighbors. The second-order
// step is a palindrome (forward half sweep, mirrored backward half sweep), so
// its permutation returns to the identity.
// ---------------------------------------------------------------------------

enum class PhaseConvention { Midpoint, LeftEdge };

struct TrotterPlan {
    int order = 2;             // 1 or 2
    double tau = 0.1;          // simulated-time step, > 0
    int n_steps = 1;           // >= 1
    PhaseConvention phase_convention = PhaseConvention::Midpoint;

    void validate() const;
};

enum class NetworkKind { Auto, Linear, Quadratic, None };

struct SwapLayer {
    std::vector<std::pair<int, int>> swaps;  // disjoint physical position pairs
};

struct SwapSchedule {
    int n_positions = 0;
    std::vector<SwapLayer> layers;
    // perm_after[l][logical] = physical position after the first l layers;
    // perm_after[0] is the starting permutation.
    std::vector<std::vector<int>> perm_after;

    /// First config index (0 = before any layer) at which logical spins i and
    /// j occupy adjacent positions; -1 if never.
    int pair_meeting_config(int i, int j) const;
    /// First config index at which logical spin i sits at position k; -1 if never.
    int spin_mode_meeting_config(int i, int k) const;
};

/// Odd-even transposition schedule for linear-coupling models starting from
/// the identity permutation. `n_layers < 0` runs 2*n_positions layers (the
/// all-pairs / all-(spin,mode) coverage bound).
SwapSchedule linear_swap_network(int n_qubits, const ModelSpec& model,
                                 int n_layers = -1);

/// Pair-transport schedule for quadratic couplings: the external odd-even
/// network with even-pair and odd-pair sub-networks after every odd layer.
/// Each pair swap expands to four swap gates.
SwapSchedule quadratic_swap_network(int n_qubits, const ModelSpec& model);

/// Register for compiled circuits: max(n_sites, n_modes) qubits (free bus
/// qubits pad the chain when there are more modes than spins) plus the modes.
Register compiled_register(const ModelSpec& model, int boson_levels);

/// Jordan-Wigner lowering plus drive absorption; the form compile() works on.
ModelSpec lower_model(const ModelSpec& model);

/// One Trotter step for step index m. The model must already be lowered (no
/// fermionic statistics, no Drive terms) or loweable; phases follow the plan's
/// convention: phi_k = omega_k (m + 1/2) tau (Midpoint) or omega_k m tau.
Circuit trotter_step(const ModelSpec& model, const TrotterPlan& plan, int m,
                     NetworkKind network = NetworkKind::Auto);

/// Full n_steps circuit with permutation metadata.
Circuit compile(const ModelSpec& model, const TrotterPlan& plan,
                NetworkKind network = NetworkKind::Auto);

/// Flatten and fold Rz chains into the phases of PRX gates (the virtual-Z
/// optimization); the result contains no X gates and no Rz adjacent to PRX.
Circuit optimize_prx(const Circuit& c);

struct CircuitMetrics {
    long depth = 0;                    // ASAP layering by site conflicts
    std::vector<long> jc_per_mode;     // D_k
    long entangling_qubit_gates = 0;
    long total_gates = 0;
    std::vector<double> calibration_angles;  // distinct |theta| of JC gates
};

CircuitMetrics metrics(const Circuit& c, const Register& reg);

enum class EncodingCode { ResonatorQubit, Unary, Binary };

struct EncodingCost {
    int qubits = 0;
    int resonators = 0;
    long entangling_gates = 0;
};

/// Hardware cost of exp(i phi sigma_x (b^dag + b)) with d boson levels under
/// the three encodings. Binary counts 2(p-1) entangling gates per length-p
/// Pauli string, enumerated explicitly.
EncodingCost encoding_cost(int d, EncodingCode code);

}  // namespace rqsim
