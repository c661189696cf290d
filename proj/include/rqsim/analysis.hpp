#pragma once

#include <random>

#include "rqsim/noise.hpp"

namespace rqsim {

// ---------------------------------------------------------------------------
// Observables, Trotter-error operators, and the digitized-Rabi replications.
// ---------------------------------------------------------------------------

struct AlphaResult {
    Matrix op;    // anti-Hermitian error generator on the register
    double norm;  // spectral norm
};

/// First-order Trotter error alpha_1 = (-i tau)^2 1/2 sum_{a<b} [H_b, H_a]
/// for partials listed in order of application (first applied first).
AlphaResult alpha1(const std::vector<OperatorSum>& partials, const Register& reg,
                   double tau);

/// Exact second-order error for the palindromic two-partial split
/// e^{-i tau A/2} e^{-i tau B/2} e^{-i tau B/2} e^{-i tau A/2}.
AlphaResult alpha2_exact(const OperatorSum& a, const OperatorSum& b,
                         const Register& reg, double tau);

/// Norm bound tau^3 sum_{i,j,k} ||[H_i, [H_j, H_k]]|| for a general split.
double alpha2_bound(const std::vector<OperatorSum>& partials, const Register& reg,
                    double tau);

/// Principal matrix log of a unitary; rejects eigenphases within 1e-6 of +-pi
/// (no unambiguous principal branch there).
Matrix principal_log_unitary(const Matrix& u);

/// Symmetrized defect generator log(e^{i t H/2} U e^{i t H/2}); the first-order
/// commutator contamination cancels, leaving alpha + O(t^2 ||H||^2 alpha).
Matrix defect_generator(const Matrix& u, const Matrix& h_exact, double t);

struct FitResult {
    double slope = 0;
    double intercept = 0;
    double stderr_slope = 0;
};

FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y);
FitResult fit_linear(const std::vector<double>& x, const std::vector<double>& y);

/// Dominant angular frequency (radians per sample) of a real series by a
/// windowed projection scan with parabolic refinement.
double dominant_frequency(const std::vector<double>& series);

// --- Trotter error scan --------------------------------------------------------

struct TrotterErrorEntry {
    int order;
    double tau;
    int d;
    double max_err;  // max abs population deviation vs the exact oracle
};

struct TrotterErrorReport {
    std::vector<TrotterErrorEntry> entries;
    // tau-scaling exponent per order, fitted at the largest truncation.
    std::map<int, FitResult> tau_exponent;

    double error(int order, double tau, int d) const;
};

TrotterErrorReport trotter_error_scan(const ModelSpec& model,
                                      const std::vector<int>& orders,
                                      const std::vector<double>& taus,
                                      const std::vector<int>& ds, double t_final,
                                      const std::vector<int>& initial_occupation);

// --- digitized Rabi replications -------------------------------------------------

enum class Manifold { Second, Third };

struct ChevronResult {
    std::vector<double> dphis;  // deviation from the computed central phase
    int n_steps = 0;
    // population[p][s]: excited-qubit population after s steps at dphis[p]
    std::vector<std::vector<double>> population;
    double phi0 = 0.0;  // computed central phase (exact frame tracking)
    double gamma_t_gate = 0.0;
    // Post-selection acceptance of the preceding initialization; the demo
    // starts from the exactly prepared manifold state, so 1 unless a noisy
    // initialize_with_aux result is threaded in by the caller.
    double acceptance_fraction = 1.0;
};

/// Digitized Rabi oscillations on the chosen excitation manifold. Third uses
/// one pi/2-JC gate per step (effective under-rotation 0.42), Second uses
/// three (effective over-rotation 0.38). gamma_t_gate > 0 switches to a
/// density-matrix simulation with a damping channel after every JC gate.
/// `placement` selects between the pictorially-equivalent positions of the
/// frame-tracking phase inside the three-gate step.
ChevronResult replicate_manifold_demo(Manifold manifold,
                                      const std::vector<double>& dphis,
                                      int n_steps, double gamma_t_gate,
                                      int boson_levels = 6, int placement = 0);

// --- initialization with an auxiliary qubit ---------------------------------------

struct InitWithAuxResult {
    Circuit circuit;          // at the best varphi
    double best_varphi = 0;
    double acceptance = 0;    // probability of finding the aux qubit in |0>
    double fidelity = 0;      // post-selected overlap with |1_q, 2_r>
};

/// Two JC gates on the auxiliary qubit with an aux Rz(varphi) in between,
/// preparing |1_q, 2_r>; varphi is swept and the aux ground-state probability
/// maximized. Post-selection keeps the aux |0> branch.
InitWithAuxResult initialize_with_aux(int boson_levels,
                                      const std::vector<double>& varphi_grid,
                                      double gamma_t_gate = 0.0);

// --- observables ------------------------------------------------------------------

/// Named observable set for a model: populations P_i = (1 + <sigma_z>)/2
/// (ground-state populations under this sign convention), spin-spin and
/// system-boson correlators (Hermitized re/im parts), boson numbers, and the
/// total energy (system + sum_k omega_k n_k).
NamedObservables observables_suite(const ModelSpec& model);

/// Multinomial sampling of qubit ground populations with a seeded RNG.
std::vector<double> sample_populations(const QuantumState& psi, int n_qubits,
                                       int n_shots, uint64_t seed);

/// Convergence-check helper: rerun at d + 2 and report the largest absolute
/// drift across all series values.
double truncation_drift(const std::function<TimeSeries(int)>& run, int d);

}  // namespace rqsim
