#pragma once

#include <functional>
#include <map>

#include "rqsim/compiler.hpp"

namespace rqsim {

// ---------------------------------------------------------------------------
// Lindblad open-system engine and the gate-noise -> mode-broadening mapping.
//
// The noise Lindbladian per mode k is
//   gamma_k (b rho b^dag - 1/2 {n, rho}) + 2 Gamma_k (n rho n - 1/2 {n^2, rho}),
// i.e. zero-temperature damping plus pure dephasing, with linewidth
// gamma*_k = gamma_k/2 + Gamma_k. A noisy JC gate is the ideal unitary
// followed by exp(t_gate L_Nk) on its mode.
// ---------------------------------------------------------------------------

struct NoiseSpec {
    std::vector<double> gamma;  // damping rate per mode (1/time)
    std::vector<double> Gamma;  // dephasing rate per mode (1/time)
    double t_gate = 0.0;        // physical JC gate duration (time)
    double chi_t = 0.0;         // coherent ZZ-type error per gate (dimensionless)
    double kerr_t = 0.0;        // coherent Kerr error per gate (dimensionless)
    // Half the gate channel before and half after the unitary instead of the
    // default post-gate placement (sensitivity studies).
    bool symmetrized_placement = false;
    // Optional uniform idling channel per Trotter step; the mapping neglects
    // idling, so this is off by default.
    double idle_time_per_step = 0.0;

    static NoiseSpec none(int n_modes) {
        NoiseSpec n;
        n.gamma.assign(n_modes, 0.0);
        n.Gamma.assign(n_modes, 0.0);
        return n;
    }
    static NoiseSpec damping(int n_modes, double g, double t) {
        NoiseSpec n = none(n_modes);
        n.gamma.assign(n_modes, g);
        n.t_gate = t;
        return n;
    }
    double gamma_star(int k) const { return gamma.at(k) / 2 + Gamma.at(k); }
    bool enabled() const;
    void validate() const;
};

struct EffectiveNoise {
    std::vector<double> gamma_eff;  // per mode, 1/simulated-time
    std::vector<double> Gamma_eff;
    double gamma_star_eff(int k) const {
        return gamma_eff.at(k) / 2 + Gamma_eff.at(k);
    }
};

// --- superoperator helpers (column-stacking vectorization) -------------------

/// -i(I x H - H^T x I) + sum_j rate_j D[L_j] as a dense superoperator.
Matrix liouvillian_superop(const Matrix& h,
                           const std::vector<std::pair<double, Matrix>>& collapse);

/// Superoperator of rho -> U rho U^dag.
Matrix unitary_superop(const Matrix& u);

/// Choi matrix of a superoperator (dim^2 x dim^2).
Matrix choi_matrix(const Matrix& superop);

/// Trace preservation within tol.trace and Choi positivity within
/// tol.positivity.
bool is_cptp(const Matrix& superop, const Tolerances& tol = default_tol());

/// Mode-local noise channel exp(t L_Nk) as a d^2 x d^2 superoperator.
Matrix mode_noise_channel(int d, double gamma, double Gamma, double t);

/// Apply a d^2 x d^2 channel to the density matrix on one mode site.
void apply_mode_channel(DensityMatrix& rho, const Matrix& channel, int mode_site);
/// Sparse variant (the damping/dephasing channel is banded).
void apply_mode_channel(DensityMatrix& rho, const SparseC& channel, int mode_site);

/// Full-register superoperator of a (possibly composite) noisy gate: ideal
/// unitary followed by exp(t_gate L_N) on the modes its JC primitives touch.
/// Dense; intended for small registers.
Matrix noisy_gate_superop(const Gate& g, const Register& reg,
                          const NoiseSpec& noise);

// --- Lindblad evolution ------------------------------------------------------

using HamiltonianFn = std::function<OperatorSum(double)>;

struct LindbladOptions {
    double dt = 0.02;          // RK4 step
    double trace_tol = 1e-6;   // drift beyond this raises IntegrationFailure
    bool force_rk4 = false;    // skip the exact small-dim path
};

/// Propagate rho0 for duration t, sampling every sample_dt (and at t = 0).
/// Time-independent generators on small registers use the exact superoperator
/// exponential; otherwise a fixed-step RK4 on the density matrix.
std::vector<DensityMatrix> lindblad_evolve(
    const DensityMatrix& rho0, const HamiltonianFn& h, const NoiseSpec& noise,
    double t, double sample_dt, const LindbladOptions& opts = {},
    bool time_dependent = true);

std::vector<DensityMatrix> lindblad_evolve(const DensityMatrix& rho0,
                                           const OperatorSum& h,
                                           const NoiseSpec& noise, double t,
                                           double sample_dt,
                                           const LindbladOptions& opts = {});

// --- noise mapping -----------------------------------------------------------

/// gamma_eff,k = D_k t_gate gamma_k / tau (and likewise for Gamma), with D_k
/// counted structurally from the step circuit.
EffectiveNoise effective_lindbladian(const Circuit& step, const Register& reg,
                                     const NoiseSpec& noise, double tau);

using NamedObservables = std::vector<std::pair<std::string, OperatorSum>>;

struct TimeSeries {
    std::vector<double> times;
    std::vector<std::string> names;
    // series[n][s] = value of observable n at times[s]
    std::vector<std::vector<double>> values;
};

/// Density-matrix propagation through the compiled circuit with the noisy-gate
/// channel after every JC primitive (idling noise excluded); observables are
/// recorded at step boundaries. Coherent chi/kerr errors are injected after
/// each JC primitive when enabled.
TimeSeries simulate_noisy_trotter(const ModelSpec& model, const TrotterPlan& plan,
                                  const NoiseSpec& noise, int boson_levels,
                                  const std::vector<int>& initial_occupation,
                                  const NamedObservables& observables);

/// The noise-free statevector twin of simulate_noisy_trotter.
TimeSeries simulate_pure_trotter(const ModelSpec& model, const TrotterPlan& plan,
                                 int boson_levels,
                                 const std::vector<int>& initial_occupation,
                                 const NamedObservables& observables);

// --- spectral function ---------------------------------------------------------

/// S(omega) = 2 pi sum_k v_k^2 2 gamma*_k / (gamma*_k^2 + (omega - omega_k)^2).
std::vector<double> spectral_function(const std::vector<double>& v,
                                      const std::vector<double>& omega_k,
                                      const std::vector<double>& gamma_star,
                                      const std::vector<double>& omega_grid);

/// <X(t) X(0)> for one damped mode in vacuum via the quantum regression
/// theorem (X = v(b^dag + b)); the time-domain oracle for spectral_function.
std::vector<Complex> xx_correlation(double v, double omega0, double gamma,
                                    double Gamma, int d,
                                    const std::vector<double>& times);

/// 2 pi * Fourier transform of the correlation series (trapezoid, using
/// C(-t) = conj C(t)); normalized to match spectral_function's convention.
std::vector<double> spectrum_from_correlation(const std::vector<double>& times,
                                              const std::vector<Complex>& corr,
                                              const std::vector<double>& omega_grid);

}  // namespace rqsim
