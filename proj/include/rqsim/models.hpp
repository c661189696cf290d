#pragma once

#include <json.hpp>

#include "rqsim/hilbert.hpp"

namespace rqsim {

// ---------------------------------------------------------------------------
// System-boson model library and the rotating-frame transformation.
//
// Spin onsite terms mean (eps/2) sigma_z, fermion onsite terms mean eps n.
// Fermionic models are lowered to spin models by jordan_wigner(); occupied
// orbitals map to qubit level 1, so n = (1 - sigma_z)/2 and the parity string
// is a product of sigma_z factors.
// ---------------------------------------------------------------------------

enum class Statistics { Spin, Fermion };

enum class PairKind { ZZ, XX, Hopping, DensityDensity };

enum class CouplingKind {
    Longitudinal,      // sigma_z (b^dag + b)         [LC gate]
    Transverse,        // sigma_x (b^dag + b)         [QR gate]
    RotatingWave,      // sigma_- b^dag + h.c.        [JC gate]
    QuadraticXX,       // x_i x_j (b^dag + b)
    QuadraticHopping,  // (s+_i s-_j + s-_i s+_j)(b^dag + b)
    QuadraticChiral,   // C b^dag + C^dag b with C = s+_i s-_j
    Drive,             // v b^dag + v* b (identity system operator)
};

struct OnsiteTerm {
    int site;
    double eps;
};

struct PairTerm {
    int i, j;
    PairKind kind;
    Complex coeff;
    bool jw_string = false;  // insert sigma_z parity factors between i and j
};

struct CouplingTerm {
    std::vector<int> sites;  // one or two system sites; empty for Drive
    int mode;
    Complex v;
    CouplingKind kind;
    bool jw_string = false;
};

struct ModelSpec {
    Statistics statistics = Statistics::Spin;
    int n_sites = 0;
    std::vector<double> mode_freqs;
    std::vector<OnsiteTerm> onsite;
    std::vector<PairTerm> pairs;
    std::vector<CouplingTerm> couplings;
    double constant = 0.0;
    std::vector<double> mode_shifts;  // phase-space shifts absorbed by the compiler

    int n_modes() const { return static_cast<int>(mode_freqs.size()); }
    /// Structural checks: site ranges, kind constraints, real amplitudes for
    /// the Hermitian-coupling kinds (phases belong in the gate phase).
    void validate() const;
};

enum class FrameKind { Lab, RotatingModes, RotatingModesAndSpins };

struct Frame {
    FrameKind kind = FrameKind::RotatingModes;
    double omega0 = 0.0;  // reference frequency for RotatingModesAndSpins

    static Frame lab() { return {FrameKind::Lab, 0.0}; }
    static Frame rotating() { return {FrameKind::RotatingModes, 0.0}; }
    static Frame rotating_with_spins(double w0) {
        return {FrameKind::RotatingModesAndSpins, w0};
    }
};

/// Register with the model's qubits first and its modes (dimension d) after.
Register make_register(const ModelSpec& model, int boson_levels);

/// Hamiltonian at simulated time t in the requested frame. Fermionic models
/// are Jordan-Wigner mapped first. RotatingModes drops H_b and multiplies
/// coupling amplitudes by e^{i omega_k t}.
OperatorSum build(const ModelSpec& model, const Frame& frame, double t);

/// Fermion -> spin mapping. Number operators become (1 - sigma_z)/2 (which
/// splits n(b^dag+b) couplings into Longitudinal + Drive parts), hoppings and
/// chiral couplings keep their kind and gain a parity string flag.
ModelSpec jordan_wigner(const ModelSpec& model);

/// Remove Drive terms by a per-mode phase-space shift delta_k = -w0_k/omega_k,
/// folding the induced sigma_z corrections into the onsite terms and recording
/// delta_k in mode_shifts. Lab-frame identity; requires omega_k > 0.
ModelSpec absorb_drives(const ModelSpec& model);

/// Rewrite into the combined rotating frame of modes and spins (valid for
/// rotating-wave models whose modes all sit at omega0): onsite eps -> eps -
/// omega0 and all mode frequencies -> 0, so compiled coupling phases vanish.
ModelSpec combined_rotating_frame(const ModelSpec& model, double omega0);

// --- presets -----------------------------------------------------------------

/// Exciton transport: eps_i spins, hoppings h_ii', longitudinal couplings v_jk.
ModelSpec holstein(const std::vector<double>& eps,
                   const std::vector<std::tuple<int, int, Complex>>& hoppings,
                   const std::vector<double>& omega,
                   const std::vector<std::tuple<int, int, double>>& v_longitudinal);

/// Interacting lattice electrons with phonon coupling (fermionic).
ModelSpec hubbard_holstein(
    const std::vector<double>& eps,
    const std::vector<std::tuple<int, int, double>>& density_density,
    const std::vector<std::tuple<int, int, Complex>>& hoppings,
    const std::vector<double>& omega,
    const std::vector<std::tuple<int, int, double>>& v_longitudinal);

/// Electron-phonon coupling with hopping (fermionic, chiral couplings).
ModelSpec frohlich(const std::vector<double>& eps,
                   const std::vector<std::tuple<int, int, Complex>>& hoppings,
                   const std::vector<double>& omega,
                   const std::vector<std::tuple<int, int, int, Complex>>& v_chiral);

/// Spins transversally coupled to cavities; optional ZZ system couplings.
ModelSpec dicke(const std::vector<double>& eps,
                const std::vector<std::tuple<int, int, double>>& zz,
                const std::vector<double>& omega,
                const std::vector<std::tuple<int, int, double>>& v_transverse);

/// Rotating-wave (excitation-conserving) spin-cavity couplings.
ModelSpec tavis_cummings(const std::vector<double>& eps,
                         const std::vector<double>& omega,
                         const std::vector<std::tuple<int, int, Complex>>& v_rw);

ModelSpec jaynes_cummings(double eps, double omega, Complex v);

/// Diradical active space under RPA: 4 spin-orbitals, two-electron integrals
/// restricted to direct (i,j,j,i) entries in physicists' ordering <ij|j'i'>.
ModelSpec rpa_radical(
    const std::vector<std::tuple<int, int, Complex>>& t_matrix,
    const std::vector<std::tuple<int, int, int, int, double>>& h_direct,
    const std::vector<double>& omega,
    const std::vector<std::tuple<int, int, int, Complex>>& v_chiral);

/// The worked two-spin/two-mode example: eps1 = eps2 = 0.5, eps12 = 1,
/// omega = (1, 1), v11 = v22 = 0.5, v12 = v21 = -0.5.
ModelSpec dicke_example_2x2();

/// Named preset with JSON parameters (the CLI entry point). Throws
/// IncompleteParams on missing fields and ConfigError on unknown names.
ModelSpec preset(const std::string& name, const nlohmann::json& params);
const std::vector<std::string>& preset_names();

nlohmann::json model_to_json(const ModelSpec& m);
ModelSpec model_from_json(const nlohmann::json& j);

}  // namespace rqsim
