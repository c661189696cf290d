#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "rqsim/errors.hpp"

namespace rqsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Default numerical tolerances. All checks that enforce an invariant take
/// one of these; callers may pass their own.
struct Tolerances {
    double unitarity = 1e-9;
    double hermiticity = 1e-9;
    double trace = 1e-9;
    double positivity = 1e-8;  // minimum eigenvalue >= -positivity
};

inline const Tolerances& default_tol() {
    static Tolerances t;
    return t;
}

// ---------------------------------------------------------------------------
// Register: ordered list of qubit and truncated-mode sites.
//
// Basis convention (used everywhere): little-endian mixed radix, the FIRST
// site varies fastest.  Qubit level 0 is the ground state and sigma_z has
// +1 on it, so P = (1 + <sigma_z>)/2 is the ground-state population.
// ---------------------------------------------------------------------------

enum class SiteType { Qubit, Mode };

struct Site {
    SiteType type;
    int dim;  // 2 for qubits, truncation d >= 2 for modes
};

inline Site qubit_site() { return {SiteType::Qubit, 2}; }
inline Site mode_site(int d) { return {SiteType::Mode, d}; }

class Register {
public:
    Register() = default;
    explicit Register(std::vector<Site> sites);

    /// n_qubits qubit sites followed by n_modes mode sites of dimension d.
    static Register qubits_and_modes(int n_qubits, int n_modes, int mode_dim);

    int size() const { return static_cast<int>(sites_.size()); }
    const Site& site(int i) const { return sites_.at(i); }
    const std::vector<Site>& sites() const { return sites_; }
    long dim() const { return dim_; }
    long stride(int i) const { return strides_.at(i); }
    bool is_qubit(int i) const { return site(i).type == SiteType::Qubit; }
    bool is_mode(int i) const { return site(i).type == SiteType::Mode; }

    bool operator==(const Register& o) const;

private:
    std::vector<Site> sites_;
    std::vector<long> strides_;
    long dim_ = 1;
};

/// Mixed-radix index of an occupation (one level per site), first site fastest.
long basis_index(const Register& reg, const std::vector<int>& occupation);
/// Inverse of basis_index.
std::vector<int> occupation_of(const Register& reg, long index);

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

enum class OpKind {
    SigmaPlus,   // |1><0|
    SigmaMinus,  // |0><1|
    SigmaX,
    SigmaY,
    SigmaZ,  // diag(+1, -1): +1 on the ground state
    Identity,
    Annihilate,  // b
    Create,      // b^dagger; annihilates the top Fock level (hard cutoff)
    Number,      // b^dagger b
};

struct SiteOperator {
    OpKind kind;
    int site;
};

/// One product term: coefficient times a product of single-site operators,
/// each site touched at most once.
struct OpTerm {
    Complex coeff;
    std::vector<SiteOperator> factors;  // empty product = identity
};

struct OperatorSum {
    std::vector<OpTerm> terms;

    OperatorSum& add(Complex c, std::vector<SiteOperator> factors);
    OperatorSum& operator+=(const OperatorSum& other);
    OperatorSum operator*(Complex c) const;
    friend OperatorSum operator+(OperatorSum a, const OperatorSum& b) {
        a += b;
        return a;
    }
};

/// Local matrix of a single-site operator on a site of dimension `dim`.
/// Spin kinds require dim == 2; boson kinds any dim >= 2.
Matrix site_matrix(OpKind kind, int dim);

/// True if `kind` only makes sense on a qubit (spin) site.
bool is_spin_kind(OpKind kind);

/// Dense matrix of op on the full register basis (Kronecker embedding).
/// Throws KindMismatch when a spin operator targets a mode or vice versa.
Matrix embed(const OperatorSum& op, const Register& reg);

using SparseC = Eigen::SparseMatrix<Complex>;

/// Sparse embedding; every supported site operator has at most one nonzero
/// per column, so a term contributes at most one entry per basis column.
SparseC embed_sparse(const OperatorSum& op, const Register& reg);

Matrix kron(const Matrix& a, const Matrix& b);

bool is_hermitian(const Matrix& m, double tol = default_tol().hermiticity);

/// U = exp(-i t H) via dense eigendecomposition. H must be Hermitian.
Matrix exact_propagator(const Matrix& h, double t,
                        double herm_tol = default_tol().hermiticity);
Matrix exact_propagator(const OperatorSum& h, const Register& reg, double t,
                        double herm_tol = default_tol().hermiticity);

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

struct QuantumState {
    Register reg;
    Vector amp;

    QuantumState() = default;
    QuantumState(Register r, Vector a);
    /// Basis state with the given per-site occupation.
    static QuantumState basis(const Register& r, const std::vector<int>& occ);

    double norm() const { return amp.norm(); }
    void normalize();
};

struct DensityMatrix {
    Register reg;
    Matrix rho;

    DensityMatrix() = default;
    DensityMatrix(Register r, Matrix m);
    static DensityMatrix from_state(const QuantumState& psi);
    static DensityMatrix basis(const Register& r, const std::vector<int>& occ);

    double trace_real() const { return rho.trace().real(); }
    /// Hermiticity/trace/positivity check; throws InvalidArgument on failure.
    void validate(const Tolerances& tol = default_tol()) const;
};

/// Trace out all sites not in `keep`; result register preserves the original
/// relative order of the kept sites.
DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep);

Complex expectation(const QuantumState& psi, const OperatorSum& obs);
Complex expectation(const DensityMatrix& rho, const OperatorSum& obs);

// ---------------------------------------------------------------------------
// Local application kernels (the sparse path behind the dense interface).
// ---------------------------------------------------------------------------

/// Apply a local operator `u` acting on `sites` to the state vector.
/// `u` is indexed with the first listed site fastest. No unitarity assumed.
void apply_local(Vector& v, const Matrix& u, const std::vector<int>& sites,
                 const Register& reg);

/// Apply a local unitary to a state, then check norm preservation.
void apply_local_unitary(QuantumState& psi, const Matrix& u,
                         const std::vector<int>& sites,
                         double norm_tol = default_tol().unitarity);

/// rho <- (U rho) with U local on `sites`.
void apply_local_left(Matrix& rho, const Matrix& u,
                      const std::vector<int>& sites, const Register& reg);
/// rho <- (rho U^dagger) with U local on `sites`.
void apply_local_right_dagger(Matrix& rho, const Matrix& u,
                              const std::vector<int>& sites,
                              const Register& reg);
/// rho <- U rho U^dagger.
void conjugate_local(DensityMatrix& rho, const Matrix& u,
                     const std::vector<int>& sites);

/// Largest-magnitude-element phase alignment, then max-norm difference.
/// This is the "equal up to global phase" comparison used throughout.
double phase_aligned_maxnorm(const Matrix& a, const Matrix& b);
double phase_aligned_maxnorm(const Vector& a, const Vector& b);

/// Spectral norm (largest singular value).
double spectral_norm(const Matrix& m);

}  // namespace rqsim
