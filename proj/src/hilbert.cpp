#include "rqsim/hilbert.hpp"

#include <algorithm>
#include <cmath>

namespace rqsim {

namespace {
constexpr long kMaxAmplitudes = 1L << 24;
constexpr long kMaxDenseDim = 4096;  // dense matrices beyond this are a bug
}  // namespace

Register::Register(std::vector<Site> sites) : sites_(std::move(sites)) {
    strides_.reserve(sites_.size());
    for (const Site& s : sites_) {
        if (s.type == SiteType::Qubit && s.dim != 2)
            throw InvalidArgument("qubit sites have dimension 2");
        if (s.dim < 2) throw InvalidArgument("site dimension must be >= 2");
        strides_.push_back(dim_);
        dim_ *= s.dim;
        if (dim_ > kMaxAmplitudes)
            throw InvalidArgument("register exceeds the 2^24 amplitude budget");
    }
}

Register Register::qubits_and_modes(int n_qubits, int n_modes, int mode_dim) {
    std::vector<Site> sites;
    sites.reserve(n_qubits + n_modes);
    for (int i = 0; i < n_qubits; ++i) sites.push_back(qubit_site());
    for (int k = 0; k < n_modes; ++k) sites.push_back(mode_site(mode_dim));
    return Register(std::move(sites));
}

bool Register::operator==(const Register& o) const {
    if (sites_.size() != o.sites_.size()) return false;
    for (size_t i = 0; i < sites_.size(); ++i)
        if (sites_[i].type != o.sites_[i].type || sites_[i].dim != o.sites_[i].dim)
            return false;
    return true;
}

long basis_index(const Register& reg, const std::vector<int>& occupation) {
    if (static_cast<int>(occupation.size()) != reg.size())
        throw OutOfRange("occupation length does not match register");
    long idx = 0;
    for (int i = 0; i < reg.size(); ++i) {
        if (occupation[i] < 0 || occupation[i] >= reg.site(i).dim)
            throw OutOfRange("occupation level out of range at site " +
                             std::to_string(i));
        idx += occupation[i] * reg.stride(i);
    }
    return idx;
}

std::vector<int> occupation_of(const Register& reg, long index) {
    if (index < 0 || index >= reg.dim()) throw OutOfRange("basis index out of range");
    std::vector<int> occ(reg.size());
    for (int i = 0; i < reg.size(); ++i) {
        occ[i] = static_cast<int>((index / reg.stride(i)) % reg.site(i).dim);
    }
    return occ;
}

OperatorSum& OperatorSum::add(Complex c, std::vector<SiteOperator> factors) {
    terms.push_back({c, std::move(factors)});
    return *this;
}

OperatorSum& OperatorSum::operator+=(const OperatorSum& other) {
    terms.insert(terms.end(), other.terms.begin(), other.terms.end());
    return *this;
}

OperatorSum OperatorSum::operator*(Complex c) const {
    OperatorSum out = *this;
    for (auto& t : out.terms) t.coeff *= c;
    return out;
}

bool is_spin_kind(OpKind kind) {
    switch (kind) {
        case OpKind::SigmaPlus:
        case OpKind::SigmaMinus:
        case OpKind::SigmaX:
        case OpKind::SigmaY:
        case OpKind::SigmaZ:
            return true;
        default:
            return false;
    }
}

Matrix site_matrix(OpKind kind, int dim) {
    const Complex I(0, 1);
    Matrix m = Matrix::Zero(dim, dim);
    switch (kind) {
        case OpKind::Identity:
            return Matrix::Identity(dim, dim);
        case OpKind::SigmaPlus:
            if (dim != 2) throw KindMismatch("sigma_+ needs a qubit site");
            m(1, 0) = 1;
            return m;
        case OpKind::SigmaMinus:
            if (dim != 2) throw KindMismatch("sigma_- needs a qubit site");
            m(0, 1) = 1;
            return m;
        case OpKind::SigmaX:
            if (dim != 2) throw KindMismatch("sigma_x needs a qubit site");
            m(0, 1) = m(1, 0) = 1;
            return m;
        case OpKind::SigmaY:
            if (dim != 2) throw KindMismatch("sigma_y needs a qubit site");
            m(0, 1) = -I;
            m(1, 0) = I;
            return m;
        case OpKind::SigmaZ:
            if (dim != 2) throw KindMismatch("sigma_z needs a qubit site");
            m(0, 0) = 1;
            m(1, 1) = -1;
            return m;
        case OpKind::Annihilate:
            for (int n = 1; n < dim; ++n) m(n - 1, n) = std::sqrt(double(n));
            return m;
        case OpKind::Create:
            for (int n = 1; n < dim; ++n) m(n, n - 1) = std::sqrt(double(n));
            return m;
        case OpKind::Number:
            for (int n = 0; n < dim; ++n) m(n, n) = double(n);
            return m;
    }
    throw InvalidArgument("unknown operator kind");
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix embed(const OperatorSum& op, const Register& reg) {
    if (reg.dim() > kMaxDenseDim)
        throw InvalidArgument("refusing dense embedding beyond dim 4096");
    Matrix total = Matrix::Zero(reg.dim(), reg.dim());
    for (const OpTerm& term : op.terms) {
        std::vector<Matrix> locals(reg.size());
        std::vector<bool> touched(reg.size(), false);
        for (int i = 0; i < reg.size(); ++i)
            locals[i] = Matrix::Identity(reg.site(i).dim, reg.site(i).dim);
        for (const SiteOperator& f : term.factors) {
            if (f.site < 0 || f.site >= reg.size())
                throw OutOfRange("operator site outside register");
            if (touched[f.site])
                throw InvalidArgument("term touches a site more than once");
            touched[f.site] = true;
            if (is_spin_kind(f.kind) && !reg.is_qubit(f.site))
                throw KindMismatch("spin operator on a mode site");
            if (!is_spin_kind(f.kind) && f.kind != OpKind::Identity &&
                reg.is_qubit(f.site))
                throw KindMismatch("boson operator on a qubit site");
            locals[f.site] = site_matrix(f.kind, reg.site(f.site).dim);
        }
        // First site varies fastest, so it is the rightmost Kronecker factor.
        Matrix acc = locals[reg.size() - 1];
        for (int i = reg.size() - 2; i >= 0; --i) acc = kron(acc, locals[i]);
        total += term.coeff * acc;
    }
    return total;
}

SparseC embed_sparse(const OperatorSum& op, const Register& reg) {
    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(op.terms.size() * reg.dim());
    for (const OpTerm& term : op.terms) {
        // Column action per factor: level -> (level', amplitude); every
        // supported site operator has at most one nonzero per column.
        struct ColAction {
            int site;
            long stride;
            std::vector<int> out;
            std::vector<Complex> amp;
        };
        std::vector<ColAction> actions;
        for (const SiteOperator& f : term.factors) {
            if (is_spin_kind(f.kind) && !reg.is_qubit(f.site))
                throw KindMismatch("spin operator on a mode site");
            if (!is_spin_kind(f.kind) && f.kind != OpKind::Identity &&
                reg.is_qubit(f.site))
                throw KindMismatch("boson operator on a qubit site");
            const int d = reg.site(f.site).dim;
            const Matrix m = site_matrix(f.kind, d);
            ColAction a;
            a.site = f.site;
            a.stride = reg.stride(f.site);
            a.out.assign(d, -1);
            a.amp.assign(d, 0.0);
            for (int c = 0; c < d; ++c)
                for (int r = 0; r < d; ++r)
                    if (m(r, c) != Complex(0, 0)) {
                        a.out[c] = r;
                        a.amp[c] = m(r, c);
                        break;
                    }
            actions.push_back(std::move(a));
        }
        for (long col = 0; col < reg.dim(); ++col) {
            Complex amp = term.coeff;
            long row = col;
            bool dead = false;
            for (const ColAction& a : actions) {
                int lvl = static_cast<int>((col / a.stride) % reg.site(a.site).dim);
                if (a.out[lvl] < 0) {
                    dead = true;
                    break;
                }
                amp *= a.amp[lvl];
                row += (a.out[lvl] - lvl) * a.stride;
            }
            if (dead || amp == Complex(0, 0)) continue;
            trips.emplace_back(row, col, amp);
        }
    }
    SparseC m(reg.dim(), reg.dim());
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

bool is_hermitian(const Matrix& m, double tol) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff() < tol;
}

Matrix exact_propagator(const Matrix& h, double t, double herm_tol) {
    if (!is_hermitian(h, herm_tol))
        throw NotHermitian("exact_propagator needs a Hermitian generator");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const auto& vals = es.eigenvalues();
    Vector phases(vals.size());
    for (long i = 0; i < vals.size(); ++i)
        phases(i) = std::exp(Complex(0, -t * vals(i)));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix exact_propagator(const OperatorSum& h, const Register& reg, double t,
                        double herm_tol) {
    return exact_propagator(embed(h, reg), t, herm_tol);
}

QuantumState::QuantumState(Register r, Vector a) : reg(std::move(r)), amp(std::move(a)) {
    if (amp.size() != reg.dim())
        throw InvalidArgument("amplitude vector does not match register dimension");
}

QuantumState QuantumState::basis(const Register& r, const std::vector<int>& occ) {
    Vector v = Vector::Zero(r.dim());
    v(basis_index(r, occ)) = 1.0;
    return QuantumState(r, std::move(v));
}

void QuantumState::normalize() {
    double n = amp.norm();
    if (n > 0) amp /= n;
}

DensityMatrix::DensityMatrix(Register r, Matrix m) : reg(std::move(r)), rho(std::move(m)) {
    if (rho.rows() != reg.dim() || rho.cols() != reg.dim())
        throw InvalidArgument("density matrix does not match register dimension");
}

DensityMatrix DensityMatrix::from_state(const QuantumState& psi) {
    return DensityMatrix(psi.reg, psi.amp * psi.amp.adjoint());
}

DensityMatrix DensityMatrix::basis(const Register& r, const std::vector<int>& occ) {
    return from_state(QuantumState::basis(r, occ));
}

void DensityMatrix::validate(const Tolerances& tol) const {
    if (!is_hermitian(rho, tol.hermiticity))
        throw InvalidArgument("density matrix not Hermitian");
    if (std::abs(rho.trace() - Complex(1, 0)) > tol.trace)
        throw InvalidArgument("density matrix trace != 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    if (es.eigenvalues().minCoeff() < -tol.positivity)
        throw InvalidArgument("density matrix has a negative eigenvalue");
}

DensityMatrix partial_trace(const DensityMatrix& dm, std::vector<int> keep) {
    if (keep.empty()) throw InvalidArgument("partial_trace: keep set is empty");
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    const Register& reg = dm.reg;
    for (int s : keep)
        if (s < 0 || s >= reg.size()) throw OutOfRange("keep site outside register");

    std::vector<Site> kept_sites;
    for (int s : keep) kept_sites.push_back(reg.site(s));
    Register out_reg(kept_sites);

    std::vector<int> traced;
    for (int i = 0; i < reg.size(); ++i)
        if (std::find(keep.begin(), keep.end(), i) == keep.end()) traced.push_back(i);

    Matrix out = Matrix::Zero(out_reg.dim(), out_reg.dim());
    // Enumerate basis pairs of the kept space and sum over the traced space.
    long traced_dim = 1;
    for (int s : traced) traced_dim *= reg.site(s).dim;

    auto full_index = [&](long kept_idx, long traced_idx) {
        long idx = 0;
        long k = kept_idx;
        for (size_t j = 0; j < keep.size(); ++j) {
            int d = reg.site(keep[j]).dim;
            idx += (k % d) * reg.stride(keep[j]);
            k /= d;
        }
        long t = traced_idx;
        for (size_t j = 0; j < traced.size(); ++j) {
            int d = reg.site(traced[j]).dim;
            idx += (t % d) * reg.stride(traced[j]);
            t /= d;
        }
        return idx;
    };

    for (long i = 0; i < out_reg.dim(); ++i)
        for (long j = 0; j < out_reg.dim(); ++j) {
            Complex acc = 0;
            for (long t = 0; t < traced_dim; ++t)
                acc += dm.rho(full_index(i, t), full_index(j, t));
            out(i, j) = acc;
        }
    return DensityMatrix(out_reg, std::move(out));
}

namespace {

// Index plan for applying an operator local to `sites`.
struct LocalPlan {
    std::vector<long> local_offsets;    // offset of each local basis state
    std::vector<long> residual_bases;   // base offset of each residual config
    long local_dim = 1;
};

LocalPlan make_plan(const Register& reg, const std::vector<int>& sites) {
    LocalPlan plan;
    for (int s : sites) {
        if (s < 0 || s >= reg.size()) throw OutOfRange("gate site outside register");
        plan.local_dim *= reg.site(s).dim;
    }
    for (size_t i = 0; i < sites.size(); ++i)
        for (size_t j = i + 1; j < sites.size(); ++j)
            if (sites[i] == sites[j]) throw InvalidArgument("duplicate gate site");

    plan.local_offsets.resize(plan.local_dim);
    for (long l = 0; l < plan.local_dim; ++l) {
        long rem = l, off = 0;
        for (int s : sites) {
            int d = reg.site(s).dim;
            off += (rem % d) * reg.stride(s);
            rem /= d;
        }
        plan.local_offsets[l] = off;
    }

    std::vector<int> rest;
    for (int i = 0; i < reg.size(); ++i)
        if (std::find(sites.begin(), sites.end(), i) == sites.end()) rest.push_back(i);
    long rest_dim = 1;
    for (int s : rest) rest_dim *= reg.site(s).dim;
    plan.residual_bases.resize(rest_dim);
    for (long r = 0; r < rest_dim; ++r) {
        long rem = r, off = 0;
        for (int s : rest) {
            int d = reg.site(s).dim;
            off += (rem % d) * reg.stride(s);
            rem /= d;
        }
        plan.residual_bases[r] = off;
    }
    return plan;
}

// y = U x on every local slice of a strided array.
void apply_plan(Complex* data, long stride, const Matrix& u, const LocalPlan& plan) {
    const long D = plan.local_dim;
    Vector x(D), y(D);
    for (long base : plan.residual_bases) {
        for (long l = 0; l < D; ++l) x(l) = data[(base + plan.local_offsets[l]) * stride];
        y.noalias() = u * x;
        for (long l = 0; l < D; ++l) data[(base + plan.local_offsets[l]) * stride] = y(l);
    }
}

}  // namespace

void apply_local(Vector& v, const Matrix& u, const std::vector<int>& sites,
                 const Register& reg) {
    LocalPlan plan = make_plan(reg, sites);
    if (u.rows() != plan.local_dim || u.cols() != plan.local_dim)
        throw InvalidArgument("local operator dimension mismatch");
    apply_plan(v.data(), 1, u, plan);
}

void apply_local_unitary(QuantumState& psi, const Matrix& u,
                         const std::vector<int>& sites, double norm_tol) {
    apply_local(psi.amp, u, sites, psi.reg);
    if (std::abs(psi.amp.norm() - 1.0) > norm_tol)
        throw InvalidArgument("gate application broke normalization");
}

namespace {

// rho <- rho U^dag, column-slab GEMM per residual block: the local column
// indices of one block are gathered, multiplied by U^dag, and scattered back.
void right_dagger_gemm(Matrix& rho, const Matrix& u, const LocalPlan& plan) {
    const long L = plan.local_dim;
    Matrix udag = u.adjoint();
    Matrix slab(rho.rows(), L), out(rho.rows(), L);
    for (long base : plan.residual_bases) {
        for (long l = 0; l < L; ++l)
            slab.col(l) = rho.col(base + plan.local_offsets[l]);
        out.noalias() = slab * udag;
        for (long l = 0; l < L; ++l)
            rho.col(base + plan.local_offsets[l]) = out.col(l);
    }
}

}  // namespace

void apply_local_left(Matrix& rho, const Matrix& u, const std::vector<int>& sites,
                      const Register& reg) {
    LocalPlan plan = make_plan(reg, sites);
    if (u.rows() != plan.local_dim || u.cols() != plan.local_dim)
        throw InvalidArgument("local operator dimension mismatch");
    // U rho = (rho^dag U^dag)^dag.
    Matrix tmp = rho.adjoint();
    right_dagger_gemm(tmp, u, plan);
    rho = tmp.adjoint();
}

void apply_local_right_dagger(Matrix& rho, const Matrix& u,
                              const std::vector<int>& sites, const Register& reg) {
    LocalPlan plan = make_plan(reg, sites);
    if (u.rows() != plan.local_dim || u.cols() != plan.local_dim)
        throw InvalidArgument("local operator dimension mismatch");
    right_dagger_gemm(rho, u, plan);
}

void conjugate_local(DensityMatrix& dm, const Matrix& u, const std::vector<int>& sites) {
    LocalPlan plan = make_plan(dm.reg, sites);
    if (u.rows() != plan.local_dim || u.cols() != plan.local_dim)
        throw InvalidArgument("local operator dimension mismatch");
    // U rho U^dag via two right-applications and one adjoint copy.
    right_dagger_gemm(dm.rho, u, plan);
    Matrix tmp = dm.rho.adjoint();
    right_dagger_gemm(tmp, u, plan);
    dm.rho = tmp.adjoint();
}

Complex expectation(const QuantumState& psi, const OperatorSum& obs) {
    Complex total = 0;
    for (const OpTerm& term : obs.terms) {
        Vector v = psi.amp;
        for (const SiteOperator& f : term.factors) {
            if (is_spin_kind(f.kind) && !psi.reg.is_qubit(f.site))
                throw KindMismatch("spin operator on a mode site");
            if (!is_spin_kind(f.kind) && f.kind != OpKind::Identity &&
                psi.reg.is_qubit(f.site))
                throw KindMismatch("boson operator on a qubit site");
            apply_local(v, site_matrix(f.kind, psi.reg.site(f.site).dim), {f.site},
                        psi.reg);
        }
        total += term.coeff * psi.amp.dot(v);  // Eigen dot conjugates the left side
    }
    return total;
}

Complex expectation(const DensityMatrix& dm, const OperatorSum& obs) {
    Complex total = 0;
    for (const OpTerm& term : obs.terms) {
        Matrix m = dm.rho;
        for (const SiteOperator& f : term.factors) {
            if (is_spin_kind(f.kind) && !dm.reg.is_qubit(f.site))
                throw KindMismatch("spin operator on a mode site");
            if (!is_spin_kind(f.kind) && f.kind != OpKind::Identity &&
                dm.reg.is_qubit(f.site))
                throw KindMismatch("boson operator on a qubit site");
            apply_local_left(m, site_matrix(f.kind, dm.reg.site(f.site).dim), {f.site},
                             dm.reg);
        }
        total += term.coeff * m.trace();  // Tr(T rho) computed as Tr(T applied to rho)
    }
    return total;
}

double phase_aligned_maxnorm(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidArgument("phase_aligned_maxnorm: shape mismatch");
    long bi = 0, bj = 0;
    double best = -1;
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j) {
            double w = std::abs(a(i, j)) + std::abs(b(i, j));
            if (w > best) {
                best = w;
                bi = i;
                bj = j;
            }
        }
    Complex lambda(1, 0);
    if (std::abs(b(bi, bj)) > 1e-300) {
        lambda = a(bi, bj) / b(bi, bj);
        double m = std::abs(lambda);
        if (m > 1e-300) lambda /= m;
    }
    return (a - lambda * b).cwiseAbs().maxCoeff();
}

double phase_aligned_maxnorm(const Vector& a, const Vector& b) {
    Matrix ma = a, mb = b;
    return phase_aligned_maxnorm(ma, mb);
}

double spectral_norm(const Matrix& m) {
    if (m.rows() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

}  // namespace rqsim
