#include "rqsim/noise.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace rqsim {

bool NoiseSpec::enabled() const {
    for (double g : gamma)
        if (g != 0.0) return true;
    for (double g : Gamma)
        if (g != 0.0) return true;
    return false;
}

void NoiseSpec::validate() const {
    for (double g : gamma)
        if (g < 0) throw InvalidArgument("negative damping rate");
    for (double g : Gamma)
        if (g < 0) throw InvalidArgument("negative dephasing rate");
    if (t_gate < 0) throw InvalidArgument("negative gate duration");
}

// --- superoperator helpers ----------------------------------------------------

Matrix liouvillian_superop(const Matrix& h,
                           const std::vector<std::pair<double, Matrix>>& collapse) {
    const long d = h.rows();
    const Matrix id = Matrix::Identity(d, d);
    const Complex mi(0, -1);
    Matrix s = mi * (kron(id, h) - kron(h.transpose(), id));
    for (const auto& [rate, L] : collapse) {
        Matrix LdL = L.adjoint() * L;
        s += rate * (kron(L.conjugate(), L) - 0.5 * kron(id, LdL) -
                     0.5 * kron(LdL.transpose(), id));
    }
    return s;
}

Matrix unitary_superop(const Matrix& u) { return kron(u.conjugate(), u); }

Matrix choi_matrix(const Matrix& superop) {
    const long d2 = superop.rows();
    const long d = static_cast<long>(std::lround(std::sqrt(double(d2))));
    Matrix choi(d2, d2);
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j)
            for (long k = 0; k < d; ++k)
                for (long l = 0; l < d; ++l)
                    choi(k * d + i, l * d + j) = superop(k + d * l, i + d * j);
    return choi;
}

bool is_cptp(const Matrix& superop, const Tolerances& tol) {
    const long d2 = superop.rows();
    const long d = static_cast<long>(std::lround(std::sqrt(double(d2))));
    Matrix choi = choi_matrix(superop);
    if (!is_hermitian(choi, 1e-7)) return false;
    Eigen::SelfAdjointEigenSolver<Matrix> es(choi);
    if (es.eigenvalues().minCoeff() < -tol.positivity) return false;
    // Trace preservation: Tr_out Choi = I.
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) {
            Complex acc = 0;
            for (long k = 0; k < d; ++k) acc += choi(k * d + i, k * d + j);
            if (std::abs(acc - (i == j ? 1.0 : 0.0)) > tol.trace * 10) return false;
        }
    return true;
}

Matrix mode_noise_channel(int d, double gamma, double Gamma, double t) {
    Matrix b = site_matrix(OpKind::Annihilate, d);
    Matrix n = site_matrix(OpKind::Number, d);
    Matrix l = liouvillian_superop(Matrix::Zero(d, d),
                                   {{gamma, b}, {2 * Gamma, n}});
    return Matrix((t * l).exp());
}

namespace {

template <typename ChannelMatrix>
void apply_mode_channel_impl(DensityMatrix& dm, const ChannelMatrix& channel,
                             int mode_site) {
    const Register& reg = dm.reg;
    const int d = reg.site(mode_site).dim;
    const long st = reg.stride(mode_site);
    const long dim = reg.dim();
    const long res = dim / d;
    if (channel.rows() != d * d)
        throw InvalidArgument("channel dimension does not match the mode");

    // Residual offsets: base indices of all sites except the mode.
    std::vector<long> bases(res);
    {
        long cnt = 0;
        for (long i = 0; i < dim; ++i) {
            if ((i / st) % d == 0) bases[cnt++] = i;
        }
    }
    // Gather rho into Z[vec(m,n), (a,b)] with the column-stacking convention
    // vec(m,n) = m + d n, apply the channel as one GEMM, scatter back.
    Matrix z(d * d, res * res);
    for (long a = 0; a < res; ++a)
        for (long b = 0; b < res; ++b)
            for (int n = 0; n < d; ++n)
                for (int m = 0; m < d; ++m)
                    z(m + d * n, a * res + b) =
                        dm.rho(bases[a] + m * st, bases[b] + n * st);
    Matrix y = channel * z;
    for (long a = 0; a < res; ++a)
        for (long b = 0; b < res; ++b)
            for (int n = 0; n < d; ++n)
                for (int m = 0; m < d; ++m)
                    dm.rho(bases[a] + m * st, bases[b] + n * st) =
                        y(m + d * n, a * res + b);
}

}  // namespace

void apply_mode_channel(DensityMatrix& dm, const Matrix& channel, int mode_site) {
    apply_mode_channel_impl(dm, channel, mode_site);
}

void apply_mode_channel(DensityMatrix& dm, const SparseC& channel, int mode_site) {
    apply_mode_channel_impl(dm, channel, mode_site);
}

Matrix noisy_gate_superop(const Gate& g, const Register& reg,
                          const NoiseSpec& noise) {
    if (reg.dim() > 32)
        throw InvalidArgument("noisy_gate_superop is a small-register utility");
    int n_qubits = 0;
    for (int i = 0; i < reg.size(); ++i)
        if (reg.is_qubit(i)) ++n_qubits;

    const long dim = reg.dim();
    Matrix s = Matrix::Identity(dim * dim, dim * dim);
    for (const Gate& p : flatten(g)) {
        Matrix u = Matrix::Identity(dim, dim);
        apply_local_left(u, cached_unitary(p, reg), p.sites, reg);
        s = unitary_superop(u) * s;
        if (p.kind != GateKind::Jc || !noise.enabled()) continue;
        const int mode_site = p.sites[1];
        const int k = mode_site - n_qubits;
        Matrix b_full = embed(
            OperatorSum().add(1.0, {{OpKind::Annihilate, mode_site}}), reg);
        Matrix n_full =
            embed(OperatorSum().add(1.0, {{OpKind::Number, mode_site}}), reg);
        Matrix l = liouvillian_superop(
            Matrix::Zero(dim, dim),
            {{noise.gamma.at(k), b_full}, {2 * noise.Gamma.at(k), n_full}});
        s = Matrix((noise.t_gate * l).exp()) * s;
    }
    return s;
}

// --- Lindblad evolution ---------------------------------------------------------

namespace {

struct ModeInfo {
    int site;
    long stride;
    int d;
    double gamma, Gamma;
};

std::vector<ModeInfo> mode_infos(const Register& reg, const NoiseSpec& noise) {
    std::vector<ModeInfo> modes;
    int k = 0;
    for (int i = 0; i < reg.size(); ++i) {
        if (!reg.is_mode(i)) continue;
        ModeInfo m;
        m.site = i;
        m.stride = reg.stride(i);
        m.d = reg.site(i).dim;
        m.gamma = k < int(noise.gamma.size()) ? noise.gamma[k] : 0.0;
        m.Gamma = k < int(noise.Gamma.size()) ? noise.Gamma[k] : 0.0;
        modes.push_back(m);
        ++k;
    }
    return modes;
}

// Precomputed dissipator application: the anticommutator and dephasing parts
// collapse into one elementwise factor matrix; the recycling term is a pair
// of sparse products with the embedded annihilation operator per mode.
struct DissipatorPlan {
    Matrix factor;                       // sum_k [-g_k (m+n)/2 - G_k (m-n)^2]
    std::vector<SparseC> b;              // sqrt(gamma_k) * b_k
    std::vector<SparseC> b_dag;
    bool active = false;
};

DissipatorPlan make_dissipator_plan(const Register& reg, const NoiseSpec& noise) {
    DissipatorPlan plan;
    const long dim = reg.dim();
    plan.factor = Matrix::Zero(dim, dim);
    auto modes = mode_infos(reg, noise);
    for (const ModeInfo& mo : modes) {
        if (mo.gamma == 0.0 && mo.Gamma == 0.0) continue;
        plan.active = true;
        std::vector<int> lvl(dim);
        for (long i = 0; i < dim; ++i)
            lvl[i] = static_cast<int>((i / mo.stride) % mo.d);
        for (long j = 0; j < dim; ++j)
            for (long i = 0; i < dim; ++i) {
                double m = lvl[i], n = lvl[j];
                plan.factor(i, j) += -mo.gamma * 0.5 * (m + n) -
                                     mo.Gamma * (m - n) * (m - n);
            }
        if (mo.gamma != 0.0) {
            OperatorSum b;
            b.add(std::sqrt(mo.gamma), {{OpKind::Annihilate, mo.site}});
            SparseC bs = embed_sparse(b, reg);
            plan.b.push_back(bs);
            plan.b_dag.push_back(SparseC(bs.adjoint()));
        }
    }
    return plan;
}

void add_dissipators(const DissipatorPlan& plan, const Matrix& rho, Matrix& out) {
    if (!plan.active) return;
    out.array() += plan.factor.array() * rho.array();
    for (size_t k = 0; k < plan.b.size(); ++k)
        out.noalias() += plan.b[k] * rho * plan.b_dag[k];
}

}  // namespace

std::vector<DensityMatrix> lindblad_evolve(const DensityMatrix& rho0,
                                           const HamiltonianFn& hfn,
                                           const NoiseSpec& noise, double t,
                                           double sample_dt,
                                           const LindbladOptions& opts,
                                           bool time_dependent) {
    if (sample_dt <= 0 || t < 0) throw InvalidArgument("bad evolution times");
    noise.validate();
    const Register& reg = rho0.reg;
    const long dim = reg.dim();
    const int n_samples = static_cast<int>(std::lround(t / sample_dt));
    std::vector<DensityMatrix> traj;
    traj.push_back(rho0);
    const double tr0 = rho0.trace_real();

    if (!time_dependent && dim <= 16 && !opts.force_rk4) {
        // Exact superoperator exponential per sample interval.
        Matrix h = embed(hfn(0.0), reg);
        std::vector<std::pair<double, Matrix>> collapse;
        auto modes = mode_infos(reg, noise);
        for (const auto& mo : modes) {
            OperatorSum b, n;
            b.add(1.0, {{OpKind::Annihilate, mo.site}});
            n.add(1.0, {{OpKind::Number, mo.site}});
            if (mo.gamma != 0.0) collapse.push_back({mo.gamma, embed(b, reg)});
            if (mo.Gamma != 0.0) collapse.push_back({2 * mo.Gamma, embed(n, reg)});
        }
        Matrix u = Matrix((sample_dt * liouvillian_superop(h, collapse)).exp());
        Eigen::Map<const Vector> v0(rho0.rho.data(), dim * dim);
        Vector v = v0;
        for (int s = 1; s <= n_samples; ++s) {
            v = u * v;
            Matrix r = Eigen::Map<const Matrix>(v.data(), dim, dim);
            traj.emplace_back(reg, r);
        }
        return traj;
    }

    // Fixed-step RK4 on the density matrix with a sparse Hamiltonian.
    DissipatorPlan plan = make_dissipator_plan(reg, noise);
    int sub = std::max(1, static_cast<int>(std::ceil(sample_dt / opts.dt)));
    const double dt = sample_dt / sub;
    Matrix rho = rho0.rho;
    double tnow = 0;
    // Every RK4 stage input is Hermitian (the Lindblad RHS preserves
    // Hermiticity), so -i[H, r] = -i(Q - Q^dag) with a single product Q = H r.
    Matrix q(dim, dim);
    auto rhs = [&](double tt, const Matrix& r, Matrix& out) {
        SparseC h = embed_sparse(hfn(tt), reg);
        q.noalias() = h * r;
        out = Complex(0, -1) * q;
        out.noalias() += Complex(0, 1) * q.adjoint();
        add_dissipators(plan, r, out);
    };
    Matrix k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), tmp(dim, dim);
    for (int s = 1; s <= n_samples; ++s) {
        for (int u = 0; u < sub; ++u) {
            rhs(tnow, rho, k1);
            tmp = rho + (dt / 2) * k1;
            rhs(tnow + dt / 2, tmp, k2);
            tmp = rho + (dt / 2) * k2;
            rhs(tnow + dt / 2, tmp, k3);
            tmp = rho + dt * k3;
            rhs(tnow + dt, tmp, k4);
            rho += (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
            tnow += dt;
        }
        if (std::abs(rho.trace().real() - tr0) > opts.trace_tol)
            throw IntegrationFailure(
                "lindblad_evolve: trace drift exceeded tolerance; use a smaller dt");
        traj.emplace_back(reg, rho);
    }
    return traj;
}

std::vector<DensityMatrix> lindblad_evolve(const DensityMatrix& rho0,
                                           const OperatorSum& h,
                                           const NoiseSpec& noise, double t,
                                           double sample_dt,
                                           const LindbladOptions& opts) {
    return lindblad_evolve(
        rho0, [&](double) { return h; }, noise, t, sample_dt, opts,
        /*time_dependent=*/false);
}

// --- noise mapping ---------------------------------------------------------------

EffectiveNoise effective_lindbladian(const Circuit& step, const Register& reg,
                                     const NoiseSpec& noise, double tau) {
    if (tau <= 0) throw InvalidArgument("tau must be positive");
    CircuitMetrics met = metrics(step, reg);
    EffectiveNoise eff;
    for (size_t k = 0; k < met.jc_per_mode.size(); ++k) {
        double scale = met.jc_per_mode[k] * noise.t_gate / tau;
        eff.gamma_eff.push_back(scale * (k < noise.gamma.size() ? noise.gamma[k] : 0));
        eff.Gamma_eff.push_back(scale * (k < noise.Gamma.size() ? noise.Gamma[k] : 0));
    }
    return eff;
}

namespace {

TimeSeries run_trotter(const ModelSpec& model, const TrotterPlan& plan,
                       const NoiseSpec* noise, int d,
                       const std::vector<int>& occ,
                       const NamedObservables& observables) {
    plan.validate();
    ModelSpec lowered = lower_model(model);
    Register reg = compiled_register(model, d);
    if (static_cast<int>(occ.size()) != reg.size())
        throw InvalidArgument("initial occupation does not match the register");
    int n_qubits = reg.size() - lowered.n_modes();

    TimeSeries ts;
    for (const auto& [name, op] : observables) ts.names.push_back(name);
    ts.values.assign(observables.size(), {});

    const bool noisy = noise != nullptr &&
                       (noise->enabled() || noise->chi_t != 0 || noise->kerr_t != 0);
    QuantumState psi = QuantumState::basis(reg, occ);
    DensityMatrix rho = noisy ? DensityMatrix::basis(reg, occ) : DensityMatrix();

    // The damping/dephasing channel is banded; storing it sparse makes the
    // per-gate application cheap.
    std::vector<SparseC> channels, half_channels, idle_channels;
    if (noisy && noise->enabled()) {
        for (int k = 0; k < lowered.n_modes(); ++k) {
            double g = k < int(noise->gamma.size()) ? noise->gamma[k] : 0;
            double G = k < int(noise->Gamma.size()) ? noise->Gamma[k] : 0;
            channels.push_back(
                mode_noise_channel(d, g, G, noise->t_gate).sparseView(1.0, 1e-14));
            if (noise->symmetrized_placement)
                half_channels.push_back(mode_noise_channel(d, g, G, noise->t_gate / 2)
                                            .sparseView(1.0, 1e-14));
            if (noise->idle_time_per_step > 0)
                idle_channels.push_back(
                    mode_noise_channel(d, g, G, noise->idle_time_per_step)
                        .sparseView(1.0, 1e-14));
        }
    }

    auto record = [&](double t) {
        ts.times.push_back(t);
        for (size_t o = 0; o < observables.size(); ++o) {
            Complex v = noisy ? expectation(rho, observables[o].second)
                              : expectation(psi, observables[o].second);
            ts.values[o].push_back(v.real());
        }
    };
    record(0.0);

    for (int m = 0; m < plan.n_steps; ++m) {
        Circuit step = trotter_step(lowered, plan, m);
        if (!noisy) {
            apply(step, psi);
        } else {
            for (const Gate& p : flatten(step)) {
                bool jc = p.kind == GateKind::Jc;
                if (jc && noise->symmetrized_placement && noise->enabled())
                    apply_mode_channel(rho, half_channels[p.sites[1] - n_qubits],
                                       p.sites[1]);
                conjugate_local(rho, cached_unitary(p, rho.reg), p.sites);
                if (!jc) continue;
                if (noise->chi_t != 0 || noise->kerr_t != 0) {
                    Gate err = coherent_error_gate(p.sites[0], p.sites[1],
                                                   noise->chi_t, noise->kerr_t);
                    conjugate_local(rho, cached_unitary(err, rho.reg), err.sites);
                }
                if (noise->enabled()) {
                    const auto& ch = noise->symmetrized_placement
                                         ? half_channels[p.sites[1] - n_qubits]
                                         : channels[p.sites[1] - n_qubits];
                    apply_mode_channel(rho, ch, p.sites[1]);
                }
            }
            if (!idle_channels.empty())
                for (int k = 0; k < lowered.n_modes(); ++k)
                    apply_mode_channel(rho, idle_channels[k], n_qubits + k);
        }
        record((m + 1) * plan.tau);
    }
    return ts;
}

}  // namespace

TimeSeries simulate_noisy_trotter(const ModelSpec& model, const TrotterPlan& plan,
                                  const NoiseSpec& noise, int boson_levels,
                                  const std::vector<int>& initial_occupation,
                                  const NamedObservables& observables) {
    noise.validate();
    return run_trotter(model, plan, &noise, boson_levels, initial_occupation,
                       observables);
}

TimeSeries simulate_pure_trotter(const ModelSpec& model, const TrotterPlan& plan,
                                 int boson_levels,
                                 const std::vector<int>& initial_occupation,
                                 const NamedObservables& observables) {
    return run_trotter(model, plan, nullptr, boson_levels, initial_occupation,
                       observables);
}

// --- spectral function ------------------------------------------------------------

std::vector<double> spectral_function(const std::vector<double>& v,
                                      const std::vector<double>& omega_k,
                                      const std::vector<double>& gamma_star,
                                      const std::vector<double>& omega_grid) {
    if (v.size() != omega_k.size() || v.size() != gamma_star.size())
        throw InvalidArgument("spectral_function: mismatched mode lists");
    for (double g : gamma_star)
        if (g <= 0)
            throw ZeroBroadening(
                "spectral_function needs a finite broadening; delta peaks are "
                "unsupported");
    std::vector<double> out;
    out.reserve(omega_grid.size());
    for (double w : omega_grid) {
        double s = 0;
        for (size_t k = 0; k < v.size(); ++k) {
            double d = w - omega_k[k];
            s += v[k] * v[k] * 2 * gamma_star[k] /
                 (gamma_star[k] * gamma_star[k] + d * d);
        }
        out.push_back(2 * M_PI * s);
    }
    return out;
}

std::vector<Complex> xx_correlation(double v, double omega0, double gamma,
                                    double Gamma, int d,
                                    const std::vector<double>& times) {
    if (times.size() < 2) throw InvalidArgument("need a time grid");
    const double dt = times[1] - times[0];
    for (size_t i = 1; i < times.size(); ++i)
        if (std::abs(times[i] - times[i - 1] - dt) > 1e-9)
            throw InvalidArgument("xx_correlation needs a uniform time grid");

    Matrix b = site_matrix(OpKind::Annihilate, d);
    Matrix n = site_matrix(OpKind::Number, d);
    Matrix x = b + Matrix(b.adjoint());
    Matrix h = omega0 * n;
    Matrix u = Matrix(
        (dt * liouvillian_superop(h, {{gamma, b}, {2 * Gamma, n}})).exp());

    // Quantum regression: evolve X rho_vac under the same Lindbladian.
    Matrix lam = Matrix::Zero(d, d);
    Matrix rho_vac = Matrix::Zero(d, d);
    rho_vac(0, 0) = 1.0;
    lam = x * rho_vac;
    std::vector<Complex> out;
    Eigen::Map<Vector> vl(lam.data(), d * d);
    for (size_t i = 0; i < times.size(); ++i) {
        if (i > 0) vl = u * vl;
        Matrix cur = Eigen::Map<const Matrix>(vl.data(), d, d);
        out.push_back(v * v * (x * cur).trace());
    }
    return out;
}

std::vector<double> spectrum_from_correlation(const std::vector<double>& times,
                                              const std::vector<Complex>& corr,
                                              const std::vector<double>& omega_grid) {
    if (times.size() != corr.size()) throw InvalidArgument("length mismatch");
    std::vector<double> out;
    out.reserve(omega_grid.size());
    for (double w : omega_grid) {
        // Trapezoid over t >= 0 with C(-t) = conj C(t):
        // S = 2 pi * 2 Re int_0^T e^{i w t} C(t) dt.
        Complex acc = 0;
        for (size_t i = 1; i < times.size(); ++i) {
            double dt = times[i] - times[i - 1];
            Complex f1 = std::exp(Complex(0, w * times[i - 1])) * corr[i - 1];
            Complex f2 = std::exp(Complex(0, w * times[i])) * corr[i];
            acc += 0.5 * dt * (f1 + f2);
        }
        out.push_back(2 * M_PI * 2 * acc.real());
    }
    return out;
}

}  // namespace rqsim
