#include "rqsim/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace rqsim {

AlphaResult alpha1(const std::vector<OperatorSum>& partials, const Register& reg,
                   double tau) {
    if (partials.size() < 2)
        throw InvalidArgument("alpha1 needs at least two partial Hamiltonians");
    std::vector<Matrix> h;
    for (const auto& p : partials) h.push_back(embed(p, reg));
    Matrix acc = Matrix::Zero(reg.dim(), reg.dim());
    for (size_t a = 0; a < h.size(); ++a)
        for (size_t b = a + 1; b < h.size(); ++b) acc += h[b] * h[a] - h[a] * h[b];
    AlphaResult r;
    r.op = -tau * tau * 0.5 * acc;  // (-i tau)^2 = -tau^2
    r.norm = spectral_norm(r.op);
    return r;
}

AlphaResult alpha2_exact(const OperatorSum& a, const OperatorSum& b,
                         const Register& reg, double tau) {
    Matrix A = embed(a, reg), B = embed(b, reg);
    Matrix ab = A * B - B * A;
    Matrix apb = A + B, amb = A - B;
    Matrix inner = -0.5 * (apb * ab - ab * apb) + (1.0 / 6.0) * (amb * ab - ab * amb);
    AlphaResult r;
    r.op = Complex(0, 1) * std::pow(tau / 2, 3) * inner;
    r.norm = spectral_norm(r.op);
    return r;
}

double alpha2_bound(const std::vector<OperatorSum>& partials, const Register& reg,
                    double tau) {
    std::vector<Matrix> h;
    for (const auto& p : partials) h.push_back(embed(p, reg));
    double sum = 0;
    for (const auto& hi : h)
        for (const auto& hj : h)
            for (const auto& hk : h) {
                Matrix inner = hj * hk - hk * hj;
                sum += spectral_norm(hi * inner - inner * hi);
            }
    return std::pow(tau, 3) * sum;
}

Matrix principal_log_unitary(const Matrix& u) {
    Eigen::ComplexEigenSolver<Matrix> es(u);
    const auto& vals = es.eigenvalues();
    Vector logs(vals.size());
    for (long i = 0; i < vals.size(); ++i) {
        double phase = std::arg(vals(i));
        if (std::abs(std::abs(phase) - M_PI) < 1e-6)
            throw InvalidArgument(
                "principal_log_unitary: eigenphase at the branch cut");
        logs(i) = Complex(0, phase);
    }
    return es.eigenvectors() * logs.asDiagonal() * es.eigenvectors().inverse();
}

Matrix defect_generator(const Matrix& u, const Matrix& h_exact, double t) {
    Matrix half = exact_propagator(h_exact, -t / 2);
    return principal_log_unitary(half * u * half);
}

FitResult fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InvalidArgument("fit needs matched arrays of length >= 2");
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    FitResult f;
    double denom = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0;
    for (int i = 0; i < n; ++i) {
        double r = y[i] - (f.slope * x[i] + f.intercept);
        ss += r * r;
    }
    if (n > 2) f.stderr_slope = std::sqrt(ss / (n - 2) * n / denom);
    return f;
}

FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0 || y[i] <= 0)
            throw InvalidArgument("fit_loglog needs positive data");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return fit_linear(lx, ly);
}

double dominant_frequency(const std::vector<double>& series) {
    const int n = static_cast<int>(series.size());
    if (n < 4) throw InvalidArgument("series too short for a frequency fit");
    double mean = 0;
    for (double v : series) mean += v;
    mean /= n;
    auto power = [&](double w) {
        Complex acc = 0;
        for (int s = 0; s < n; ++s)
            acc += (series[s] - mean) * std::exp(Complex(0, -w * s));
        return std::norm(acc);
    };
    // Coarse scan, then parabolic refinement.
    double best_w = 0, best_p = -1;
    const int grid = 2048;
    for (int k = 1; k < grid; ++k) {
        double w = M_PI * k / grid;
        double p = power(w);
        if (p > best_p) {
            best_p = p;
            best_w = w;
        }
    }
    double dw = M_PI / grid;
    double pm = power(best_w - dw), pp = power(best_w + dw);
    double denom = pm - 2 * best_p + pp;
    if (std::abs(denom) > 1e-30)
        best_w += 0.5 * dw * (pm - pp) / denom;
    return best_w;
}

// --- Trotter error scan -----------------------------------------------------------

double TrotterErrorReport::error(int order, double tau, int d) const {
    for (const auto& e : entries)
        if (e.order == order && e.d == d && std::abs(e.tau - tau) < 1e-12)
            return e.max_err;
    throw InvalidArgument("no such scan entry");
}

TrotterErrorReport trotter_error_scan(const ModelSpec& model,
                                      const std::vector<int>& orders,
                                      const std::vector<double>& taus,
                                      const std::vector<int>& ds, double t_final,
                                      const std::vector<int>& initial_occupation) {
    TrotterErrorReport report;
    ModelSpec lowered = lower_model(model);
    for (int d : ds) {
        Register reg = compiled_register(model, d);
        if (static_cast<int>(initial_occupation.size()) != reg.size())
            throw InvalidArgument("initial occupation does not match the register");
        NamedObservables obs;
        for (int i = 0; i < lowered.n_sites; ++i) {
            OperatorSum p;
            p.add(0.5, {});
            p.add(0.5, {{OpKind::SigmaZ, i}});
            obs.push_back({"P" + std::to_string(i), p});
        }
        // Mode occupations carry most of the Trotter error (it builds up at
        // high boson numbers), so they join the error observables.
        for (int k = 0; k < lowered.n_modes(); ++k) {
            OperatorSum n;
            n.add(1.0, {{OpKind::Number, lowered.n_sites + k}});
            obs.push_back({"n" + std::to_string(k), n});
        }
        // Exact lab-frame oracle; populations are frame invariant.
        Eigen::SelfAdjointEigenSolver<Matrix> es(
            embed(build(lowered, Frame::lab(), 0.0), reg));
        Vector psi0 = QuantumState::basis(reg, initial_occupation).amp;
        auto exact_at = [&](double t) {
            Vector phases(es.eigenvalues().size());
            for (long i = 0; i < phases.size(); ++i)
                phases(i) = std::exp(Complex(0, -t * es.eigenvalues()(i)));
            Vector v = es.eigenvectors() *
                       (phases.asDiagonal() *
                        (es.eigenvectors().adjoint() * psi0));
            return QuantumState(reg, v);
        };

        for (int order : orders) {
            for (double tau : taus) {
                TrotterPlan plan;
                plan.order = order;
                plan.tau = tau;
                plan.n_steps = std::max(1, int(std::lround(t_final / tau)));
                TimeSeries series = simulate_pure_trotter(lowered, plan, d,
                                                          initial_occupation, obs);
                double max_err = 0;
                for (size_t s = 0; s < series.times.size(); ++s) {
                    QuantumState ex = exact_at(series.times[s]);
                    for (size_t o = 0; o < obs.size(); ++o) {
                        double ref = expectation(ex, obs[o].second).real();
                        max_err = std::max(
                            max_err, std::abs(series.values[o][s] - ref));
                    }
                }
                report.entries.push_back({order, tau, d, max_err});
            }
        }
    }
    int dmax = *std::max_element(ds.begin(), ds.end());
    for (int order : orders) {
        std::vector<double> xs, ys;
        for (const auto& e : report.entries)
            if (e.order == order && e.d == dmax && e.max_err > 0) {
                xs.push_back(e.tau);
                ys.push_back(e.max_err);
            }
        if (xs.size() >= 2) report.tau_exponent[order] = fit_loglog(xs, ys);
    }
    return report;
}

// --- digitized Rabi replications ---------------------------------------------------

ChevronResult replicate_manifold_demo(Manifold manifold,
                                      const std::vector<double>& dphis,
                                      int n_steps, double gamma_t_gate,
                                      int boson_levels, int placement) {
    const int min_d = manifold == Manifold::Third ? 4 : 3;
    if (boson_levels < min_d)
        throw InsufficientTruncation("manifold demo needs more boson levels");
    Register reg({qubit_site(), mode_site(boson_levels)});

    ChevronResult res;
    res.dphis = dphis;
    res.n_steps = n_steps;
    res.phi0 = 0.0;  // frame tracking is exact in simulation
    res.gamma_t_gate = gamma_t_gate;

    const std::vector<int> init =
        manifold == Manifold::Third ? std::vector<int>{1, 2} : std::vector<int>{1, 1};
    OperatorSum pe;  // excited-qubit population (1 - sigma_z)/2
    pe.add(0.5, {});
    pe.add(-0.5, {{OpKind::SigmaZ, 0}});

    SparseC channel;
    if (gamma_t_gate > 0)
        channel = mode_noise_channel(boson_levels, gamma_t_gate, 0.0, 1.0)
                      .sparseView(1.0, 1e-14);

    for (double dphi : dphis) {
        double phi = res.phi0 + dphi;
        std::vector<Gate> step;
        if (manifold == Manifold::Third) {
            step = {jc_gate(0, 1, M_PI / 2), rz_gate(0, phi)};
        } else {
            // Three JC gates with frame-tracking corrections (exactly zero
            // here); the modeled detuning phase goes after the chosen gate.
            for (int g = 0; g < 3; ++g) {
                step.push_back(jc_gate(0, 1, M_PI / 2));
                if (g == placement % 3) step.push_back(rz_gate(0, phi));
            }
        }

        std::vector<double> pops;
        if (gamma_t_gate <= 0) {
            QuantumState psi = QuantumState::basis(reg, init);
            for (int s = 0; s < n_steps; ++s) {
                for (const Gate& g : step) apply(g, psi);
                pops.push_back(expectation(psi, pe).real());
            }
        } else {
            DensityMatrix rho = DensityMatrix::basis(reg, init);
            for (int s = 0; s < n_steps; ++s) {
                for (const Gate& g : step) {
                    apply(g, rho);
                    if (g.kind == GateKind::Jc) apply_mode_channel(rho, channel, 1);
                }
                pops.push_back(expectation(rho, pe).real());
            }
        }
        res.population.push_back(std::move(pops));
    }
    return res;
}

InitWithAuxResult initialize_with_aux(int boson_levels,
                                      const std::vector<double>& varphi_grid,
                                      double gamma_t_gate) {
    if (boson_levels < 4)
        throw InsufficientTruncation("initialization needs d >= 4");
    if (varphi_grid.empty()) throw InvalidArgument("empty varphi grid");
    // Register: [aux qubit, main qubit, mode].
    Register reg({qubit_site(), qubit_site(), mode_site(boson_levels)});

    auto build_circuit = [&](double varphi) {
        Circuit c;
        c.push(x_gate(1));  // main qubit to |1>
        c.push(x_gate(0));
        c.push(jc_gate(0, 2, M_PI / 2));  // full transfer in the first manifold
        c.push(x_gate(0));
        c.push(rz_gate(0, varphi));
        c.push(jc_gate(0, 2, M_PI / (2 * std::sqrt(2.0))));  // full in the second
        return c;
    };

    Matrix channel;
    if (gamma_t_gate > 0)
        channel = mode_noise_channel(boson_levels, gamma_t_gate, 0.0, 1.0);

    auto aux_ground_prob = [&](double varphi, DensityMatrix* out_rho) {
        Circuit c = build_circuit(varphi);
        DensityMatrix rho = DensityMatrix::basis(reg, {0, 0, 0});
        for (const Gate& g : flatten(c)) {
            conjugate_local(rho, cached_unitary(g, reg), g.sites);
            if (g.kind == GateKind::Jc && gamma_t_gate > 0)
                apply_mode_channel(rho, channel, 2);
        }
        // Probability of aux = |0>.
        double p = 0;
        for (long i = 0; i < reg.dim(); ++i)
            if (occupation_of(reg, i)[0] == 0) p += rho.rho(i, i).real();
        if (out_rho) *out_rho = rho;
        return p;
    };

    InitWithAuxResult res;
    double best_p = -1;
    for (double varphi : varphi_grid) {
        double p = aux_ground_prob(varphi, nullptr);
        if (p > best_p) {
            best_p = p;
            res.best_varphi = varphi;
        }
    }
    DensityMatrix rho;
    res.acceptance = aux_ground_prob(res.best_varphi, &rho);
    res.circuit = build_circuit(res.best_varphi);

    // Post-select aux = |0> and compute the overlap with |1_q, 2_r>.
    long target = basis_index(reg, {0, 1, 2});
    double num = rho.rho(target, target).real();
    res.fidelity = res.acceptance > 0 ? num / res.acceptance : 0.0;
    return res;
}

// --- observables -------------------------------------------------------------------

NamedObservables observables_suite(const ModelSpec& model_in) {
    ModelSpec model = model_in.statistics == Statistics::Fermion
                          ? jordan_wigner(model_in)
                          : model_in;
    const int nq = model.n_sites;
    NamedObservables obs;
    for (int i = 0; i < nq; ++i) {
        OperatorSum p;
        p.add(0.5, {});
        p.add(0.5, {{OpKind::SigmaZ, i}});
        obs.push_back({"P" + std::to_string(i), p});
    }
    for (int k = 0; k < model.n_modes(); ++k) {
        OperatorSum n;
        n.add(1.0, {{OpKind::Number, nq + k}});
        obs.push_back({"n" + std::to_string(k), n});
    }
    for (int i = 0; i < nq; ++i)
        for (int j = i + 1; j < nq; ++j) {
            OperatorSum re, im;
            re.add(0.5, {{OpKind::SigmaPlus, i}, {OpKind::SigmaMinus, j}});
            re.add(0.5, {{OpKind::SigmaPlus, j}, {OpKind::SigmaMinus, i}});
            im.add(Complex(0, -0.5), {{OpKind::SigmaPlus, i}, {OpKind::SigmaMinus, j}});
            im.add(Complex(0, 0.5), {{OpKind::SigmaPlus, j}, {OpKind::SigmaMinus, i}});
            obs.push_back({"spsm" + std::to_string(i) + std::to_string(j) + "_re", re});
            obs.push_back({"spsm" + std::to_string(i) + std::to_string(j) + "_im", im});
        }
    // Mixed system-boson correlators <C_j b_k^dag> for linear couplings.
    for (size_t t = 0; t < model.couplings.size(); ++t) {
        const auto& c = model.couplings[t];
        if (c.sites.size() != 1) continue;
        OpKind kind = c.kind == CouplingKind::Longitudinal ? OpKind::SigmaZ
                      : c.kind == CouplingKind::Transverse ? OpKind::SigmaX
                                                           : OpKind::SigmaMinus;
        OperatorSum re, im;
        re.add(0.5, {{kind, c.sites[0]}, {OpKind::Create, nq + c.mode}});
        OpKind kdag = kind == OpKind::SigmaMinus ? OpKind::SigmaPlus : kind;
        re.add(0.5, {{kdag, c.sites[0]}, {OpKind::Annihilate, nq + c.mode}});
        im.add(Complex(0, -0.5), {{kind, c.sites[0]}, {OpKind::Create, nq + c.mode}});
        im.add(Complex(0, 0.5), {{kdag, c.sites[0]}, {OpKind::Annihilate, nq + c.mode}});
        std::string tag = "Cb" + std::to_string(c.sites[0]) + std::to_string(c.mode);
        obs.push_back({tag + "_re", re});
        obs.push_back({tag + "_im", im});
    }
    // Total energy: system terms plus sum_k omega_k n_k.
    ModelSpec sys = model;
    sys.couplings.clear();
    OperatorSum energy = build(sys, Frame::lab(), 0.0);
    obs.push_back({"energy", energy});
    return obs;
}

std::vector<double> sample_populations(const QuantumState& psi, int n_qubits,
                                       int n_shots, uint64_t seed) {
    const Register& reg = psi.reg;
    std::vector<double> probs(reg.dim());
    for (long i = 0; i < reg.dim(); ++i) probs[i] = std::norm(psi.amp(i));
    std::mt19937_64 rng(seed);
    std::discrete_distribution<long> dist(probs.begin(), probs.end());
    std::vector<long> ground_counts(n_qubits, 0);
    for (int s = 0; s < n_shots; ++s) {
        long outcome = dist(rng);
        auto occ = occupation_of(reg, outcome);
        for (int q = 0; q < n_qubits; ++q)
            if (occ[q] == 0) ++ground_counts[q];
    }
    std::vector<double> out(n_qubits);
    for (int q = 0; q < n_qubits; ++q) out[q] = double(ground_counts[q]) / n_shots;
    return out;
}

double truncation_drift(const std::function<TimeSeries(int)>& run, int d) {
    TimeSeries a = run(d);
    TimeSeries b = run(d + 2);
    double drift = 0;
    for (size_t o = 0; o < a.values.size() && o < b.values.size(); ++o)
        for (size_t s = 0; s < a.values[o].size() && s < b.values[o].size(); ++s)
            drift = std::max(drift, std::abs(a.values[o][s] - b.values[o][s]));
    return drift;
}

}  // namespace rqsim
