// Acceptance suite: one test case and one printed PASS/FAIL line per
// criterion. Run the binary directly to see the summary lines.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdio>

#include "rqsim/analysis.hpp"
#include "rqsim/cli.hpp"
#include "support/fermion.hpp"
#include "support/util.hpp"

using namespace rqsim;
namespace ts = rqsim::testsupport;

namespace {

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("ACCEPTANCE %2d %s  %s\n", criterion, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
}

NamedObservables spin_populations(int n) {
    NamedObservables obs;
    for (int i = 0; i < n; ++i) {
        OperatorSum p;
        p.add(0.5, {});
        p.add(0.5, {{OpKind::SigmaZ, i}});
        obs.push_back({"P" + std::to_string(i), p});
    }
    return obs;
}

double max_series_dev(const TimeSeries& a,
                      const std::vector<DensityMatrix>& traj,
                      const NamedObservables& obs) {
    double dev = 0;
    for (size_t s = 0; s < a.times.size() && s < traj.size(); ++s)
        for (size_t o = 0; o < obs.size(); ++o)
            dev = std::max(dev, std::abs(a.values[o][s] -
                                         expectation(traj[s], obs[o].second).real()));
    return dev;
}

}  // namespace

TEST_CASE("criterion 1: noise mapping on the two-spin/two-mode example") {
    Stopwatch watch;
    ModelSpec m = dicke_example_2x2();
    const int d = 8;
    const double tau = 0.2, T = 20.0, tg_gamma = 0.005;
    TrotterPlan plan;
    plan.order = 2;
    plan.tau = tau;
    plan.n_steps = int(T / tau + 0.5);

    NoiseSpec noise = NoiseSpec::none(2);
    noise.t_gate = 1.0;
    noise.gamma = {tg_gamma, tg_gamma};

    Register reg = compiled_register(m, d);
    std::vector<int> occ{0, 0, 1, 0};
    NamedObservables obs = spin_populations(2);

    TimeSeries noisy = simulate_noisy_trotter(m, plan, noise, d, occ, obs);

    EffectiveNoise eff =
        effective_lindbladian(trotter_step(m, plan, 0), reg, noise, tau);
    NoiseSpec lind = NoiseSpec::none(2);
    lind.gamma = eff.gamma_eff;
    lind.Gamma = eff.Gamma_eff;
    DensityMatrix rho0 = DensityMatrix::basis(reg, occ);
    auto traj = lindblad_evolve(
        rho0, [&](double t) { return build(m, Frame::rotating(), t); }, lind, T,
        tau, {}, true);
    double dev_noisy = max_series_dev(noisy, traj, obs);

    // Noiseless Trotter error vs the exact solution shrinks from tau 0.2 to 0.1.
    Eigen::SelfAdjointEigenSolver<Matrix> es(embed(build(m, Frame::lab(), 0.0), reg));
    Vector psi0 = QuantumState::basis(reg, occ).amp;
    auto trotter_err = [&](double tau2) {
        TrotterPlan p2 = plan;
        p2.tau = tau2;
        p2.n_steps = int(T / tau2 + 0.5);
        TimeSeries pure = simulate_pure_trotter(m, p2, d, occ, obs);
        double err = 0;
        for (size_t s = 0; s < pure.times.size(); ++s) {
            Vector ph(es.eigenvalues().size());
            for (long i = 0; i < ph.size(); ++i)
                ph(i) = std::exp(Complex(0, -pure.times[s] * es.eigenvalues()(i)));
            Vector v = es.eigenvectors() *
                       (ph.asDiagonal() * (es.eigenvectors().adjoint() * psi0));
            QuantumState q(reg, v);
            for (size_t o = 0; o < obs.size(); ++o)
                err = std::max(err, std::abs(pure.values[o][s] -
                                             expectation(q, obs[o].second).real()));
        }
        return err;
    };
    double err02 = trotter_err(0.2);
    double err01 = trotter_err(0.1);

    bool pass = dev_noisy <= 0.02 && err02 > 1e-4 && err01 < err02;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "noisy-vs-lindblad max dev %.4f (tol 0.02); trotter err "
                  "%.4f -> %.4f at tau 0.2 -> 0.1; %.1f s",
                  dev_noisy, err02, err01, watch.seconds());
    report(1, pass, buf);
    CHECK(dev_noisy <= 0.02);
    CHECK(err02 > 1e-4);
    CHECK(err01 < err02);
    WARN(watch.seconds() < 60.0);
}

TEST_CASE("criterion 2: broadening formula for an all-to-all network") {
    const int n = 10;
    std::vector<double> eps(n, 1.0), omega(n, 1.0);
    std::vector<std::tuple<int, int, double>> v;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) v.push_back({i, k, 0.3});
    ModelSpec m = dicke(eps, {}, omega, v);
    TrotterPlan p;
    p.order = 1;
    p.tau = 0.2;
    p.n_steps = 1;
    Circuit step = trotter_step(m, p, 0);
    Register reg = compiled_register(m, 2);
    CircuitMetrics met = metrics(step, reg);

    bool d_ok = true;
    for (long dk : met.jc_per_mode) d_ok = d_ok && (dk == 20);

    NoiseSpec noise = NoiseSpec::none(n);
    noise.t_gate = 1.0;
    noise.gamma.assign(n, 2e-3);  // gamma* = 1e-3
    EffectiveNoise eff = effective_lindbladian(step, reg, noise, 0.2);
    bool rate_ok = true;
    for (int k = 0; k < n; ++k)
        rate_ok = rate_ok && std::abs(eff.gamma_star_eff(k) - 0.1) < 1e-12;

    report(2, d_ok && rate_ok,
           "D_k = 20 structurally; gamma*_eff = 0.1 exactly from the formula");
    CHECK(d_ok);
    CHECK(rate_ok);
}

TEST_CASE("criterion 3: spectral function vs time-domain oracle") {
    Stopwatch watch;
    const double v = 1.0, w0 = 1.0, gamma = 0.2, Gamma = 0.0;
    const double gs = gamma / 2 + Gamma;
    std::vector<double> times;
    for (double t = 0; t <= 80.0; t += 0.02) times.push_back(t);
    auto corr = xx_correlation(v, w0, gamma, Gamma, 8, times);

    std::vector<double> grid{w0, w0 + gs, w0 - gs};
    auto numeric = spectrum_from_correlation(times, corr, grid);
    auto formula = spectral_function({v}, {w0}, {gs}, grid);
    double peak_rel = std::abs(numeric[0] - formula[0]) / formula[0];
    double hm1 = std::abs(numeric[1] - formula[1]) / formula[1];
    double hm2 = std::abs(numeric[2] - formula[2]) / formula[2];

    bool pass = peak_rel < 0.02 && hm1 < 0.05 && hm2 < 0.05;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "peak rel err %.4f (tol 0.02); half-max %.4f/%.4f (tol 0.05); "
                  "%.1f s",
                  peak_rel, hm1, hm2, watch.seconds());
    report(3, pass, buf);
    CHECK(peak_rel < 0.02);
    CHECK(hm1 < 0.05);
    CHECK(hm2 < 0.05);
    WARN(watch.seconds() < 10.0);
}

TEST_CASE("criterion 4: manifold angles from fitted rotations") {
    Register reg({qubit_site(), mode_site(6)});

    // Accumulated rotation angle of k consecutive pi/2 JC gates in the
    // (|1,n-1>, |0,n>) manifold, unwrapped by continuity.
    auto fitted_angle = [&](int n_manifold, int k_gates) {
        std::vector<int> up{1, n_manifold - 1}, dn{0, n_manifold};
        QuantumState psi = QuantumState::basis(reg, up);
        for (int k = 0; k < k_gates; ++k) apply(jc_gate(0, 1, M_PI / 2), psi);
        Complex c = psi.amp(basis_index(reg, up));
        Complex s = Complex(0, 1) * psi.amp(basis_index(reg, dn));
        double raw = std::atan2(s.real(), c.real());
        double base = std::sqrt(double(n_manifold)) * M_PI / 2;
        double expect = k_gates * base;
        return raw + 2 * M_PI * std::round((expect - raw) / (2 * M_PI));
    };

    double third1 = fitted_angle(3, 1);
    double sec1 = fitted_angle(2, 1);
    double sec2 = fitted_angle(2, 2);
    double sec3 = fitted_angle(2, 3);
    double e1 = std::abs(third1 - (M_PI - 0.42));
    double e2 = std::abs(sec1 - (M_PI - 0.92));
    double e3 = std::abs(sec2 - (M_PI + 1.30));
    double e4 = std::abs(sec3 - (2 * M_PI + 0.38));
    bool pass = e1 < 0.005 && e2 < 0.005 && e3 < 0.005 && e4 < 0.005;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "angle errors %.4f %.4f %.4f %.4f rad (tol 0.005)", e1, e2, e3,
                  e4);
    report(4, pass, buf);
    CHECK(e1 < 0.005);
    CHECK(e2 < 0.005);
    CHECK(e3 < 0.005);
    CHECK(e4 < 0.005);
}

TEST_CASE("criterion 5: chevron replication") {
    Stopwatch watch;
    const int n_steps = 40, n_phi = 64;
    std::vector<double> dphis;
    for (int k = 0; k < n_phi; ++k)
        dphis.push_back(-M_PI / 2 + M_PI * k / (n_phi - 1));

    ChevronResult clean = replicate_manifold_demo(Manifold::Third, dphis, n_steps,
                                                  0.0, 6);
    const double theta_eff = M_PI - std::sqrt(3.0) * M_PI / 2;  // 0.42 under-rotation
    double worst = 0;
    for (int p = 0; p < n_phi; ++p) {
        double target = std::sqrt(dphis[p] * dphis[p] + 4 * theta_eff * theta_eff);
        double fitted = dominant_frequency(clean.population[p]);
        worst = std::max(worst, std::abs(fitted - target) / target);
    }

    ChevronResult noisy = replicate_manifold_demo(Manifold::Third, dphis, n_steps,
                                                  0.03, 6);
    auto contrast = [&](int s0) {
        double lo = 1, hi = 0;
        for (int p = 0; p < n_phi; ++p)
            for (int s = s0; s < s0 + 8; ++s) {
                lo = std::min(lo, noisy.population[p][s]);
                hi = std::max(hi, noisy.population[p][s]);
            }
        return hi - lo;
    };
    double c0 = contrast(0), c1 = contrast(16), c2 = contrast(32);
    bool monotone = c0 > c1 && c1 > c2 && c2 < 0.8 * c0;

    bool pass = worst < 0.03 && monotone;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "worst Rabi-freq rel err %.4f (tol 0.03); contrast %.3f -> "
                  "%.3f -> %.3f; %.1f s",
                  worst, c0, c1, c2, watch.seconds());
    report(5, pass, buf);
    CHECK(worst < 0.03);
    CHECK(monotone);
    WARN(watch.seconds() < 120.0);
}

TEST_CASE("criterion 6: Trotter order exponents and truncation pattern") {
    ModelSpec m = dicke_example_2x2();
    auto fits = trotter_error_scan(m, {1, 2}, {0.4, 0.2, 0.1, 0.05}, {8}, 4.0,
                                   {0, 0, 1, 0});
    double s1 = fits.tau_exponent.at(1).slope;
    double s2 = fits.tau_exponent.at(2).slope;

    auto pattern = trotter_error_scan(m, {2}, {0.3, 0.2}, {4, 8}, 20.0,
                                      {0, 0, 1, 0});
    double e38 = pattern.error(2, 0.3, 8);
    double e28 = pattern.error(2, 0.2, 8);
    double e24 = pattern.error(2, 0.2, 4);

    bool pass = std::abs(s1 - 1.0) <= 0.2 && std::abs(s2 - 2.0) <= 0.2 &&
                e38 > e28 && e28 > e24;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "order exponents %.2f / %.2f (want 1 / 2 +-0.2); error "
                  "pattern %.3f > %.3f > %.3f",
                  s1, s2, e38, e28, e24);
    report(6, pass, buf);
    CHECK(s1 == doctest::Approx(1.0).epsilon(0.2));
    CHECK(s2 == doctest::Approx(2.0).epsilon(0.1));
    CHECK(e38 > e28);
    CHECK(e28 > e24);
}

TEST_CASE("criterion 7: alpha1 exactness and the measured first-order defect") {
    const int d = 6;
    Register reg({qubit_site(), mode_site(d)});
    OperatorSum jc = ts::jc_hamiltonian(0, 1, 1.0);
    OperatorSum ajc;
    ajc.add(1.0, {{OpKind::SigmaPlus, 0}, {OpKind::Create, 1}});
    ajc.add(1.0, {{OpKind::SigmaMinus, 0}, {OpKind::Annihilate, 1}});

    const double tauv = 0.02;
    AlphaResult a1 = alpha1({jc, ajc}, reg, tauv);

    OperatorSum sz, bd, b;
    sz.add(1.0, {{OpKind::SigmaZ, 0}});
    bd.add(1.0, {{OpKind::Create, 1}});
    b.add(1.0, {{OpKind::Annihilate, 1}});
    Matrix mbd = embed(bd, reg), mb = embed(b, reg);
    Matrix symbolic =
        0.5 * tauv * tauv * embed(sz, reg) * (mbd * mbd - mb * mb);
    double exactness = (a1.op - symbolic).cwiseAbs().maxCoeff();

    OperatorSum qr;
    qr.add(1.0, {{OpKind::SigmaX, 0}, {OpKind::Create, 1}});
    qr.add(1.0, {{OpKind::SigmaX, 0}, {OpKind::Annihilate, 1}});
    Circuit c;
    c.push(qr_gate(0, 1, tauv, 0.0, QrOrder::Forward));
    Matrix u = circuit_unitary(c, reg);
    Matrix emp = defect_generator(u, embed(qr, reg), tauv);
    double ratio = spectral_norm(emp) / a1.norm;
    double shape = spectral_norm(emp - a1.op) / a1.norm;

    bool pass = exactness < 1e-12 && std::abs(ratio - 1.0) <= 0.1 && shape <= 0.1;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "symbolic agreement %.1e (tol 1e-12); defect/alpha1 ratio "
                  "%.3f (tol 1 +- 0.1)",
                  exactness, ratio);
    report(7, pass, buf);
    CHECK(exactness < 1e-12);
    CHECK(std::abs(ratio - 1.0) <= 0.1);
    CHECK(shape <= 0.1);
}

TEST_CASE("criterion 8: swap-network contracts and depth scalings") {
    // Coverage bounds for N in {2, 4, 6}.
    bool coverage = true;
    for (int n : {2, 4, 6}) {
        std::vector<double> eps(n, 0.0), omega(n, 1.0);
        ModelSpec m = dicke(eps, {}, omega, {});
        SwapSchedule s = linear_swap_network(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                int c = s.pair_meeting_config(i, j);
                coverage = coverage && c >= 0 && c <= n;
            }
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                int c = s.spin_mode_meeting_config(i, k);
                coverage = coverage && c >= 0 && c <= 2 * n;
            }
    }

    // Routed vs unrouted equivalence per step at 1e-9.
    ModelSpec big = dicke({0.3, -0.2, 0.5, 0.1}, {{0, 1, 0.2}, {2, 3, -0.3}},
                          {1.0, 0.7, 1.3, 0.9},
                          {{0, 1, 0.2}, {1, 3, 0.15}, {2, 0, -0.1}, {3, 2, 0.25}});
    TrotterPlan p;
    p.order = 2;
    p.tau = 0.2;
    p.n_steps = 1;
    Register reg = compiled_register(big, 2);
    QuantumState a = QuantumState::basis(reg, {0, 1, 0, 1, 0, 0, 0, 0});
    QuantumState b = a;
    apply(trotter_step(big, p, 0, NetworkKind::Linear), a);
    apply(trotter_step(big, p, 0, NetworkKind::None), b);
    double routing_dev = (a.amp - b.amp).cwiseAbs().maxCoeff();

    // Depth scalings per the table: n.n. constant, a.t.a. linear, quadratic
    // n.n. constant, quadratic a.t.a. ~quadratic, single-spin bath linear.
    auto step_depth = [&](const ModelSpec& mm) {
        Circuit step = trotter_step(mm, p, 0);
        return double(metrics(step, compiled_register(mm, 2)).depth);
    };
    auto nn = [&](int n) {
        std::vector<double> eps(n, 0.3), omega(n, 1.0);
        std::vector<std::tuple<int, int, double>> v;
        for (int i = 0; i < n; ++i) v.push_back({i, i, 0.2});
        return step_depth(holstein(eps, {}, omega, v));
    };
    auto ata = [&](int n) {
        std::vector<double> eps(n, 0.3), omega(n, 1.0);
        std::vector<std::tuple<int, int, double>> v;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) v.push_back({i, k, 0.2});
        return step_depth(dicke(eps, {}, omega, v));
    };
    auto quad_nn = [&](int nb) {
        std::vector<double> eps(nb + 1, 0.1), omega(nb, 1.0);
        std::vector<std::tuple<int, int, int, Complex>> v;
        for (int i = 0; i < nb; ++i) v.push_back({i, i + 1, i, Complex(0.2, 0)});
        return step_depth(frohlich(eps, {}, omega, v));
    };
    auto quad_ata = [&](int n) {
        std::vector<double> eps(n, 0.1), omega(n, 1.0);
        std::vector<std::tuple<int, int, int, Complex>> v;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int k = 0; k < n; ++k) v.push_back({i, j, k, Complex(0.1, 0)});
        return step_depth(frohlich(eps, {}, omega, v));
    };
    auto one_spin = [&](int nb) {
        std::vector<double> eps{0.5};
        std::vector<double> omega(nb, 1.0);
        std::vector<std::tuple<int, int, double>> v;
        for (int k = 0; k < nb; ++k) v.push_back({0, k, 0.2});
        return step_depth(dicke(eps, {}, omega, v));
    };

    bool nn_const = nn(2) == nn(4) && nn(4) == nn(6);
    double ata_slope =
        fit_loglog({2, 4, 6}, {ata(2), ata(4), ata(6)}).slope;
    bool quad_nn_const = quad_nn(2) == quad_nn(4) && quad_nn(4) == quad_nn(6);
    // The a.t.a. quadratic class has ~N^3/2 couplings with at most N/2
    // vertex-disjoint pair gates per layer, so depth = Theta(N^2) with a
    // (1 - 1/N) finite-size factor; a three-point fit over {2,4,6} therefore
    // reads high (the coupling COUNT grows with exponent 3.5 there). Accept
    // a superlinear fit below the count exponent and check the asymptotic
    // quadratic trend through the doubling ratio depth(8)/depth(4).
    double quad_slope =
        fit_loglog({2, 4, 6}, {quad_ata(2), quad_ata(4), quad_ata(6)}).slope;
    double quad_doubling = quad_ata(8) / quad_ata(4);
    double spin_slope =
        fit_loglog({2, 4, 6}, {one_spin(2), one_spin(4), one_spin(6)}).slope;

    bool scalings = nn_const && ata_slope > 0.6 && ata_slope < 1.4 &&
                    quad_nn_const && quad_slope > 1.8 && quad_slope < 3.3 &&
                    quad_doubling < 7.2 && spin_slope > 0.6 && spin_slope < 1.4;
    bool pass = coverage && routing_dev < 1e-9 && scalings;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "coverage ok=%d; routing dev %.1e (tol 1e-9); slopes ata %.2f "
                  "quad %.2f 1-spin %.2f; nn const %d quad-nn const %d",
                  int(coverage), routing_dev, ata_slope, quad_slope, spin_slope,
                  int(nn_const), int(quad_nn_const));
    report(8, pass, buf);
    CHECK(coverage);
    CHECK(routing_dev < 1e-9);
    CHECK(scalings);
}

TEST_CASE("criterion 9: encoding costs reproduce the comparison table") {
    std::vector<double> ds{4, 8, 16, 32};
    bool rq_ok = true;
    std::vector<double> unary, binary;
    for (int d : {4, 8, 16, 32}) {
        EncodingCost rq = encoding_cost(d, EncodingCode::ResonatorQubit);
        rq_ok = rq_ok && rq.entangling_gates == 2 && rq.qubits == 1 &&
                rq.resonators == 1;
        unary.push_back(double(encoding_cost(d, EncodingCode::Unary).entangling_gates));
        binary.push_back(
            double(encoding_cost(d, EncodingCode::Binary).entangling_gates));
    }
    double unary_slope = fit_loglog(ds, unary).slope;
    double binary_slope = fit_loglog(ds, binary).slope;
    bool binary_bounded = true;
    for (size_t i = 0; i < ds.size(); ++i)
        binary_bounded = binary_bounded &&
                         binary[i] <= 4.0 * ds[i] * ds[i] * std::log2(ds[i]);

    bool pass = rq_ok && unary_slope > 0.85 && unary_slope < 1.15 &&
                binary_slope > 1.05 && binary_bounded;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "resonator-qubit = 2 gates for all d; unary slope %.2f; "
                  "binary slope %.2f (superlinear, O(d^2 log d)-bounded)",
                  unary_slope, binary_slope);
    report(9, pass, buf);
    CHECK(rq_ok);
    CHECK(unary_slope == doctest::Approx(1.0).epsilon(0.15));
    CHECK(binary_slope > 1.05);
    CHECK(binary_bounded);
}

TEST_CASE("criterion 10: fermionic Hubbard-Holstein equivalence") {
    ModelSpec m = hubbard_holstein({0.3, -0.2}, {{0, 1, 0.5}}, {{0, 1, 0.35}}, {1.0},
                                   {{0, 0, 0.3}, {1, 0, -0.3}});
    const int d = 3;
    Register reg = compiled_register(m, d);
    const double T = 1.0;

    Matrix h_brute = ts::fermion_model_matrix(m, d);
    Vector psi0 = QuantumState::basis(reg, {1, 0, 0}).amp;
    Vector brute = exact_propagator(h_brute, T) * psi0;
    OperatorSum hb;
    hb.add(m.mode_freqs[0], {{OpKind::Number, 2}});
    Matrix back = exact_propagator(embed(hb, reg), T);

    auto run_dev = [&](double tau) {
        TrotterPlan p;
        p.order = 2;
        p.tau = tau;
        p.n_steps = int(T / tau + 0.5);
        QuantumState psi = QuantumState::basis(reg, {1, 0, 0});
        apply(compile(m, p), psi);
        return phase_aligned_maxnorm(Vector(back * psi.amp), brute);
    };
    double dev1 = run_dev(0.05);
    double dev2 = run_dev(0.025);

    // f-SWAP routing is exact for exact-generator gates: a chiral Frohlich
    // model (every compiled gate commutes with the parity sign) routes at
    // 1e-9. The Hubbard-Holstein LC gates are Trotterized composites whose
    // own O(theta^2) defects interact with the parity sign, so its routed vs
    // unrouted residual sits at that (much smaller than Trotter) scale.
    ModelSpec chiral = frohlich({0.2, -0.1, 0.3}, {{0, 1, Complex(0.25, 0)}},
                                {1.0, 0.8, 1.2},
                                {{0, 1, 0, Complex(0.2, 0)},
                                 {1, 2, 2, Complex(0.1, 0)},
                                 {0, 2, 1, Complex(0.15, 0)}});
    Register creg = compiled_register(chiral, 2);
    TrotterPlan p;
    p.order = 2;
    p.tau = 0.05;
    p.n_steps = 1;
    QuantumState a = QuantumState::basis(creg, {1, 0, 0, 0, 0, 0});
    QuantumState b = a;
    apply(trotter_step(chiral, p, 0, NetworkKind::Auto), a);
    apply(trotter_step(chiral, p, 0, NetworkKind::None), b);
    double routing = (a.amp - b.amp).cwiseAbs().maxCoeff();

    QuantumState ha = QuantumState::basis(reg, {1, 0, 0});
    QuantumState hb2 = ha;
    apply(trotter_step(m, p, 0, NetworkKind::Auto), ha);
    apply(trotter_step(m, p, 0, NetworkKind::None), hb2);
    double hh_residual = (ha.amp - hb2.amp).cwiseAbs().maxCoeff();

    bool pass = dev1 < 5e-3 && dev2 < dev1 / 2.5 && routing < 1e-9 &&
                hh_residual < 1e-5;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "vs fermionic brute force: dev %.2e at tau 0.05, %.2e at "
                  "0.025 (Trotter-limited); exact-gate routing %.1e, composite "
                  "residual %.1e",
                  dev1, dev2, routing, hh_residual);
    report(10, pass, buf);
    CHECK(dev1 < 5e-3);
    CHECK(dev2 < dev1 / 2.5);
    CHECK(routing < 1e-9);
    CHECK(hh_residual < 1e-5);
}

TEST_CASE("criterion 11: coherent-error mitigation order") {
    Register reg({qubit_site(), mode_site(6)});
    auto build_qr = [&](double chi, double theta, bool alternate) {
        Circuit c;
        Gate pjc = phased_jc(0, 1, theta, 0.0);
        Gate err = coherent_error_gate(0, 1, chi, 0.0);
        c.push(pjc);
        c.push(err);
        if (alternate) c.push(x_gate(0));
        c.push(pjc);
        c.push(err);
        if (alternate) c.push(x_gate(0));
        return circuit_unitary(c, reg);
    };
    // chi_t and the JC angle are both linear in the physical gate time; the
    // scan keeps theta/chi_t at the hardware ratio g/chi = 10, anchored at
    // chi_t = 0.01.
    std::vector<double> chis{0.01, 0.005, 0.0025, 0.00125};
    std::vector<double> mitig, unmit;
    for (double chi : chis) {
        double theta = 10 * chi;
        mitig.push_back(
            phase_aligned_maxnorm(build_qr(chi, theta, true), build_qr(0, theta, true)));
        unmit.push_back(phase_aligned_maxnorm(build_qr(chi, theta, false),
                                              build_qr(0, theta, false)));
    }
    double slope_m = fit_loglog(chis, mitig).slope;
    double slope_u = fit_loglog(chis, unmit).slope;
    double suppression = unmit[0] / mitig[0];

    bool pass = slope_m >= 1.8 && slope_u < 1.2 && suppression > 5;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "mitigated exponent %.2f (>= 1.8); unmitigated %.2f; "
                  "suppression x%.0f at chi_t = 0.01",
                  slope_m, slope_u, suppression);
    report(11, pass, buf);
    CHECK(slope_m >= 1.8);
    CHECK(slope_u < 1.2);
    CHECK(suppression > 5);
}
