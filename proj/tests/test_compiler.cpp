#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "rqsim/compiler.hpp"
#include "rqsim/serialize.hpp"
#include "support/fermion.hpp"
#include "support/util.hpp"

using namespace rqsim;
namespace ts = rqsim::testsupport;

namespace {

TrotterPlan plan2(double tau, int n, PhaseConvention pc = PhaseConvention::Midpoint) {
    TrotterPlan p;
    p.order = 2;
    p.tau = tau;
    p.n_steps = n;
    p.phase_convention = pc;
    return p;
}

// Exact step propagator of the rotating-frame Hamiltonian frozen at the
// step's phase-reference time.
Matrix exact_step(const ModelSpec& m, const Register& reg, const TrotterPlan& p,
                  int step) {
    double tm = p.phase_convention == PhaseConvention::Midpoint ? (step + 0.5) * p.tau
                                                                : step * p.tau;
    return exact_propagator(build(m, Frame::rotating(), tm), reg, p.tau);
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = x.size();
    for (int i = 0; i < n; ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("a single coupling term Trotterizes exactly") {
    ModelSpec m = tavis_cummings({0.0}, {1.0}, {{0, 0, Complex(0.4, 0)}});
    Register reg = compiled_register(m, 4);
    TrotterPlan p = plan2(0.3, 1);
    Circuit step = trotter_step(m, p, 0);
    Matrix u = circuit_unitary(step, reg);
    CHECK(phase_aligned_maxnorm(u, exact_step(m, reg, p, 0)) < 1e-12);
}

TEST_CASE("JC preset first-order step is Rz times JC") {
    double eps = 1.3, w0 = 1.0, v = 0.4, tau = 0.25;
    ModelSpec m = combined_rotating_frame(jaynes_cummings(eps, w0, v), w0);
    TrotterPlan p;
    p.order = 1;
    p.tau = tau;
    p.n_steps = 1;
    Circuit step = trotter_step(m, p, 0);

    auto flat = flatten(step);
    REQUIRE(flat.size() == 2);
    CHECK(flat[0].kind == GateKind::Jc);
    CHECK(flat[0].params[0] == doctest::Approx(tau * v));
    CHECK(flat[1].kind == GateKind::Rz);
    CHECK(flat[1].params[0] == doctest::Approx(tau * (eps - w0)));

    Register reg = compiled_register(m, 4);
    Matrix expect = gate_unitary(rz_gate(0, tau * (eps - w0)), reg) *
                    gate_unitary(jc_gate(0, 1, tau * v), reg);
    CHECK(phase_aligned_maxnorm(circuit_unitary(step, reg), expect) < 1e-12);
}

TEST_CASE("Holstein with decoupled terms Trotterizes exactly") {
    ModelSpec m = holstein({0.4, -0.7}, {}, {1.0, 2.0}, {});
    Register reg = compiled_register(m, 3);
    TrotterPlan p = plan2(0.5, 1);
    Circuit step = trotter_step(m, p, 0);
    CHECK(phase_aligned_maxnorm(circuit_unitary(step, reg),
                                exact_step(m, reg, p, 0)) < 1e-12);
}

TEST_CASE("second-order step is palindromic in its gate sequence") {
    ModelSpec m = dicke_example_2x2();
    Circuit step = trotter_step(m, plan2(0.2, 1), 0);
    const auto& g = step.gates;
    size_t n = g.size();
    for (size_t i = 0; i < n; ++i) {
        const Gate& a = g[i];
        const Gate& b = g[n - 1 - i];
        CHECK(a.kind == b.kind);
        CHECK(a.sites == b.sites);
        if (!a.params.empty()) CHECK(a.params[0] == doctest::Approx(b.params[0]));
        if (a.params.size() > 1) CHECK(a.params[1] == doctest::Approx(b.params[1]));
    }
    CHECK(step.final_permutation == std::vector<int>{0, 1});
}

TEST_CASE("Dicke example step matches the golden gate sequence") {
    ModelSpec m = dicke_example_2x2();
    TrotterPlan p = plan2(0.2, 8, PhaseConvention::LeftEdge);
    Circuit step = trotter_step(m, p, 3);
    Register reg = compiled_register(m, 3);

    // The PRX-folded form must implement the same unitary.
    Circuit folded = optimize_prx(step);
    CHECK(phase_aligned_maxnorm(circuit_unitary(folded, reg),
                                circuit_unitary(step, reg)) < 1e-12);
    for (const Gate& g : folded.gates) CHECK(g.kind != GateKind::PauliX);

    CircuitMetrics met = metrics(step, reg);
    CHECK(met.jc_per_mode == std::vector<long>{8, 8});

    std::string names;
    for (const Gate& g : folded.gates) {
        names += gate_name(g.kind);
        for (int s : g.sites) names += ":" + std::to_string(s);
        names += "\n";
    }
    std::ifstream in(std::string(TEST_DATA_DIR) + "/dicke2x2_step.golden");
    REQUIRE(in.good());
    std::string golden((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
    CHECK(names == golden);
}

TEST_CASE("phase conventions differ only in the phase reference") {
    ModelSpec m = dicke_example_2x2();
    Register reg = compiled_register(m, 3);
    TrotterPlan mid = plan2(0.2, 4, PhaseConvention::Midpoint);
    TrotterPlan left = plan2(0.2, 4, PhaseConvention::LeftEdge);
    Circuit a = trotter_step(m, mid, 2);
    Circuit b = trotter_step(m, left, 2);
    CHECK(phase_aligned_maxnorm(circuit_unitary(a, reg),
                                exact_step(m, reg, mid, 2)) < 0.05);
    CHECK(phase_aligned_maxnorm(circuit_unitary(b, reg),
                                exact_step(m, reg, left, 2)) < 0.05);
}

TEST_CASE("linear network coverage bounds") {
    ModelSpec m2 = dicke({0, 0}, {}, {1.0, 1.0}, {{0, 0, 0.1}});
    SwapSchedule s2 = linear_swap_network(2, m2);
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
            int c = s2.spin_mode_meeting_config(i, k);
            CHECK(c >= 0);
            CHECK(c <= 2);
        }

    ModelSpec m4 = dicke({0, 0, 0, 0}, {}, {1, 1, 1, 1}, {});
    SwapSchedule s4 = linear_swap_network(4, m4);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            int c = s4.pair_meeting_config(i, j);
            CHECK(c >= 0);
            CHECK(c <= 4);  // all pairs adjacent within N layers
        }

    ModelSpec m6 = dicke({0, 0, 0, 0, 0, 0}, {}, {1, 1, 1, 1, 1, 1}, {});
    SwapSchedule s6 = linear_swap_network(6, m6);
    for (int i = 0; i < 6; ++i)
        for (int k = 0; k < 6; ++k) {
            int c = s6.spin_mode_meeting_config(i, k);
            CHECK(c >= 0);
            CHECK(c <= 12);  // every (spin, mode) pair within 2 N_b layers
        }

    ModelSpec quad = frohlich({0, 0}, {}, {1.0},
                              {{0, 1, 0, Complex(0.2, 0)}});
    CHECK_THROWS_AS(linear_swap_network(2, quad), UnsupportedTerm);
}

TEST_CASE("quadratic network coverage and pair-swap expansion") {
    ModelSpec m;
    m.statistics = Statistics::Spin;
    m.n_sites = 4;
    m.mode_freqs = {1, 1, 1, 1};
    SwapSchedule s = quadratic_swap_network(4, m);

    // Every unordered spin pair meets every mode (adjacent with the mode at
    // one of the pair's positions) somewhere in the schedule.
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                bool met = false;
                for (const auto& perm : s.perm_after) {
                    int p = perm[i], q = perm[j];
                    if (std::abs(p - q) == 1 && (p == k || q == k)) met = true;
                }
                CHECK(met);
            }

    // A pair swap costs four swap gates (three sub-layers).
    ModelSpec quad = frohlich({0, 0, 0, 0}, {}, {1, 1, 1, 1},
                              {{0, 2, 0, Complex(0.2, 0)}});
    Circuit step = trotter_step(quad, plan2(0.1, 1), 0);
    (void)step;  // construction exercises the pair-swap emission path
}

TEST_CASE("routing adds nothing: routed equals unrouted") {
    // N = 2 Dicke example, order 2: identity permutation, exact telescoping.
    ModelSpec m = dicke_example_2x2();
    Register reg = compiled_register(m, 3);
    TrotterPlan p = plan2(0.2, 1);
    Circuit routed = trotter_step(m, p, 0, NetworkKind::Linear);
    Circuit unrouted = trotter_step(m, p, 0, NetworkKind::None);
    QuantumState a = QuantumState::basis(reg, {0, 0, 1, 0});
    QuantumState b = a;
    apply(routed, a);
    apply(unrouted, b);
    CHECK((a.amp - b.amp).cwiseAbs().maxCoeff() < 1e-9);

    // Larger spin model with all-to-all couplings.
    ModelSpec big = dicke({0.3, -0.2, 0.5, 0.1}, {{0, 1, 0.2}, {2, 3, -0.3}},
                          {1.0, 0.7, 1.3, 0.9},
                          {{0, 1, 0.2}, {1, 3, 0.15}, {2, 0, -0.1}, {3, 2, 0.25}});
    Register breg = compiled_register(big, 2);
    Circuit br = trotter_step(big, p, 0, NetworkKind::Linear);
    Circuit bu = trotter_step(big, p, 0, NetworkKind::None);
    QuantumState sa = QuantumState::basis(breg, {0, 1, 0, 1, 0, 0, 0, 0});
    QuantumState sb = sa;
    apply(br, sa);
    apply(bu, sb);
    CHECK((sa.amp - sb.amp).cwiseAbs().maxCoeff() < 1e-9);

    // Quadratic model.
    ModelSpec quad = frohlich({0.2, -0.1, 0.3}, {{0, 1, Complex(0.2, 0)}},
                              {1.0, 0.8, 1.2},
                              {{0, 1, 0, Complex(0.2, 0)}, {1, 2, 2, Complex(0.1, 0)},
                               {0, 2, 1, Complex(0.15, 0)}});
    Register qreg = compiled_register(quad, 2);
    Circuit qr_c = trotter_step(quad, p, 0, NetworkKind::Quadratic);
    Circuit qu_c = trotter_step(quad, p, 0, NetworkKind::None);
    QuantumState qa = QuantumState::basis(qreg, {1, 0, 0, 0, 0, 0});
    QuantumState qb = qa;
    apply(qr_c, qa);
    apply(qu_c, qb);
    CHECK((qa.amp - qb.amp).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("order-1 permutation is tracked and relabels observables") {
    ModelSpec m = dicke({0.2, -0.4}, {}, {1.0, 1.0}, {{0, 0, 0.3}, {1, 1, 0.3},
                                                      {0, 1, 0.2}, {1, 0, 0.2}});
    Register reg = compiled_register(m, 2);
    TrotterPlan p;
    p.order = 1;
    p.tau = 0.15;
    p.n_steps = 3;
    Circuit c = compile(m, p, NetworkKind::Linear);
    Circuit u = compile(m, p, NetworkKind::None);
    REQUIRE(!c.final_permutation.empty());

    QuantumState sr = QuantumState::basis(reg, {1, 0, 0, 0});
    QuantumState su = sr;
    apply(c, sr);
    apply(u, su);
    // sigma_z of logical spin i lives at physical site perm[i].
    for (int logical = 0; logical < 2; ++logical) {
        OperatorSum z_routed, z_logical;
        z_routed.add(1.0, {{OpKind::SigmaZ, c.final_permutation[logical]}});
        z_logical.add(1.0, {{OpKind::SigmaZ, logical}});
        CHECK(std::abs(expectation(sr, z_routed) - expectation(su, z_logical)) <
              1e-9);
    }
}

TEST_CASE("full compile converges to the exact evolution") {
    ModelSpec m = dicke_example_2x2();
    const int d = 4;
    Register reg = compiled_register(m, d);
    const double T = 2.0;
    QuantumState psi0 = QuantumState::basis(reg, {0, 0, 1, 0});

    OperatorSum hb;
    hb.add(m.mode_freqs[0], {{OpKind::Number, 2}});
    hb.add(m.mode_freqs[1], {{OpKind::Number, 3}});
    Vector lab = exact_propagator(build(m, Frame::lab(), 0.0), reg, T) * psi0.amp;
    OperatorSum z0;
    z0.add(1.0, {{OpKind::SigmaZ, 0}});
    double z_exact = expectation(QuantumState(reg, lab), z0).real();

    std::vector<double> taus{0.4, 0.2, 0.1, 0.05};
    std::vector<double> err1, err2;
    for (int order : {1, 2}) {
        for (double tau : taus) {
            TrotterPlan p;
            p.order = order;
            p.tau = tau;
            p.n_steps = int(std::lround(T / tau));
            QuantumState psi = psi0;
            apply(compile(m, p), psi);
            double z = expectation(psi, z0).real();
            (order == 1 ? err1 : err2).push_back(std::abs(z - z_exact));
        }
    }
    double s1 = fit_loglog_slope(taus, err1);
    double s2 = fit_loglog_slope(taus, err2);
    CHECK(s1 == doctest::Approx(1.0).epsilon(0.2));
    CHECK(s2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("compile with zero steps is empty") {
    ModelSpec m = dicke_example_2x2();
    TrotterPlan p = plan2(0.2, 0);
    Circuit c = compile(m, p);
    CHECK(c.gates.empty());
}

TEST_CASE("metrics basics and depth scalings") {
    ModelSpec m = dicke_example_2x2();
    Register reg = compiled_register(m, 3);
    Circuit empty;
    CircuitMetrics me = metrics(empty, reg);
    CHECK(me.depth == 0);
    CHECK(me.total_gates == 0);
    CHECK(me.jc_per_mode == std::vector<long>{0, 0});

    // Nearest-neighbor Holstein: depth independent of N_b.
    auto nn_depth = [&](int n) {
        std::vector<double> eps(n, 0.3), omega(n, 1.0);
        std::vector<std::tuple<int, int, double>> v;
        for (int i = 0; i < n; ++i) v.push_back({i, i, 0.2});
        ModelSpec h = holstein(eps, {}, omega, v);
        Circuit step = trotter_step(h, plan2(0.1, 1), 0);
        return metrics(step, compiled_register(h, 2)).depth;
    };
    long d2 = nn_depth(2), d4 = nn_depth(4), d6 = nn_depth(6);
    CHECK(d2 == d4);
    CHECK(d4 == d6);

    // All-to-all couplings: depth grows linearly.
    auto ata_depth = [&](int n) {
        std::vector<double> eps(n, 0.3), omega(n, 1.0);
        std::vector<std::tuple<int, int, double>> v;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) v.push_back({i, k, 0.2});
        ModelSpec h = dicke(eps, {}, omega, v);
        Circuit step = trotter_step(h, plan2(0.1, 1), 0);
        return metrics(step, compiled_register(h, 2)).depth;
    };
    long a2 = ata_depth(2), a4 = ata_depth(4), a6 = ata_depth(6);
    CHECK(a4 > a2);
    CHECK(a6 > a4);
    double slope = fit_loglog_slope({2, 4, 6}, {double(a2), double(a4), double(a6)});
    CHECK(slope > 0.6);
    CHECK(slope < 1.4);
}

TEST_CASE("encoding costs reproduce the comparison table") {
    for (int d : {2, 8, 32}) {
        EncodingCost rq = encoding_cost(d, EncodingCode::ResonatorQubit);
        CHECK(rq.qubits == 1);
        CHECK(rq.resonators == 1);
        CHECK(rq.entangling_gates == 2);
    }
    EncodingCost un = encoding_cost(8, EncodingCode::Unary);
    CHECK(un.qubits == 9);
    CHECK(un.entangling_gates == 8 * 7);

    // Hand enumeration for d = 4 (q = 2): strings {XI, XZ, XX, YY} ->
    // 2(p-1) sums to 14 with the spin qubit appended.
    EncodingCost b4 = encoding_cost(4, EncodingCode::Binary);
    CHECK(b4.qubits == 3);
    CHECK(b4.entangling_gates == 14);

    // Hand enumeration for d = 8 (q = 3): 12 strings, gate sum 60.
    EncodingCost b8 = encoding_cost(8, EncodingCode::Binary);
    CHECK(b8.qubits == 4);
    CHECK(b8.entangling_gates == 60);
}

TEST_CASE("compiled Hubbard-Holstein tracks the fermionic brute force") {
    // Couplings sum to zero per mode, so no drive absorption is involved.
    ModelSpec m = hubbard_holstein({0.3, -0.2}, {{0, 1, 0.5}}, {{0, 1, 0.35}}, {1.0},
                                   {{0, 0, 0.3}, {1, 0, -0.3}});
    const int d = 3;
    Register reg = compiled_register(m, d);
    const double T = 1.0;
    TrotterPlan p = plan2(0.05, 20);

    Matrix h_brute = ts::fermion_model_matrix(m, d);
    Vector psi0 = QuantumState::basis(reg, {1, 0, 0}).amp;
    Vector brute = exact_propagator(h_brute, T) * psi0;

    OperatorSum hb;
    hb.add(m.mode_freqs[0], {{OpKind::Number, 2}});
    Matrix back = exact_propagator(embed(hb, reg), T);

    QuantumState psi = QuantumState::basis(reg, {1, 0, 0});
    apply(compile(m, p), psi);
    Vector lab_from_circuit = back * psi.amp;

    CHECK(phase_aligned_maxnorm(lab_from_circuit, brute) < 5e-3);
}
