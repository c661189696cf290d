#include "rqsim/gateset.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <mutex>
#include <unordered_map>

namespace rqsim {

namespace {

const Complex kI(0, 1);

struct NameEntry {
    GateKind kind;
    const char* name;
};

constexpr NameEntry kNames[] = {
    {GateKind::Jc, "jc"},
    {GateKind::Rz, "rz"},
    {GateKind::Prx, "prx"},
    {GateKind::PauliX, "x"},
    {GateKind::Hadamard, "h"},
    {GateKind::Cnot, "cnot"},
    {GateKind::Swap, "swap"},
    {GateKind::Fswap, "fswap"},
    {GateKind::Uzz, "uzz"},
    {GateKind::Uxx, "uxx"},
    {GateKind::Uhop, "uhop"},
    {GateKind::CondRotation, "cond_rotation"},
    {GateKind::CoherentError, "coherent_error"},
    {GateKind::PhasedJc, "phased_jc"},
    {GateKind::QrGate, "qr"},
    {GateKind::LcGate, "lc"},
    {GateKind::QuadXx, "quad_xx"},
    {GateKind::QuadZz, "quad_zz"},
    {GateKind::QuadHop, "quad_hop"},
    {GateKind::QuadChiral, "quad_chiral"},
    {GateKind::RzViaPrx, "rz_via_prx"},
    {GateKind::AuxDisplacement, "aux_displacement"},
    {GateKind::AuxRotation, "aux_rotation"},
    {GateKind::AuxKerr, "aux_kerr"},
};

void require_distinct(int a, int b, const char* what) {
    if (a == b) throw InvalidArgument(std::string(what) + ": duplicate qubit");
}

}  // namespace

const char* gate_name(GateKind k) {
    for (const auto& e : kNames)
        if (e.kind == k) return e.name;
    return "?";
}

std::optional<GateKind> gate_kind_from_name(const std::string& name) {
    for (const auto& e : kNames)
        if (name == e.name) return e.kind;
    return std::nullopt;
}

// --- primitives --------------------------------------------------------------

Gate jc_gate(int qubit, int mode, double theta) {
    return {GateKind::Jc, {qubit, mode}, {theta}, {}};
}

Gate rz_gate(int qubit, double angle) { return {GateKind::Rz, {qubit}, {angle}, {}}; }

Gate prx_gate(int qubit, double theta, double phi) {
    return {GateKind::Prx, {qubit}, {theta, phi}, {}};
}

Gate x_gate(int qubit) { return {GateKind::PauliX, {qubit}, {}, {}}; }

Gate hadamard_gate(int qubit) { return {GateKind::Hadamard, {qubit}, {}, {}}; }

Gate cnot_gate(int control, int target) {
    require_distinct(control, target, "cnot");
    return {GateKind::Cnot, {control, target}, {}, {}};
}

Gate swap_gate(int q1, int q2) {
    require_distinct(q1, q2, "swap");
    return {GateKind::Swap, {q1, q2}, {}, {}};
}

Gate fswap_gate(int q1, int q2) {
    require_distinct(q1, q2, "fswap");
    return {GateKind::Fswap, {q1, q2}, {}, {}};
}

Gate uzz_gate(int q1, int q2, double theta) {
    require_distinct(q1, q2, "uzz");
    return {GateKind::Uzz, {q1, q2}, {theta}, {}};
}

Gate uxx_gate(int q1, int q2, double theta) {
    require_distinct(q1, q2, "uxx");
    return {GateKind::Uxx, {q1, q2}, {theta}, {}};
}

Gate uhop_gate(int q1, int q2, double theta, double alpha) {
    require_distinct(q1, q2, "uhop");
    return {GateKind::Uhop, {q1, q2}, {theta, alpha}, {}};
}

Gate cond_rotation_gate(int qubit, int mode, double beta) {
    return {GateKind::CondRotation, {qubit, mode}, {beta}, {}};
}

Gate coherent_error_gate(int qubit, int mode, double chi_t, double kerr_t) {
    return {GateKind::CoherentError, {qubit, mode}, {chi_t, kerr_t}, {}};
}

// --- composites ---------------------------------------------------------------

Gate phased_jc(int qubit, int mode, double theta, double phi) {
    Gate g{GateKind::PhasedJc, {qubit, mode}, {theta, phi}, {}};
    // Matrix Rz(-phi) . JC . Rz(phi); time order is rightmost first.
    if (phi == 0.0)
        g.expansion = {jc_gate(qubit, mode, theta)};
    else
        g.expansion = {rz_gate(qubit, phi), jc_gate(qubit, mode, theta),
                       rz_gate(qubit, -phi)};
    return g;
}

Gate qr_gate(int qubit, int mode, double theta, double phi, QrOrder order) {
    Gate g{GateKind::QrGate, {qubit, mode},
           {theta, phi, order == QrOrder::Forward ? 0.0 : 1.0}, {}};
    Gate pjc = phased_jc(qubit, mode, theta, phi);
    Gate x = x_gate(qubit);
    if (order == QrOrder::Forward)
        g.expansion = {pjc, x, pjc, x};
    else
        g.expansion = {x, pjc, x, pjc};
    return g;
}

Gate lc_gate(int qubit, int mode, double theta, double phi, QrOrder order) {
    Gate g{GateKind::LcGate, {qubit, mode},
           {theta, phi, order == QrOrder::Forward ? 0.0 : 1.0}, {}};
    g.expansion = {hadamard_gate(qubit), qr_gate(qubit, mode, theta, phi, order),
                   hadamard_gate(qubit)};
    return g;
}

namespace {

// Core wrapped as V^dag (resonator gate) V with V = CNOT(core -> other),
// optionally conjugated by Rz(-pi/2) on both qubits (maps X1 X2 to Y1 Y2).
std::vector<Gate> conjugated_core(const Gate& core_gate, int core, int other,
                                  bool y_basis) {
    std::vector<Gate> out;
    const double half_pi = M_PI / 2;
    if (y_basis) {
        out.push_back(rz_gate(core, -half_pi));
        out.push_back(rz_gate(other, -half_pi));
    }
    out.push_back(cnot_gate(core, other));
    out.push_back(core_gate);
    out.push_back(cnot_gate(core, other));
    if (y_basis) {
        out.push_back(rz_gate(core, half_pi));
        out.push_back(rz_gate(other, half_pi));
    }
    return out;
}

}  // namespace

Gate quadratic_coupling_circuit(QuadKind kind, int q1, int q2, int mode, double theta,
                                double phi, int core_qubit, QrOrder order,
                                bool transpose, bool fermionic) {
    require_distinct(q1, q2, "quadratic coupling");
    if (core_qubit != q1 && core_qubit != q2)
        throw InvalidArgument("core qubit must be one of the coupled pair");
    const int core = core_qubit;
    const int other = (core == q1) ? q2 : q1;

    GateKind gk = GateKind::QuadXx;
    switch (kind) {
        case QuadKind::XX: gk = GateKind::QuadXx; break;
        case QuadKind::ZZ: gk = GateKind::QuadZz; break;
        case QuadKind::HoppingReal: gk = GateKind::QuadHop; break;
        case QuadKind::HoppingChiral: gk = GateKind::QuadChiral; break;
    }
    Gate g{gk, {q1, q2, mode}, {theta, phi, double(core)}, {}};

    switch (kind) {
        case QuadKind::XX: {
            g.expansion =
                conjugated_core(qr_gate(core, mode, theta, phi, order), core, other,
                                /*y_basis=*/false);
            break;
        }
        case QuadKind::ZZ: {
            auto inner = conjugated_core(qr_gate(core, mode, theta, phi, order), core,
                                         other, false);
            g.expansion.push_back(hadamard_gate(q1));
            g.expansion.push_back(hadamard_gate(q2));
            for (auto& e : inner) g.expansion.push_back(std::move(e));
            g.expansion.push_back(hadamard_gate(q1));
            g.expansion.push_back(hadamard_gate(q2));
            break;
        }
        case QuadKind::HoppingReal: {
            // exp(-i th (s+s- + s-s+) B) = exp(-i th/2 XX B) exp(-i th/2 YY B),
            // the factors commute exactly.
            auto xx = conjugated_core(qr_gate(core, mode, theta / 2, phi, order), core,
                                      other, false);
            auto yy = conjugated_core(qr_gate(core, mode, theta / 2, phi, order), core,
                                      other, true);
            auto& first = (order == QrOrder::Forward) ? xx : yy;
            auto& second = (order == QrOrder::Forward) ? yy : xx;
            for (auto& e : first) g.expansion.push_back(std::move(e));
            for (auto& e : second) g.expansion.push_back(std::move(e));
            break;
        }
        case QuadKind::HoppingChiral: {
            // Exact: the two conjugated phased-JC cores commute and compose to
            // exp(-i th (e^{i phi} s+_{other} s-_{core} b^dag + h.c.)).
            // The pairing puts sigma_+ on q1; when q1 is the core qubit the
            // construction is conjugated by a swap of the pair.
            bool need_transpose = (core == q1) != transpose;
            auto c1 = conjugated_core(phased_jc(core, mode, theta / 2, phi), core,
                                      other, false);
            auto c2 = conjugated_core(phased_jc(core, mode, theta / 2, phi), core,
                                      other, true);
            std::vector<Gate> body;
            auto& first = (order == QrOrder::Forward) ? c1 : c2;
            auto& second = (order == QrOrder::Forward) ? c2 : c1;
            for (auto& e : first) body.push_back(std::move(e));
            for (auto& e : second) body.push_back(std::move(e));
            if (need_transpose) {
                Gate s = fermionic ? fswap_gate(q1, q2) : swap_gate(q1, q2);
                g.expansion.push_back(s);
                for (auto& e : body) g.expansion.push_back(std::move(e));
                g.expansion.push_back(s);
            } else {
                g.expansion = std::move(body);
            }
            break;
        }
    }
    return g;
}

Gate rz_via_prx(int qubit, double varphi) {
    Gate g{GateKind::RzViaPrx, {qubit}, {varphi}, {}};
    // R_z(varphi) = R_{varphi/2}(pi) R_0(pi) up to a global phase.
    g.expansion = {prx_gate(qubit, M_PI, 0.0), prx_gate(qubit, M_PI, varphi / 2)};
    return g;
}

Gate aux_displacement(int mode, int aux_qubit, double theta) {
    Gate g{GateKind::AuxDisplacement, {aux_qubit, mode}, {theta}, {}};
    g.expansion = {lc_gate(aux_qubit, mode, theta, 0.0)};
    return g;
}

Gate aux_rotation(int mode, int aux_qubit, double angle, double epsilon, double g_coup,
                  int n_trotter) {
    if (n_trotter < 1) throw InvalidArgument("aux_rotation: n_trotter >= 1");
    if (epsilon <= 10 * g_coup)
        std::fprintf(stderr,
                     "rqsim warning: dispersive regime violated (epsilon <= 10 g); "
                     "aux_rotation accuracy degrades\n");
    Gate g{GateKind::AuxRotation, {aux_qubit, mode},
           {angle, epsilon, g_coup, double(n_trotter)}, {}};
    const double tau_aux = angle * epsilon / (g_coup * g_coup);
    const double dt = tau_aux / n_trotter;
    for (int s = 0; s < n_trotter; ++s) {
        g.expansion.push_back(rz_gate(aux_qubit, epsilon * dt / 2));
        g.expansion.push_back(jc_gate(aux_qubit, mode, g_coup * dt));
        g.expansion.push_back(rz_gate(aux_qubit, epsilon * dt / 2));
    }
    return g;
}

Gate aux_kerr(int mode, int aux_qubit, double angle) {
    Gate g{GateKind::AuxKerr, {aux_qubit, mode}, {angle}, {}};
    const double lam = std::sqrt(std::abs(angle) / 2) * (angle < 0 ? -1.0 : 1.0);
    const double hp = M_PI / 2;
    auto exp_a = [&](double sign) {  // exp(sign * i lam sigma_x n)
        return std::vector<Gate>{hadamard_gate(aux_qubit),
                                 cond_rotation_gate(aux_qubit, mode, -sign * lam),
                                 hadamard_gate(aux_qubit)};
    };
    auto exp_b = [&](double sign) {  // exp(sign * i lam sigma_y n)
        std::vector<Gate> v{rz_gate(aux_qubit, -hp)};
        auto inner = exp_a(sign);
        for (auto& e : inner) v.push_back(std::move(e));
        v.push_back(rz_gate(aux_qubit, hp));
        return v;
    };
    // Matrix product exp(A) exp(B) exp(-A) exp(-B); rightmost applied first.
    auto push_all = [&](std::vector<Gate> seq) {
        for (auto& e : seq) g.expansion.push_back(std::move(e));
    };
    push_all(exp_b(-1.0));
    push_all(exp_a(-1.0));
    push_all(exp_b(+1.0));
    push_all(exp_a(+1.0));
    return g;
}

// --- evaluation ---------------------------------------------------------------

Matrix primitive_unitary(const Gate& g, const std::vector<int>& dims) {
    if (!g.primitive()) throw InvalidArgument("primitive_unitary on a composite");
    auto p = [&](size_t i) { return g.params.at(i); };

    switch (g.kind) {
        case GateKind::Jc: {
            const int d = dims.at(1);
            const double theta = p(0);
            Matrix u = Matrix::Identity(2 * d, 2 * d);
            for (int n = 0; n + 1 < d; ++n) {
                double th = theta * std::sqrt(double(n + 1));
                long i1 = 1 + 2 * n, i2 = 0 + 2 * (n + 1);
                u(i1, i1) = u(i2, i2) = std::cos(th);
                u(i1, i2) = u(i2, i1) = -kI * std::sin(th);
            }
            return u;
        }
        case GateKind::Rz: {
            Matrix u = Matrix::Zero(2, 2);
            u(0, 0) = std::exp(-kI * p(0) / 2.0);
            u(1, 1) = std::exp(kI * p(0) / 2.0);
            return u;
        }
        case GateKind::Prx: {
            const double c = std::cos(p(0) / 2), s = std::sin(p(0) / 2);
            Matrix u(2, 2);
            u(0, 0) = c;
            u(0, 1) = -kI * s * std::exp(-kI * p(1));
            u(1, 0) = -kI * s * std::exp(kI * p(1));
            u(1, 1) = c;
            return u;
        }
        case GateKind::PauliX: {
            Matrix u = Matrix::Zero(2, 2);
            u(0, 1) = u(1, 0) = 1;
            return u;
        }
        case GateKind::Hadamard: {
            Matrix u(2, 2);
            const double r = 1 / std::sqrt(2.0);
            u << r, r, r, -r;
            return u;
        }
        case GateKind::Cnot: {
            Matrix u = Matrix::Zero(4, 4);
            for (int c = 0; c < 2; ++c)
                for (int t = 0; t < 2; ++t) u(c + 2 * (t ^ c), c + 2 * t) = 1;
            return u;
        }
        case GateKind::Swap:
        case GateKind::Fswap: {
            Matrix u = Matrix::Zero(4, 4);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) u(b + 2 * a, a + 2 * b) = 1;
            if (g.kind == GateKind::Fswap) u(3, 3) = -1;
            return u;
        }
        case GateKind::Uzz: {
            Matrix u = Matrix::Zero(4, 4);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    double zz = (a == 0 ? 1 : -1) * (b == 0 ? 1 : -1);
                    u(a + 2 * b, a + 2 * b) = std::exp(-kI * p(0) * zz);
                }
            return u;
        }
        case GateKind::Uxx: {
            Matrix xx = Matrix::Zero(4, 4);
            for (int i = 0; i < 4; ++i) xx(i, 3 - i) = 1;
            return std::cos(p(0)) * Matrix::Identity(4, 4) -
                   kI * std::sin(p(0)) * xx;
        }
        case GateKind::Uhop: {
            Matrix u = Matrix::Identity(4, 4);
            const double c = std::cos(p(0)), s = std::sin(p(0));
            // |10> index 1, |01> index 2; generator e^{i a}s+1 s-2 + h.c.
            u(1, 1) = u(2, 2) = c;
            u(1, 2) = -kI * s * std::exp(kI * p(1));
            u(2, 1) = -kI * s * std::exp(-kI * p(1));
            return u;
        }
        case GateKind::CondRotation: {
            const int d = dims.at(1);
            Matrix u = Matrix::Zero(2 * d, 2 * d);
            for (int q = 0; q < 2; ++q)
                for (int n = 0; n < d; ++n) {
                    double z = (q == 0) ? 1.0 : -1.0;
                    u(q + 2 * n, q + 2 * n) = std::exp(-kI * p(0) * z * double(n));
                }
            return u;
        }
        case GateKind::CoherentError: {
            // ZZ-type chi term uses the hardware sign convention (+1 on the
            // excited qubit level); Kerr term -K n(n-1)/2.
            const int d = dims.at(1);
            const double chi_t = p(0), kerr_t = p(1);
            Matrix u = Matrix::Zero(2 * d, 2 * d);
            for (int q = 0; q < 2; ++q)
                for (int n = 0; n < d; ++n) {
                    double s = (q == 1) ? 1.0 : -1.0;
                    double arg = chi_t * s * n / 2.0 - kerr_t * n * (n - 1) / 2.0;
                    u(q + 2 * n, q + 2 * n) = std::exp(-kI * arg);
                }
            return u;
        }
        default:
            throw InvalidArgument("not a primitive gate kind");
    }
}

namespace {

void flatten_into(const Gate& g, std::vector<Gate>& out) {
    if (g.primitive()) {
        out.push_back(g);
        return;
    }
    for (const Gate& e : g.expansion) flatten_into(e, out);
}

void check_site_kinds(const Gate& g, const Register& reg) {
    for (int s : g.sites)
        if (s < 0 || s >= reg.size()) throw OutOfRange("gate site outside register");
    switch (g.kind) {
        case GateKind::Jc:
        case GateKind::CondRotation:
        case GateKind::CoherentError:
            if (!reg.is_qubit(g.sites[0]) || !reg.is_mode(g.sites[1]))
                throw KindMismatch(std::string(gate_name(g.kind)) +
                                   " needs (qubit, mode) sites");
            break;
        case GateKind::Rz:
        case GateKind::Prx:
        case GateKind::PauliX:
        case GateKind::Hadamard:
            if (!reg.is_qubit(g.sites[0]))
                throw KindMismatch(std::string(gate_name(g.kind)) + " needs a qubit");
            break;
        case GateKind::Cnot:
        case GateKind::Swap:
        case GateKind::Fswap:
        case GateKind::Uzz:
        case GateKind::Uxx:
        case GateKind::Uhop:
            if (!reg.is_qubit(g.sites[0]) || !reg.is_qubit(g.sites[1]))
                throw KindMismatch(std::string(gate_name(g.kind)) +
                                   " needs two qubits");
            break;
        default:
            break;  // composites are validated through their primitives
    }
}

std::vector<int> gate_dims(const Gate& g, const Register& reg) {
    std::vector<int> dims;
    dims.reserve(g.sites.size());
    for (int s : g.sites) dims.push_back(reg.site(s).dim);
    return dims;
}

struct CacheKey {
    std::string repr;
    bool operator==(const CacheKey& o) const { return repr == o.repr; }
};

struct CacheKeyHash {
    size_t operator()(const CacheKey& k) const {
        return std::hash<std::string>()(k.repr);
    }
};

CacheKey make_key(const Gate& g, const std::vector<int>& dims) {
    std::string r = gate_name(g.kind);
    for (int d : dims) {
        r += ':';
        r += std::to_string(d);
    }
    for (double p : g.params) {
        uint64_t bits;
        static_assert(sizeof(bits) == sizeof(p));
        std::memcpy(&bits, &p, sizeof(bits));
        r += ';';
        r += std::to_string(bits);
    }
    return {std::move(r)};
}

}  // namespace

std::vector<Gate> flatten(const Gate& g) {
    std::vector<Gate> out;
    flatten_into(g, out);
    return out;
}

std::vector<Gate> flatten(const Circuit& c) {
    std::vector<Gate> out;
    for (const Gate& g : c.gates) flatten_into(g, out);
    return out;
}

const Matrix& cached_unitary(const Gate& g, const Register& reg) {
    static std::unordered_map<CacheKey, Matrix, CacheKeyHash> cache;
    static std::mutex mutex;
    check_site_kinds(g, reg);
    auto dims = gate_dims(g, reg);
    CacheKey key = make_key(g, dims);
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, primitive_unitary(g, dims)).first;
    return it->second;
}

Matrix gate_unitary(const Gate& g, const Register& reg) {
    Matrix u = Matrix::Identity(reg.dim(), reg.dim());
    for (const Gate& p : flatten(g))
        apply_local_left(u, cached_unitary(p, reg), p.sites, reg);
    return u;
}

Matrix circuit_unitary(const Circuit& c, const Register& reg) {
    Matrix u = Matrix::Identity(reg.dim(), reg.dim());
    for (const Gate& p : flatten(c))
        apply_local_left(u, cached_unitary(p, reg), p.sites, reg);
    return u;
}

void apply(const Gate& g, QuantumState& psi) {
    for (const Gate& p : flatten(g))
        apply_local_unitary(psi, cached_unitary(p, psi.reg), p.sites);
}

void apply(const Circuit& c, QuantumState& psi) {
    for (const Gate& g : c.gates) apply(g, psi);
}

void apply(const Gate& g, DensityMatrix& rho) {
    for (const Gate& p : flatten(g))
        conjugate_local(rho, cached_unitary(p, rho.reg), p.sites);
}

void apply(const Circuit& c, DensityMatrix& rho) {
    for (const Gate& g : c.gates) apply(g, rho);
}

bool structurally_equal(const Gate& a, const Gate& b) {
    if (a.kind != b.kind || a.sites != b.sites || a.params.size() != b.params.size())
        return false;
    for (size_t i = 0; i < a.params.size(); ++i)
        if (a.params[i] != b.params[i]) return false;
    if (a.expansion.size() != b.expansion.size()) return false;
    for (size_t i = 0; i < a.expansion.size(); ++i)
        if (!structurally_equal(a.expansion[i], b.expansion[i])) return false;
    return true;
}

bool structurally_equal(const Circuit& a, const Circuit& b) {
    if (a.gates.size() != b.gates.size()) return false;
    for (size_t i = 0; i < a.gates.size(); ++i)
        if (!structurally_equal(a.gates[i], b.gates[i])) return false;
    return a.final_permutation == b.final_permutation;
}

}  // namespace rqsim
