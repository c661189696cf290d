#include "rqsim/compiler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace rqsim {

void TrotterPlan::validate() const {
    if (order != 1 && order != 2) throw InvalidArgument("Trotter order must be 1 or 2");
    if (tau <= 0) throw InvalidArgument("plan.tau must be > 0");
    if (n_steps < 0) throw InvalidArgument("plan.n_steps must be >= 0");
}

int SwapSchedule::pair_meeting_config(int i, int j) const {
    for (size_t c = 0; c < perm_after.size(); ++c)
        if (std::abs(perm_after[c][i] - perm_after[c][j]) == 1)
            return static_cast<int>(c);
    return -1;
}

int SwapSchedule::spin_mode_meeting_config(int i, int k) const {
    for (size_t c = 0; c < perm_after.size(); ++c)
        if (perm_after[c][i] == k) return static_cast<int>(c);
    return -1;
}

namespace {

bool is_quadratic(CouplingKind k) {
    return k == CouplingKind::QuadraticXX || k == CouplingKind::QuadraticHopping ||
           k == CouplingKind::QuadraticChiral;
}

SwapLayer odd_even_layer(int n_pos, int parity) {
    SwapLayer layer;
    for (int p = parity; p + 1 < n_pos; p += 2) layer.swaps.push_back({p, p + 1});
    return layer;
}

void apply_layer(std::vector<int>& perm, const SwapLayer& layer) {
    // perm maps logical -> position; a position swap exchanges the occupants.
    std::vector<int> at(perm.size());
    for (size_t i = 0; i < perm.size(); ++i) at[perm[i]] = static_cast<int>(i);
    for (auto [p, q] : layer.swaps) {
        std::swap(at[p], at[q]);
    }
    for (size_t p = 0; p < at.size(); ++p) perm[at[p]] = static_cast<int>(p);
}

std::vector<int> identity_perm(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    return p;
}

}  // namespace

SwapSchedule linear_swap_network(int n_qubits, const ModelSpec& model, int n_layers) {
    for (const auto& c : model.couplings)
        if (is_quadratic(c.kind))
            throw UnsupportedTerm(
                "linear swap network cannot route quadratic couplings; use the "
                "quadratic network");
    int n_pos = std::max(n_qubits, model.n_modes());
    if (n_layers < 0) n_layers = 2 * n_pos;
    SwapSchedule s;
    s.n_positions = n_pos;
    std::vector<int> perm = identity_perm(n_pos);
    s.perm_after.push_back(perm);
    for (int l = 0; l < n_layers; ++l) {
        SwapLayer layer = odd_even_layer(n_pos, l % 2);
        s.layers.push_back(layer);
        apply_layer(perm, layer);
        s.perm_after.push_back(perm);
    }
    return s;
}

SwapSchedule quadratic_swap_network(int n_qubits, const ModelSpec& model) {
    int n_pos = std::max(n_qubits, model.n_modes());
    SwapSchedule s;
    s.n_positions = n_pos;
    std::vector<int> perm = identity_perm(n_pos);
    s.perm_after.push_back(perm);
    auto push = [&](const SwapLayer& layer) {
        s.layers.push_back(layer);
        apply_layer(perm, layer);
        s.perm_after.push_back(perm);
    };
    // External odd-even network; after every odd layer run the even-pair and
    // odd-pair sub-networks (each pair swap = four swap gates in three layers).
    auto pair_subnetwork = [&](int start) {
        int nb = 0;
        while (start + 2 * nb + 1 < n_pos) ++nb;
        if (nb < 2) return;
        for (int bl = 0; bl + 1 < nb; ++bl) {
            SwapLayer l1, l2, l3;
            for (int t = bl % 2; t + 1 < nb; t += 2) {
                int a = start + 2 * t;
                if (a + 3 >= n_pos) continue;
                l1.swaps.push_back({a + 1, a + 2});
                l2.swaps.push_back({a, a + 1});
                l2.swaps.push_back({a + 2, a + 3});
                l3.swaps.push_back({a + 1, a + 2});
            }
            if (l1.swaps.empty()) continue;
            push(l1);
            push(l2);
            push(l3);
        }
    };
    for (int ext = 0; ext < 2 * n_pos; ++ext) {
        push(odd_even_layer(n_pos, ext % 2));
        if (ext % 2 == 1) {
            pair_subnetwork(0);
            pair_subnetwork(1);
        }
    }

    // The odd-even cycle leaves some pairs aligned only oddly, which misses
    // the end modes; finish those off with per-pair block tours.
    auto single = [&](int a, int b) {
        SwapLayer l;
        l.swaps.push_back({a, b});
        push(l);
    };
    auto covered = [&](int i, int j) {
        std::vector<bool> modes(n_pos, false);
        for (const auto& pa : s.perm_after) {
            int p = pa[i], q = pa[j];
            if (std::abs(p - q) == 1) {
                modes[p] = true;
                modes[q] = true;
            }
        }
        for (int k = 0; k < model.n_modes(); ++k)
            if (!modes[k]) return false;
        return true;
    };
    for (int i = 0; i < n_qubits; ++i)
        for (int j = i + 1; j < n_qubits; ++j) {
            if (covered(i, j)) continue;
            while (perm[j] > perm[i] + 1) single(perm[j] - 1, perm[j]);
            while (perm[j] < perm[i] - 1) single(perm[j], perm[j] + 1);
            for (int q = std::min(perm[i], perm[j]); q >= 1; --q) {
                single(q - 1, q);
                single(q, q + 1);
            }
            for (int q = std::min(perm[i], perm[j]); q + 2 < n_pos; ++q) {
                single(q + 1, q + 2);
                single(q, q + 1);
            }
        }
    return s;
}

Register compiled_register(const ModelSpec& model, int boson_levels) {
    ModelSpec lowered =
        model.statistics == Statistics::Fermion ? jordan_wigner(model) : model;
    int n_pos = std::max(lowered.n_sites, lowered.n_modes());
    return Register::qubits_and_modes(n_pos, lowered.n_modes(), boson_levels);
}

ModelSpec lower_model(const ModelSpec& model) {
    ModelSpec m =
        model.statistics == Statistics::Fermion ? jordan_wigner(model) : model;
    bool has_drive = false;
    for (const auto& c : m.couplings)
        if (c.kind == CouplingKind::Drive) has_drive = true;
    if (has_drive) m = absorb_drives(m);
    m.validate();
    return m;
}

// ---------------------------------------------------------------------------
// Step emission
// ---------------------------------------------------------------------------

namespace {

struct FireEvent {
    enum class What { Pair, Coupling };
    What what;
    int index;                // index into model.pairs / model.couplings
    std::vector<int> qubits;  // emission sites (physical, or logical when unrouted)
    int core = -1;            // mode-adjacent qubit for quadratic couplings
};

struct Event {
    bool is_swap = false;
    SwapLayer layer;
    FireEvent fire;
};

struct HalfSweep {
    std::vector<Event> events;
    std::vector<int> perm_out;
};

// Schedules one half sweep: fires every term exactly once at its earliest
// adjacency, walking the odd-even (or pair-transport) network from perm_in.
HalfSweep schedule_halfsweep(const ModelSpec& m, std::vector<int> perm,
                             NetworkKind net, bool routed) {
    const int n_pos = static_cast<int>(perm.size());
    HalfSweep out;
    std::vector<bool> pair_done(m.pairs.size(), false);
    std::vector<bool> coup_done(m.couplings.size(), false);
    size_t remaining = m.pairs.size() + m.couplings.size();

    auto fire_available = [&]() {
        // Collect everything firable at this config, then emit even-aligned
        // terms before odd-aligned ones so that chains of overlapping pairs
        // parallelize (nearest-neighbor models keep depth independent of N).
        struct Pending {
            int parity;
            int order;
            Event e;
        };
        std::vector<Pending> batch;
        for (size_t ci = 0; ci < m.couplings.size(); ++ci) {
            if (coup_done[ci]) continue;
            const auto& c = m.couplings[ci];
            Event e;
            e.is_swap = false;
            e.fire.what = FireEvent::What::Coupling;
            e.fire.index = static_cast<int>(ci);
            int parity = 0;
            if (is_quadratic(c.kind)) {
                int p = perm[c.sites[0]], q = perm[c.sites[1]];
                if (std::abs(p - q) != 1 || (c.mode != p && c.mode != q)) continue;
                e.fire.qubits = routed ? std::vector<int>{p, q}
                                       : std::vector<int>{c.sites[0], c.sites[1]};
                e.fire.core = routed ? c.mode
                                     : (c.mode == p ? c.sites[0] : c.sites[1]);
                parity = std::min(p, q) % 2;
            } else {
                if (perm[c.sites[0]] != c.mode) continue;
                e.fire.qubits = routed ? std::vector<int>{c.mode}
                                       : std::vector<int>{c.sites[0]};
            }
            batch.push_back({parity, static_cast<int>(ci), std::move(e)});
            coup_done[ci] = true;
            --remaining;
        }
        for (size_t pi = 0; pi < m.pairs.size(); ++pi) {
            if (pair_done[pi]) continue;
            const auto& p = m.pairs[pi];
            if (std::abs(perm[p.i] - perm[p.j]) != 1) continue;
            Event e;
            e.is_swap = false;
            e.fire.what = FireEvent::What::Pair;
            e.fire.index = static_cast<int>(pi);
            e.fire.qubits = routed ? std::vector<int>{perm[p.i], perm[p.j]}
                                   : std::vector<int>{p.i, p.j};
            batch.push_back({std::min(perm[p.i], perm[p.j]) % 2,
                             1000000 + static_cast<int>(pi), std::move(e)});
            pair_done[pi] = true;
            --remaining;
        }
        std::stable_sort(batch.begin(), batch.end(),
                         [](const Pending& a, const Pending& b) {
                             if (a.parity != b.parity) return a.parity < b.parity;
                             return a.order < b.order;
                         });
        for (auto& p : batch) out.events.push_back(std::move(p.e));
    };

    auto push_layer = [&](const SwapLayer& l) {
        if (l.swaps.empty()) return;
        Event e;
        e.is_swap = true;
        e.layer = l;
        out.events.push_back(std::move(e));
        apply_layer(perm, l);
    };

    bool want_quadratic = false;
    for (const auto& c : m.couplings)
        if (is_quadratic(c.kind)) want_quadratic = true;
    if (net == NetworkKind::Linear && want_quadratic)
        throw UnsupportedTerm(
            "linear swap network cannot route quadratic couplings; use the "
            "quadratic network");
    bool quadratic_net =
        (net == NetworkKind::Quadratic) ||
        (net != NetworkKind::Linear && want_quadratic);

    fire_available();
    // Pair-transport sub-networks: move the blocks of the chosen alignment
    // through all block slots (three swap layers per pair swap), firing
    // opportunistically.
    auto single = [&](int a, int b) {
        SwapLayer l;
        l.swaps.push_back({a, b});
        push_layer(l);
    };
    // True when an unfired quadratic term's pair sits adjacent at (p, p+1)
    // and still needs the mode at position k.
    auto needs_dip = [&](int p, int k) {
        for (size_t ci = 0; ci < m.couplings.size(); ++ci) {
            if (coup_done[ci] || !is_quadratic(m.couplings[ci].kind)) continue;
            const auto& c = m.couplings[ci];
            int a = perm[c.sites[0]], b = perm[c.sites[1]];
            if (std::min(a, b) == p && std::abs(a - b) == 1 && c.mode == k)
                return true;
        }
        return false;
    };
    // Odd-aligned blocks never reach the end resonators; dip the end blocks
    // onto positions {0, n-1} and back (two swap layers each way).
    auto end_dips = [&]() {
        if (n_pos < 4) return;
        if (needs_dip(1, 0)) {
            single(0, 1);
            single(1, 2);
            fire_available();
            single(1, 2);
            single(0, 1);
        }
        if (needs_dip(n_pos - 3, n_pos - 1)) {
            single(n_pos - 2, n_pos - 1);
            single(n_pos - 3, n_pos - 2);
            fire_available();
            single(n_pos - 3, n_pos - 2);
            single(n_pos - 2, n_pos - 1);
        }
    };
    auto pair_subnetworks = [&]() {
        for (int start : {0, 1}) {
            int nb = 0;
            while (start + 2 * nb + 1 < n_pos) ++nb;
            if (start == 1 && remaining > 0) end_dips();
            // 2 nb block layers: middle blocks need the full transposition
            // cycle to visit the end slots.
            for (int bl = 0; bl < 2 * nb && remaining > 0; ++bl) {
                SwapLayer l1, l2, l3;
                for (int t = bl % 2; t + 1 < nb; t += 2) {
                    int a = start + 2 * t;
                    if (a + 3 >= n_pos) continue;
                    l1.swaps.push_back({a + 1, a + 2});
                    l2.swaps.push_back({a, a + 1});
                    l2.swaps.push_back({a + 2, a + 3});
                    l3.swaps.push_back({a + 1, a + 2});
                }
                if (l1.swaps.empty()) continue;
                push_layer(l1);
                push_layer(l2);
                push_layer(l3);
                fire_available();
                if (start == 1 && remaining > 0) end_dips();
            }
        }
    };

    const long limit = quadratic_net ? (8L * n_pos * n_pos + 32) : (2L * n_pos + 4);
    long ext = 0;
    size_t stall_mark = remaining;
    long stall_layers = 0;
    if (quadratic_net && remaining > 0) pair_subnetworks();
    while (remaining > 0 && stall_layers <= 2 * n_pos) {
        if (ext >= limit) break;
        push_layer(odd_even_layer(n_pos, ext % 2));
        fire_available();
        if (quadratic_net) pair_subnetworks();
        ++ext;
        if (remaining < stall_mark) {
            stall_mark = remaining;
            stall_layers = 0;
        } else {
            ++stall_layers;
        }
    }

    // Tour phase: pairs that only ever align oddly in the odd-even cycle can
    // miss the end modes. Transport each such pair as a block across the
    // chain once, firing opportunistically; O(n_pos) layers per stuck pair.
    auto single_swap = [&](int a, int b) {
        SwapLayer l;
        l.swaps.push_back({a, b});
        push_layer(l);
        fire_available();
    };
    long tour_guard = 16L * n_pos * n_pos * n_pos + 64;
    while (remaining > 0) {
        if (--tour_guard < 0)
            throw Error("swap-network schedule failed to cover all terms");
        int ci = -1;
        for (size_t k = 0; k < m.couplings.size(); ++k)
            if (!coup_done[k] && is_quadratic(m.couplings[k].kind)) {
                ci = static_cast<int>(k);
                break;
            }
        if (ci < 0) {
            // Only linear/pair terms left: keep cycling the odd-even network.
            push_layer(odd_even_layer(n_pos, ext % 2));
            fire_available();
            ++ext;
            continue;
        }
        // One full conveyor per stuck pair: bring the two spins adjacent,
        // then sweep the block across the whole chain so every remaining
        // mode of this pair fires along the way.
        const int i = m.couplings[ci].sites[0], j = m.couplings[ci].sites[1];
        while (perm[j] > perm[i] + 1) single_swap(perm[j] - 1, perm[j]);
        while (perm[j] < perm[i] - 1) single_swap(perm[j], perm[j] + 1);
        for (int q = std::min(perm[i], perm[j]); q >= 1; --q) {
            single_swap(q - 1, q);
            single_swap(q, q + 1);
        }
        for (int q = std::min(perm[i], perm[j]); q + 2 < n_pos; ++q) {
            single_swap(q + 1, q + 2);
            single_swap(q, q + 1);
        }
        if (!coup_done[ci]) throw Error("pair tour failed to reach its mode");
    }
    out.perm_out = perm;
    return out;
}

struct StepContext {
    const ModelSpec* model;
    int n_qubits;  // positions
    double tau_half;
    double t_phase;  // phase reference time for this step
    bool fermionic_swaps;
    bool routed;
};

Gate swap_flavor(const StepContext& ctx, int a, int b) {
    return ctx.fermionic_swaps ? fswap_gate(a, b) : swap_gate(a, b);
}

void emit_fire(Circuit& c, const StepContext& ctx, const FireEvent& f,
               QrOrder order) {
    const ModelSpec& m = *ctx.model;
    if (f.what == FireEvent::What::Pair) {
        const auto& p = m.pairs[f.index];
        int a = f.qubits[0], b = f.qubits[1];
        switch (p.kind) {
            case PairKind::ZZ:
                c.push(uzz_gate(a, b, ctx.tau_half * p.coeff.real()));
                return;
            case PairKind::XX:
                c.push(uxx_gate(a, b, ctx.tau_half * p.coeff.real()));
                return;
            case PairKind::Hopping:
                c.push(uhop_gate(a, b, ctx.tau_half * std::abs(p.coeff),
                                 std::arg(p.coeff)));
                return;
            case PairKind::DensityDensity:
                throw UnsupportedTerm(
                    "density-density terms must be lowered before compilation");
        }
    }
    const auto& t = m.couplings[f.index];
    const int mode_site = ctx.n_qubits + t.mode;
    const double theta = ctx.tau_half * std::abs(t.v);
    const double phi =
        m.mode_freqs[t.mode] * ctx.t_phase + std::arg(t.v);
    switch (t.kind) {
        case CouplingKind::RotatingWave:
            c.push(phased_jc(f.qubits[0], mode_site, theta, phi));
            return;
        case CouplingKind::Transverse:
            c.push(qr_gate(f.qubits[0], mode_site, theta, phi, order));
            return;
        case CouplingKind::Longitudinal:
            c.push(lc_gate(f.qubits[0], mode_site, theta, phi, order));
            return;
        case CouplingKind::QuadraticXX:
            c.push(quadratic_coupling_circuit(QuadKind::XX, f.qubits[0], f.qubits[1],
                                              mode_site, theta, phi, f.core, order,
                                              false, ctx.fermionic_swaps));
            return;
        case CouplingKind::QuadraticHopping:
            c.push(quadratic_coupling_circuit(QuadKind::HoppingReal, f.qubits[0],
                                              f.qubits[1], mode_site, theta, phi,
                                              f.core, order, false,
                                              ctx.fermionic_swaps));
            return;
        case CouplingKind::QuadraticChiral:
            c.push(quadratic_coupling_circuit(QuadKind::HoppingChiral, f.qubits[0],
                                              f.qubits[1], mode_site, theta, phi,
                                              f.core, order, false,
                                              ctx.fermionic_swaps));
            return;
        case CouplingKind::Drive:
            throw UnsupportedTerm(
                "drive terms must be absorbed before compilation (lower_model)");
    }
}

void emit_events(Circuit& c, const StepContext& ctx, const std::vector<Event>& events,
                 bool mirrored) {
    auto emit_one = [&](const Event& e, QrOrder ord) {
        if (e.is_swap) {
            if (!ctx.routed) return;
            for (auto [a, b] : e.layer.swaps) c.push(swap_flavor(ctx, a, b));
            return;
        }
        emit_fire(c, ctx, e.fire, ord);
    };
    if (!mirrored) {
        for (const auto& e : events) emit_one(e, QrOrder::Forward);
    } else {
        for (auto it = events.rbegin(); it != events.rend(); ++it)
            emit_one(*it, QrOrder::Backward);
    }
}

// Merge adjacent gates with identical generators (angle sums). Keeps the
// palindromic middle compact (e.g. the full-tau ZZ of the worked example).
void merge_adjacent(Circuit& c) {
    std::vector<Gate> out;
    auto mergeable = [](const Gate& a, const Gate& b) {
        if (a.kind != b.kind || a.sites != b.sites) return false;
        switch (a.kind) {
            case GateKind::Rz:
            case GateKind::Uzz:
            case GateKind::Uxx:
            case GateKind::Jc:
                return true;
            case GateKind::Uhop:
                return a.params[1] == b.params[1];
            case GateKind::PhasedJc:
                return a.params[1] == b.params[1];
            default:
                return false;
        }
    };
    for (const Gate& g : c.gates) {
        if (!out.empty() && mergeable(out.back(), g)) {
            double sum = out.back().params[0] + g.params[0];
            Gate merged = out.back();
            out.pop_back();
            switch (g.kind) {
                case GateKind::Rz:
                    merged = rz_gate(g.sites[0], sum);
                    break;
                case GateKind::Uzz:
                    merged = uzz_gate(g.sites[0], g.sites[1], sum);
                    break;
                case GateKind::Uxx:
                    merged = uxx_gate(g.sites[0], g.sites[1], sum);
                    break;
                case GateKind::Jc:
                    merged = jc_gate(g.sites[0], g.sites[1], sum);
                    break;
                case GateKind::Uhop:
                    merged = uhop_gate(g.sites[0], g.sites[1], sum, g.params[1]);
                    break;
                case GateKind::PhasedJc:
                    merged = phased_jc(g.sites[0], g.sites[1], sum, g.params[1]);
                    break;
                default:
                    break;
            }
            if (merged.params.empty() ||
                (merged.params[0] == 0.0 && merged.kind == GateKind::Rz)) {
                continue;  // identity
            }
            out.push_back(std::move(merged));
            continue;
        }
        out.push_back(g);
    }
    c.gates = std::move(out);
}

Circuit trotter_step_impl(const ModelSpec& model, const TrotterPlan& plan, int m,
                          NetworkKind network, std::vector<int>& perm) {
    plan.validate();
    if (m < 0 || (plan.n_steps > 0 && m >= plan.n_steps))
        throw InvalidArgument("step index outside the plan");

    StepContext ctx;
    ctx.model = &model;
    ctx.n_qubits = static_cast<int>(perm.size());
    ctx.fermionic_swaps = false;  // set by compile() for fermion-origin models
    ctx.routed = network != NetworkKind::None;
    ctx.tau_half = plan.order == 2 ? plan.tau / 2 : plan.tau;
    ctx.t_phase = plan.phase_convention == PhaseConvention::Midpoint
                      ? (m + 0.5) * plan.tau
                      : m * plan.tau;

    // Parity strings are a model-level concept; compiled circuits rely on the
    // (f-)swap routing instead, which is only sound when strings never span
    // non-adjacent sites at firing time. Firing requires adjacency, so the
    // string flag is consumed here.
    for (const auto& p : model.pairs)
        if (p.jw_string) ctx.fermionic_swaps = true;
    for (const auto& c : model.couplings)
        if (c.jw_string) ctx.fermionic_swaps = true;

    HalfSweep sweep = schedule_halfsweep(model, perm, network, ctx.routed);

    Circuit step;
    auto emit_onsite = [&](const std::vector<int>& p, double tau_part, bool rev) {
        auto one = [&](const OnsiteTerm& o) {
            step.push(rz_gate(ctx.routed ? p[o.site] : o.site, tau_part * o.eps));
        };
        if (rev)
            for (auto it = model.onsite.rbegin(); it != model.onsite.rend(); ++it)
                one(*it);
        else
            for (const auto& o : model.onsite) one(o);
    };

    if (plan.order == 2) {
        emit_onsite(perm, ctx.tau_half, false);
        emit_events(step, ctx, sweep.events, false);
        emit_events(step, ctx, sweep.events, true);
        emit_onsite(perm, ctx.tau_half, true);
        // Palindrome leaves the permutation unchanged.
    } else {
        // First-order formula: every step applies the identical product, so
        // the sweep's swap layers are undone (without firings) at the end.
        emit_events(step, ctx, sweep.events, false);
        emit_onsite(sweep.perm_out, plan.tau, false);
        if (ctx.routed) {
            for (auto it = sweep.events.rbegin(); it != sweep.events.rend(); ++it)
                if (it->is_swap)
                    for (auto [a, b] : it->layer.swaps)
                        step.push(swap_flavor(ctx, a, b));
        }
    }
    merge_adjacent(step);

    TrotterMeta meta;
    meta.step_index = m;
    meta.tau = plan.tau;
    meta.n_steps = plan.n_steps;
    meta.order = plan.order;
    step.trotter = meta;
    step.final_permutation = perm;
    return step;
}

}  // namespace

Circuit trotter_step(const ModelSpec& model, const TrotterPlan& plan, int m,
                     NetworkKind network) {
    ModelSpec lowered = lower_model(model);
    int n_pos = std::max(lowered.n_sites, lowered.n_modes());
    std::vector<int> perm = identity_perm(n_pos);
    return trotter_step_impl(lowered, plan, m, network, perm);
}

Circuit compile(const ModelSpec& model, const TrotterPlan& plan,
                NetworkKind network) {
    plan.validate();
    ModelSpec lowered = lower_model(model);
    int n_pos = std::max(lowered.n_sites, lowered.n_modes());
    std::vector<int> perm = identity_perm(n_pos);

    Circuit full;
    for (int m = 0; m < plan.n_steps; ++m) {
        Circuit step = trotter_step_impl(lowered, plan, m, network, perm);
        full.append(step);
    }
    TrotterMeta meta;
    meta.step_index = 0;
    meta.tau = plan.tau;
    meta.n_steps = plan.n_steps;
    meta.order = plan.order;
    full.trotter = meta;
    full.final_permutation = perm;
    return full;
}

Circuit optimize_prx(const Circuit& c) {
    struct QubitState {
        double pending = 0;  // Rz angle accumulated before an X
        bool open = false;   // an X is waiting for its trailing Rz
        double post = 0;     // Rz angle accumulated after the X
    };
    std::map<int, QubitState> st;
    Circuit out;
    out.trotter = c.trotter;
    out.final_permutation = c.final_permutation;

    auto flush = [&](int q) {
        QubitState& s = st[q];
        if (s.open) {
            out.push(prx_gate(q, M_PI, (s.post - s.pending) / 2));
        } else if (s.pending != 0.0) {
            out.push(rz_gate(q, s.pending));
        }
        s = QubitState{};
    };

    for (const Gate& g : flatten(c)) {
        if (g.kind == GateKind::Rz) {
            QubitState& s = st[g.sites[0]];
            (s.open ? s.post : s.pending) += g.params[0];
            continue;
        }
        if (g.kind == GateKind::PauliX) {
            QubitState& s = st[g.sites[0]];
            if (s.open) flush(g.sites[0]);
            st[g.sites[0]].open = true;
            continue;
        }
        for (int q : g.sites) flush(q);
        out.push(g);
    }
    for (auto& [q, s] : st) {
        (void)s;
        flush(q);
    }
    return out;
}

CircuitMetrics metrics(const Circuit& c, const Register& reg) {
    CircuitMetrics m;
    int n_modes = 0, n_qubits = 0;
    for (int i = 0; i < reg.size(); ++i) {
        if (reg.is_mode(i))
            ++n_modes;
        else
            ++n_qubits;
    }
    m.jc_per_mode.assign(n_modes, 0);

    std::vector<long> site_layer(reg.size(), 0);
    std::vector<double> angles;
    for (const Gate& g : flatten(c)) {
        ++m.total_gates;
        long layer = 0;
        for (int s : g.sites) layer = std::max(layer, site_layer[s]);
        ++layer;
        for (int s : g.sites) site_layer[s] = layer;
        m.depth = std::max(m.depth, layer);

        int mode_count = 0;
        for (int s : g.sites) {
            if (reg.is_mode(s)) ++mode_count;
        }
        if (mode_count >= 2)
            throw Error("compiled circuit contains a resonator-resonator gate");

        if (g.kind == GateKind::Jc) {
            int mode_site = g.sites[1];
            m.jc_per_mode[mode_site - n_qubits]++;
            angles.push_back(std::abs(g.params[0]));
        }
        bool two_qubit = g.sites.size() == 2 && reg.is_qubit(g.sites[0]) &&
                         reg.is_qubit(g.sites[1]);
        if (two_qubit) ++m.entangling_qubit_gates;
    }
    std::sort(angles.begin(), angles.end());
    for (double a : angles)
        if (m.calibration_angles.empty() ||
            std::abs(m.calibration_angles.back() - a) > 1e-12)
            m.calibration_angles.push_back(a);
    return m;
}

EncodingCost encoding_cost(int d, EncodingCode code) {
    if (d < 2) throw InvalidArgument("encoding_cost: d >= 2");
    switch (code) {
        case EncodingCode::ResonatorQubit:
            return {1, 1, 2};
        case EncodingCode::Unary: {
            // b^dag + b = sum_n sqrt(n+1)(|n+1><n| + h.c.); each transition is
            // (X_n X_{n+1} + Y_n Y_{n+1})/2 on the one-hot register, giving two
            // length-3 strings (with the spin factor) and 2(p-1)=4 gates each.
            return {1 + d, 0, 8L * (d - 1)};
        }
        case EncodingCode::Binary: {
            int q = 1;
            while ((1 << q) < d) ++q;
            long dim = 1L << q;
            Matrix mat = Matrix::Zero(dim, dim);
            for (int n = 0; n + 1 < d; ++n) {
                mat(n, n + 1) = std::sqrt(double(n + 1));
                mat(n + 1, n) = std::sqrt(double(n + 1));
            }
            std::array<Matrix, 4> pauli;
            pauli[0] = Matrix::Identity(2, 2);
            pauli[1] = site_matrix(OpKind::SigmaX, 2);
            pauli[2] = site_matrix(OpKind::SigmaY, 2);
            pauli[3] = site_matrix(OpKind::SigmaZ, 2);
            long gates = 0;
            for (long code_idx = 0; code_idx < (1L << (2 * q)); ++code_idx) {
                Matrix p = Matrix::Identity(1, 1);
                int weight = 0;
                for (int bit = q - 1; bit >= 0; --bit) {
                    long which = (code_idx >> (2 * bit)) & 3;
                    p = kron(p, pauli[which]);
                    if (which != 0) ++weight;
                }
                Complex coeff = (p.adjoint() * mat).trace() / double(dim);
                if (std::abs(coeff) < 1e-12 || weight == 0) continue;
                long string_len = weight + 1;  // the spin qubit joins the string
                gates += 2 * (string_len - 1);
            }
            return {1 + q, 0, gates};
        }
    }
    throw InvalidArgument("unknown encoding code");
}

}  // namespace rqsim
