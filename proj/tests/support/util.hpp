#pragma once

#include <random>

#include "rqsim/hilbert.hpp"

namespace rqsim::testsupport {

inline std::mt19937_64 rng(uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline Complex random_coeff(std::mt19937_64& g) {
    return {uniform(g, -1, 1), uniform(g, -1, 1)};
}

/// Random Hermitian operator sum on the register (built term + conjugate).
inline OperatorSum random_hermitian_op(const Register& reg, std::mt19937_64& g,
                                       int n_terms = 4) {
    OperatorSum op;
    auto pick_kind = [&](int site) {
        if (reg.is_qubit(site)) {
            static const OpKind kinds[] = {OpKind::SigmaX, OpKind::SigmaY,
                                           OpKind::SigmaZ, OpKind::SigmaPlus,
                                           OpKind::SigmaMinus};
            return kinds[g() % 5];
        }
        static const OpKind kinds[] = {OpKind::Annihilate, OpKind::Create,
                                       OpKind::Number};
        return kinds[g() % 3];
    };
    auto conj_kind = [](OpKind k) {
        switch (k) {
            case OpKind::SigmaPlus: return OpKind::SigmaMinus;
            case OpKind::SigmaMinus: return OpKind::SigmaPlus;
            case OpKind::Annihilate: return OpKind::Create;
            case OpKind::Create: return OpKind::Annihilate;
            default: return k;
        }
    };
    for (int t = 0; t < n_terms; ++t) {
        int s1 = static_cast<int>(g() % reg.size());
        int s2 = static_cast<int>(g() % reg.size());
        std::vector<SiteOperator> f{{pick_kind(s1), s1}};
        if (s2 != s1) f.push_back({pick_kind(s2), s2});
        Complex c = random_coeff(g);
        std::vector<SiteOperator> fdag;
        for (auto it = f.rbegin(); it != f.rend(); ++it)
            fdag.push_back({conj_kind(it->kind), it->site});
        op.add(c, f);
        op.add(std::conj(c), fdag);
    }
    return op;
}

/// Jaynes-Cummings coupling g*(sigma_- b^dag + sigma_+ b) on (qubit, mode).
inline OperatorSum jc_hamiltonian(int qubit, int mode, double g = 1.0) {
    OperatorSum h;
    h.add(g, {{OpKind::SigmaMinus, qubit}, {OpKind::Create, mode}});
    h.add(g, {{OpKind::SigmaPlus, qubit}, {OpKind::Annihilate, mode}});
    return h;
}

/// Total excitation |1><1|_q + n_mode = (1 - sigma_z)/2 + n.
inline OperatorSum excitation_number(int qubit, int mode) {
    OperatorSum n;
    n.add(0.5, {});
    n.add(-0.5, {{OpKind::SigmaZ, qubit}});
    n.add(1.0, {{OpKind::Number, mode}});
    return n;
}

}  // namespace rqsim::testsupport
