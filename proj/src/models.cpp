#include "rqsim/models.hpp"

#include <algorithm>
#include <cmath>

namespace rqsim {

namespace {

bool hermitian_coupling(CouplingKind k) {
    return k == CouplingKind::Longitudinal || k == CouplingKind::Transverse ||
           k == CouplingKind::QuadraticXX || k == CouplingKind::QuadraticHopping;
}

bool quadratic_coupling(CouplingKind k) {
    return k == CouplingKind::QuadraticXX || k == CouplingKind::QuadraticHopping ||
           k == CouplingKind::QuadraticChiral;
}

int expected_sites(CouplingKind k) {
    if (k == CouplingKind::Drive) return 0;
    return quadratic_coupling(k) ? 2 : 1;
}

// sigma_z parity factors on the sites strictly between i and j.
void append_string(std::vector<SiteOperator>& f, int i, int j) {
    for (int s = std::min(i, j) + 1; s < std::max(i, j); ++s)
        f.push_back({OpKind::SigmaZ, s});
}

}  // namespace

void ModelSpec::validate() const {
    if (n_sites < 0) throw InvalidArgument("negative site count");
    auto check_site = [&](int s) {
        if (s < 0 || s >= n_sites) throw OutOfRange("model term site out of range");
    };
    for (const auto& t : onsite) check_site(t.site);
    for (const auto& p : pairs) {
        check_site(p.i);
        check_site(p.j);
        if (p.i == p.j) throw InvalidArgument("pair term needs two distinct sites");
        if ((p.kind == PairKind::ZZ || p.kind == PairKind::XX ||
             p.kind == PairKind::DensityDensity) &&
            std::abs(p.coeff.imag()) > 1e-12)
            throw InvalidArgument("ZZ/XX/density-density coefficients must be real");
        if (p.kind == PairKind::DensityDensity && statistics == Statistics::Spin)
            throw InvalidArgument("density-density pair terms are fermionic");
    }
    for (const auto& c : couplings) {
        if (c.mode < 0 || c.mode >= n_modes())
            throw OutOfRange("coupling mode out of range");
        if (static_cast<int>(c.sites.size()) != expected_sites(c.kind))
            throw InvalidArgument("coupling has the wrong number of system sites");
        for (int s : c.sites) check_site(s);
        if (c.sites.size() == 2 && c.sites[0] == c.sites[1])
            throw InvalidArgument("quadratic coupling needs two distinct sites");
        if (hermitian_coupling(c.kind) && std::abs(c.v.imag()) > 1e-12)
            throw InvalidArgument(
                "Hermitian coupling kinds take real amplitudes; phases belong in "
                "the coupling phase");
    }
}

Register make_register(const ModelSpec& model, int boson_levels) {
    return Register::qubits_and_modes(model.n_sites, model.n_modes(), boson_levels);
}

namespace {

void add_system_terms(const ModelSpec& m, OperatorSum& h) {
    if (m.constant != 0.0) h.add(m.constant, {});
    for (const auto& t : m.onsite) h.add(t.eps / 2.0, {{OpKind::SigmaZ, t.site}});
    for (const auto& p : m.pairs) {
        switch (p.kind) {
            case PairKind::ZZ:
                h.add(p.coeff.real(),
                      {{OpKind::SigmaZ, p.i}, {OpKind::SigmaZ, p.j}});
                break;
            case PairKind::XX:
                h.add(p.coeff.real(),
                      {{OpKind::SigmaX, p.i}, {OpKind::SigmaX, p.j}});
                break;
            case PairKind::Hopping: {
                std::vector<SiteOperator> f{{OpKind::SigmaPlus, p.i}};
                if (p.jw_string) append_string(f, p.i, p.j);
                f.push_back({OpKind::SigmaMinus, p.j});
                h.add(p.coeff, f);
                std::vector<SiteOperator> fd{{OpKind::SigmaPlus, p.j}};
                if (p.jw_string) append_string(fd, p.i, p.j);
                fd.push_back({OpKind::SigmaMinus, p.i});
                h.add(std::conj(p.coeff), fd);
                break;
            }
            case PairKind::DensityDensity:
                throw InvalidArgument(
                    "density-density terms must be Jordan-Wigner mapped first");
        }
    }
}

// System factors of one coupling term; `dagger` requests C^dag for the
// non-Hermitian kinds.
std::vector<SiteOperator> coupling_system_ops(const CouplingTerm& c, bool dagger) {
    switch (c.kind) {
        case CouplingKind::Longitudinal:
            return {{OpKind::SigmaZ, c.sites[0]}};
        case CouplingKind::Transverse:
            return {{OpKind::SigmaX, c.sites[0]}};
        case CouplingKind::RotatingWave:
            return {{dagger ? OpKind::SigmaPlus : OpKind::SigmaMinus, c.sites[0]}};
        case CouplingKind::QuadraticXX:
            return {{OpKind::SigmaX, c.sites[0]}, {OpKind::SigmaX, c.sites[1]}};
        case CouplingKind::QuadraticChiral: {
            std::vector<SiteOperator> f{
                {dagger ? OpKind::SigmaMinus : OpKind::SigmaPlus, c.sites[0]}};
            if (c.jw_string) append_string(f, c.sites[0], c.sites[1]);
            f.push_back({dagger ? OpKind::SigmaPlus : OpKind::SigmaMinus, c.sites[1]});
            return f;
        }
        case CouplingKind::Drive:
            return {};
        case CouplingKind::QuadraticHopping:
            throw InvalidArgument("handled by caller");  // two summands
    }
    throw InvalidArgument("unknown coupling kind");
}

void add_coupling(OperatorSum& h, const CouplingTerm& c, int mode_site, Complex v) {
    auto add_pair = [&](const std::vector<SiteOperator>& sys,
                        const std::vector<SiteOperator>& sys_dag, Complex amp) {
        std::vector<SiteOperator> f = sys;
        f.push_back({OpKind::Create, mode_site});
        h.add(amp, f);
        std::vector<SiteOperator> fd = sys_dag;
        fd.push_back({OpKind::Annihilate, mode_site});
        h.add(std::conj(amp), fd);
    };
    if (c.kind == CouplingKind::QuadraticHopping) {
        // C = s+_i s-_j + s+_j s-_i, Hermitian.
        CouplingTerm swapped = c;
        std::swap(swapped.sites[0], swapped.sites[1]);
        auto a = coupling_system_ops(c, false);
        auto b = coupling_system_ops(swapped, false);
        // (A + B) b^dag + h.c. with A^dag = B.
        add_pair(a, b, v);
        add_pair(b, a, v);
        return;
    }
    add_pair(coupling_system_ops(c, false), coupling_system_ops(c, true), v);
}

}  // namespace

OperatorSum build(const ModelSpec& model_in, const Frame& frame, double t) {
    if (t < 0) throw InvalidArgument("build: t must be >= 0");
    const ModelSpec model =
        model_in.statistics == Statistics::Fermion ? jordan_wigner(model_in) : model_in;
    model.validate();

    OperatorSum h;
    const int nq = model.n_sites;

    if (frame.kind == FrameKind::RotatingModesAndSpins) {
        for (const auto& c : model.couplings)
            if (c.kind != CouplingKind::RotatingWave)
                throw FrameMismatch(
                    "combined rotating frame needs rotating-wave couplings only");
        for (double w : model.mode_freqs)
            if (std::abs(w - frame.omega0) > 1e-12)
                throw FrameMismatch(
                    "combined rotating frame needs all modes at the reference "
                    "frequency");
        if (model.constant != 0.0) h.add(model.constant, {});
        for (const auto& o : model.onsite)
            h.add((o.eps - frame.omega0) / 2.0, {{OpKind::SigmaZ, o.site}});
        ModelSpec rest = model;
        rest.onsite.clear();
        rest.constant = 0.0;
        OperatorSum sys;
        add_system_terms(rest, sys);
        h += sys;
        for (const auto& c : model.couplings) add_coupling(h, c, nq + c.mode, c.v);
        return h;
    }

    add_system_terms(model, h);
    for (const auto& c : model.couplings) {
        Complex v = c.v;
        if (frame.kind == FrameKind::RotatingModes)
            v *= std::exp(Complex(0, model.mode_freqs[c.mode] * t));
        add_coupling(h, c, nq + c.mode, v);
    }
    if (frame.kind == FrameKind::Lab) {
        for (int k = 0; k < model.n_modes(); ++k)
            if (model.mode_freqs[k] != 0.0)
                h.add(model.mode_freqs[k], {{OpKind::Number, nq + k}});
    }
    return h;
}

ModelSpec jordan_wigner(const ModelSpec& model) {
    if (model.statistics != Statistics::Fermion)
        throw InvalidArgument("jordan_wigner expects a fermionic model");
    ModelSpec out;
    out.statistics = Statistics::Spin;
    out.n_sites = model.n_sites;
    out.mode_freqs = model.mode_freqs;
    out.constant = model.constant;
    out.mode_shifts = model.mode_shifts;

    std::vector<double> eps(model.n_sites, 0.0);

    // eps n -> eps (1 - sigma_z)/2
    for (const auto& o : model.onsite) {
        eps[o.site] += -o.eps;
        out.constant += o.eps / 2.0;
    }
    for (const auto& p : model.pairs) {
        switch (p.kind) {
            case PairKind::DensityDensity: {
                // e n_i n_j = e/4 (1 - z_i - z_j + z_i z_j)
                double e = p.coeff.real();
                out.constant += e / 4.0;
                eps[p.i] += -e / 2.0;
                eps[p.j] += -e / 2.0;
                out.pairs.push_back({p.i, p.j, PairKind::ZZ, e / 4.0, false});
                break;
            }
            case PairKind::Hopping: {
                PairTerm q = p;
                q.jw_string = true;
                out.pairs.push_back(q);
                break;
            }
            default:
                throw InvalidArgument("unsupported fermionic pair term kind");
        }
    }
    for (const auto& c : model.couplings) {
        switch (c.kind) {
            case CouplingKind::Longitudinal: {
                // v n (b^dag + b) = v/2 (b^dag + b) - v/2 sigma_z (b^dag + b)
                double v = c.v.real();
                CouplingTerm drive{{}, c.mode, v / 2.0, CouplingKind::Drive, false};
                CouplingTerm lc{c.sites, c.mode, -v / 2.0, CouplingKind::Longitudinal,
                                false};
                out.couplings.push_back(drive);
                out.couplings.push_back(lc);
                break;
            }
            case CouplingKind::QuadraticChiral:
            case CouplingKind::QuadraticHopping: {
                CouplingTerm q = c;
                q.jw_string = true;
                out.couplings.push_back(q);
                break;
            }
            case CouplingKind::Drive:
                out.couplings.push_back(c);
                break;
            default:
                throw InvalidArgument("unsupported fermionic coupling kind");
        }
    }
    for (int s = 0; s < model.n_sites; ++s)
        if (eps[s] != 0.0) out.onsite.push_back({s, eps[s]});
    out.validate();
    return out;
}

ModelSpec absorb_drives(const ModelSpec& model) {
    if (model.statistics == Statistics::Fermion)
        return absorb_drives(jordan_wigner(model));
    ModelSpec out = model;
    out.couplings.clear();
    out.mode_shifts.assign(std::max<size_t>(model.mode_shifts.size(),
                                            model.mode_freqs.size()),
                           0.0);
    for (size_t k = 0; k < model.mode_shifts.size(); ++k)
        out.mode_shifts[k] = model.mode_shifts[k];

    std::vector<double> w0(model.n_modes(), 0.0);
    for (const auto& c : model.couplings) {
        if (c.kind == CouplingKind::Drive)
            w0[c.mode] += c.v.real();
        else
            out.couplings.push_back(c);
    }
    std::vector<double> eps_shift(model.n_sites, 0.0);
    for (int k = 0; k < model.n_modes(); ++k) {
        if (w0[k] == 0.0) continue;
        if (model.mode_freqs[k] <= 0.0)
            throw UnsupportedTerm(
                "cannot absorb a drive on a zero-frequency mode; keep it explicit");
        double delta = -w0[k] / model.mode_freqs[k];
        out.mode_shifts[k] += delta;
        out.constant += -w0[k] * w0[k] / model.mode_freqs[k];
        for (const auto& c : model.couplings) {
            if (c.mode != k || c.kind != CouplingKind::Longitudinal) continue;
            eps_shift[c.sites[0]] += 4.0 * delta * c.v.real();
        }
    }
    for (int s = 0; s < model.n_sites; ++s) {
        if (eps_shift[s] == 0.0) continue;
        bool found = false;
        for (auto& o : out.onsite)
            if (o.site == s) {
                o.eps += eps_shift[s];
                found = true;
            }
        if (!found) out.onsite.push_back({s, eps_shift[s]});
    }
    return out;
}

ModelSpec combined_rotating_frame(const ModelSpec& model, double omega0) {
    const ModelSpec m =
        model.statistics == Statistics::Fermion ? jordan_wigner(model) : model;
    for (const auto& c : m.couplings)
        if (c.kind != CouplingKind::RotatingWave)
            throw FrameMismatch(
                "combined rotating frame needs rotating-wave couplings only");
    for (double w : m.mode_freqs)
        if (std::abs(w - omega0) > 1e-12)
            throw FrameMismatch(
                "combined rotating frame needs all modes at the reference frequency");
    ModelSpec out = m;
    // Every spin rotates with the frame, including those with eps = 0.
    std::vector<double> eps(out.n_sites, 0.0);
    for (const auto& o : out.onsite) eps[o.site] += o.eps;
    out.onsite.clear();
    for (int s = 0; s < out.n_sites; ++s)
        if (eps[s] - omega0 != 0.0) out.onsite.push_back({s, eps[s] - omega0});
    for (auto& w : out.mode_freqs) w = 0.0;
    return out;
}

// --- presets -------------------------------------------------------------------

ModelSpec holstein(const std::vector<double>& eps,
                   const std::vector<std::tuple<int, int, Complex>>& hoppings,
                   const std::vector<double>& omega,
                   const std::vector<std::tuple<int, int, double>>& v_longitudinal) {
    ModelSpec m;
    m.statistics = Statistics::Spin;
    m.n_sites = static_cast<int>(eps.size());
    m.mode_freqs = omega;
    for (int i = 0; i < m.n_sites; ++i) m.onsite.push_back({i, eps[i]});
    for (auto& [i, j, h] : hoppings)
        m.pairs.push_back({i, j, PairKind::Hopping, h, false});
    for (auto& [j, k, v] : v_longitudinal)
        m.couplings.push_back({{j}, k, v, CouplingKind::Longitudinal, false});
    m.validate();
    return m;
}

ModelSpec hubbard_holstein(
    const std::vector<double>& eps,
    const std::vector<std::tuple<int, int, double>>& density_density,
    const std::vector<std::tuple<int, int, Complex>>& hoppings,
    const std::vector<double>& omega,
    const std::vector<std::tuple<int, int, double>>& v_longitudinal) {
    ModelSpec m;
    m.statistics = Statistics::Fermion;
    m.n_sites = static_cast<int>(eps.size());
    m.mode_freqs = omega;
    for (int i = 0; i < m.n_sites; ++i) m.onsite.push_back({i, eps[i]});
    for (auto& [i, j, e] : density_density)
        m.pairs.push_back({i, j, PairKind::DensityDensity, e, false});
    for (auto& [i, j, t] : hoppings)
        m.pairs.push_back({i, j, PairKind::Hopping, t, false});
    for (auto& [j, k, v] : v_longitudinal)
        m.couplings.push_back({{j}, k, v, CouplingKind::Longitudinal, false});
    m.validate();
    return m;
}

ModelSpec frohlich(const std::vector<double>& eps,
                   const std::vector<std::tuple<int, int, Complex>>& hoppings,
                   const std::vector<double>& omega,
                   const std::vector<std::tuple<int, int, int, Complex>>& v_chiral) {
    ModelSpec m;
    m.statistics = Statistics::Fermion;
    m.n_sites = static_cast<int>(eps.size());
    m.mode_freqs = omega;
    for (int i = 0; i < m.n_sites; ++i) m.onsite.push_back({i, eps[i]});
    for (auto& [i, j, t] : hoppings)
        m.pairs.push_back({i, j, PairKind::Hopping, t, false});
    for (auto& [i, j, k, v] : v_chiral)
        m.couplings.push_back({{i, j}, k, v, CouplingKind::QuadraticChiral, false});
    m.validate();
    return m;
}

ModelSpec dicke(const std::vector<double>& eps,
                const std::vector<std::tuple<int, int, double>>& zz,
                const std::vector<double>& omega,
                const std::vector<std::tuple<int, int, double>>& v_transverse) {
    ModelSpec m;
    m.statistics = Statistics::Spin;
    m.n_sites = static_cast<int>(eps.size());
    m.mode_freqs = omega;
    for (int i = 0; i < m.n_sites; ++i) m.onsite.push_back({i, eps[i]});
    for (auto& [i, j, e] : zz) m.pairs.push_back({i, j, PairKind::ZZ, e, false});
    for (auto& [i, k, v] : v_transverse)
        m.couplings.push_back({{i}, k, v, CouplingKind::Transverse, false});
    m.validate();
    return m;
}

ModelSpec tavis_cummings(const std::vector<double>& eps,
                         const std::vector<double>& omega,
                         const std::vector<std::tuple<int, int, Complex>>& v_rw) {
    ModelSpec m;
    m.statistics = Statistics::Spin;
    m.n_sites = static_cast<int>(eps.size());
    m.mode_freqs = omega;
    for (int i = 0; i < m.n_sites; ++i) m.onsite.push_back({i, eps[i]});
    for (auto& [i, k, v] : v_rw)
        m.couplings.push_back({{i}, k, v, CouplingKind::RotatingWave, false});
    m.validate();
    return m;
}

ModelSpec jaynes_cummings(double eps, double omega, Complex v) {
    return tavis_cummings({eps}, {omega}, {{0, 0, v}});
}

ModelSpec rpa_radical(
    const std::vector<std::tuple<int, int, Complex>>& t_matrix,
    const std::vector<std::tuple<int, int, int, int, double>>& h_direct,
    const std::vector<double>& omega,
    const std::vector<std::tuple<int, int, int, Complex>>& v_chiral) {
    ModelSpec m;
    m.statistics = Statistics::Fermion;
    m.n_sites = 4;  // the diradical active space
    m.mode_freqs = omega;
    for (auto& [i, j, t] : t_matrix) {
        if (i == j)
            m.onsite.push_back({i, t.real()});
        else if (i < j)
            m.pairs.push_back({i, j, PairKind::Hopping, t, false});
    }
    for (auto& [i, j, jp, ip, h] : h_direct) {
        // <ij|j'i'> in physicists' ordering; only the direct part
        // (i'=i, j'=j) reduces to a density-density term within the artifact.
        if (ip != i || jp != j)
            throw UnsupportedTerm(
                "rpa_radical supports direct two-electron entries (i,j,j,i) only");
        m.pairs.push_back({i, j, PairKind::DensityDensity, h / 2.0, false});
    }
    for (auto& [i, j, k, v] : v_chiral)
        m.couplings.push_back({{i, j}, k, v, CouplingKind::QuadraticChiral, false});
    m.validate();
    return m;
}

ModelSpec dicke_example_2x2() {
    ModelSpec m = dicke({0.5, 0.5}, {{0, 1, 1.0}}, {1.0, 1.0},
                        {{0, 0, 0.5}, {1, 1, 0.5}, {0, 1, -0.5}, {1, 0, -0.5}});
    return m;
}

// --- JSON ----------------------------------------------------------------------

namespace {

using nlohmann::json;

std::vector<double> require_vec(const json& p, const std::string& key) {
    if (!p.contains(key))
        throw IncompleteParams("preset parameter missing: " + key);
    return p.at(key).get<std::vector<double>>();
}

Complex to_complex(const json& v) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    return {v.at(0).get<double>(), v.at(1).get<double>()};
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{
        "holstein",       "hubbard_holstein", "frohlich",
        "dicke",          "tavis_cummings",   "jaynes_cummings",
        "rpa_radical",    "dicke_example_2x2"};
    return names;
}

ModelSpec preset(const std::string& name, const nlohmann::json& params) {
    using json = nlohmann::json;
    auto triples = [&](const char* key) {
        std::vector<std::tuple<int, int, double>> out;
        for (const json& e : params.value(key, json::array()))
            out.emplace_back(e.at(0).get<int>(), e.at(1).get<int>(),
                             e.at(2).get<double>());
        return out;
    };
    auto ctriples = [&](const char* key) {
        std::vector<std::tuple<int, int, Complex>> out;
        for (const json& e : params.value(key, json::array()))
            out.emplace_back(e.at(0).get<int>(), e.at(1).get<int>(),
                             to_complex(e.at(2)));
        return out;
    };
    auto cquads = [&](const char* key) {
        std::vector<std::tuple<int, int, int, Complex>> out;
        for (const json& e : params.value(key, json::array()))
            out.emplace_back(e.at(0).get<int>(), e.at(1).get<int>(),
                             e.at(2).get<int>(), to_complex(e.at(3)));
        return out;
    };

    if (name == "dicke_example_2x2") return dicke_example_2x2();
    if (name == "holstein")
        return holstein(require_vec(params, "eps"), ctriples("hoppings"),
                        require_vec(params, "omega"), triples("v"));
    if (name == "hubbard_holstein")
        return hubbard_holstein(require_vec(params, "eps"),
                                triples("density_density"), ctriples("hoppings"),
                                require_vec(params, "omega"), triples("v"));
    if (name == "frohlich")
        return frohlich(require_vec(params, "eps"), ctriples("hoppings"),
                        require_vec(params, "omega"), cquads("v"));
    if (name == "dicke")
        return dicke(require_vec(params, "eps"), triples("zz"),
                     require_vec(params, "omega"), triples("v"));
    if (name == "tavis_cummings")
        return tavis_cummings(require_vec(params, "eps"),
                              require_vec(params, "omega"), ctriples("v"));
    if (name == "jaynes_cummings") {
        if (!params.contains("eps") || !params.contains("omega") ||
            !params.contains("v"))
            throw IncompleteParams("jaynes_cummings needs eps, omega, v");
        return jaynes_cummings(params.at("eps").get<double>(),
                               params.at("omega").get<double>(),
                               to_complex(params.at("v")));
    }
    if (name == "rpa_radical") {
        std::vector<std::tuple<int, int, int, int, double>> h;
        for (const json& e : params.value("h_direct", json::array()))
            h.emplace_back(e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>(),
                           e.at(3).get<int>(), e.at(4).get<double>());
        return rpa_radical(ctriples("t"), h, require_vec(params, "omega"),
                           cquads("v"));
    }
    std::string valid;
    for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown model preset '" + name + "'; valid presets: " + valid);
}

nlohmann::json model_to_json(const ModelSpec& m) {
    json j;
    j["statistics"] = (m.statistics == Statistics::Spin) ? "spin" : "fermion";
    j["n_sites"] = m.n_sites;
    j["mode_freqs"] = m.mode_freqs;
    j["constant"] = m.constant;
    if (!m.mode_shifts.empty()) j["mode_shifts"] = m.mode_shifts;
    j["onsite"] = json::array();
    for (const auto& o : m.onsite) j["onsite"].push_back({o.site, o.eps});
    j["pairs"] = json::array();
    for (const auto& p : m.pairs)
        j["pairs"].push_back({{"i", p.i},
                              {"j", p.j},
                              {"kind", int(p.kind)},
                              {"re", p.coeff.real()},
                              {"im", p.coeff.imag()},
                              {"jw", p.jw_string}});
    j["couplings"] = json::array();
    for (const auto& c : m.couplings)
        j["couplings"].push_back({{"sites", c.sites},
                                  {"mode", c.mode},
                                  {"kind", int(c.kind)},
                                  {"re", c.v.real()},
                                  {"im", c.v.imag()},
                                  {"jw", c.jw_string}});
    return j;
}

ModelSpec model_from_json(const nlohmann::json& j) {
    ModelSpec m;
    m.statistics = (j.at("statistics").get<std::string>() == "spin")
                       ? Statistics::Spin
                       : Statistics::Fermion;
    m.n_sites = j.at("n_sites").get<int>();
    m.mode_freqs = j.at("mode_freqs").get<std::vector<double>>();
    m.constant = j.value("constant", 0.0);
    if (j.contains("mode_shifts"))
        m.mode_shifts = j.at("mode_shifts").get<std::vector<double>>();
    for (const json& o : j.at("onsite"))
        m.onsite.push_back({o.at(0).get<int>(), o.at(1).get<double>()});
    for (const json& p : j.at("pairs"))
        m.pairs.push_back({p.at("i").get<int>(), p.at("j").get<int>(),
                           PairKind(p.at("kind").get<int>()),
                           Complex(p.at("re").get<double>(), p.at("im").get<double>()),
                           p.at("jw").get<bool>()});
    for (const json& c : j.at("couplings"))
        m.couplings.push_back({c.at("sites").get<std::vector<int>>(),
                               c.at("mode").get<int>(),
                               Complex(c.at("re").get<double>(),
                                       c.at("im").get<double>()),
                               CouplingKind(c.at("kind").get<int>()),
                               c.at("jw").get<bool>()});
    m.validate();
    return m;
}

}  // namespace rqsim
