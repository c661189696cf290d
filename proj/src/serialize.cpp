#include "rqsim/serialize.hpp"

namespace rqsim {

Json register_to_json(const Register& reg) {
    Json sites = Json::array();
    for (int i = 0; i < reg.size(); ++i) {
        if (reg.is_qubit(i))
            sites.push_back({{"kind", "qubit"}});
        else
            sites.push_back({{"kind", "mode"}, {"dim", reg.site(i).dim}});
    }
    return sites;
}

Register register_from_json(const Json& j) {
    std::vector<Site> sites;
    for (const Json& s : j) {
        std::string kind = s.at("kind").get<std::string>();
        if (kind == "qubit")
            sites.push_back(qubit_site());
        else if (kind == "mode")
            sites.push_back(mode_site(s.at("dim").get<int>()));
        else
            throw ConfigError("unknown site kind: " + kind);
    }
    return Register(std::move(sites));
}

namespace {

Json gate_to_json(const Gate& g) {
    Json j;
    j["name"] = gate_name(g.kind);
    j["sites"] = g.sites;
    j["params"] = g.params;
    j["composite"] = !g.primitive();
    if (!g.primitive()) {
        Json exp = Json::array();
        for (const Gate& e : g.expansion) exp.push_back(gate_to_json(e));
        j["expansion"] = exp;
    }
    return j;
}

Gate gate_from_json(const Json& j) {
    Gate g;
    auto kind = gate_kind_from_name(j.at("name").get<std::string>());
    if (!kind) throw ConfigError("unknown gate name: " + j.at("name").dump());
    g.kind = *kind;
    g.sites = j.at("sites").get<std::vector<int>>();
    g.params = j.at("params").get<std::vector<double>>();
    if (j.value("composite", false)) {
        for (const Json& e : j.at("expansion")) g.expansion.push_back(gate_from_json(e));
        if (g.expansion.empty())
            throw ConfigError("composite gate with empty expansion");
    }
    return g;
}

}  // namespace

Json circuit_to_json(const Circuit& c, bool expand_composites) {
    Json gates = Json::array();
    if (expand_composites) {
        for (const Gate& g : flatten(c)) gates.push_back(gate_to_json(g));
    } else {
        for (const Gate& g : c.gates) gates.push_back(gate_to_json(g));
    }
    Json j;
    j["gates"] = gates;
    if (!c.final_permutation.empty()) j["final_permutation"] = c.final_permutation;
    if (c.trotter) {
        j["trotter"] = {{"step", c.trotter->step_index},
                        {"tau", c.trotter->tau},
                        {"n_steps", c.trotter->n_steps},
                        {"order", c.trotter->order}};
    }
    return j;
}

Circuit circuit_from_json(const Json& j) {
    Circuit c;
    for (const Json& g : j.at("gates")) c.gates.push_back(gate_from_json(g));
    if (j.contains("final_permutation"))
        c.final_permutation = j.at("final_permutation").get<std::vector<int>>();
    if (j.contains("trotter")) {
        TrotterMeta m;
        m.step_index = j["trotter"].at("step").get<int>();
        m.tau = j["trotter"].at("tau").get<double>();
        m.n_steps = j["trotter"].at("n_steps").get<int>();
        m.order = j["trotter"].at("order").get<int>();
        c.trotter = m;
    }
    return c;
}

std::string circuit_to_string(const Circuit& c, bool expand_composites) {
    return circuit_to_json(c, expand_composites).dump(2);
}

Circuit circuit_from_string(const std::string& s) {
    return circuit_from_json(Json::parse(s));
}

}  // namespace rqsim
