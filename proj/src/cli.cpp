#include "rqsim/cli.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <thread>

namespace rqsim {

namespace fs = std::filesystem;

std::string content_hash(const std::string& bytes) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
    return buf;
}

uint64_t mix_seed(uint64_t base, uint64_t index) {
    uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// --- validation -----------------------------------------------------------------

namespace {

const std::vector<std::string> kExperiments = {
    "simulate", "compile",  "noise-map",    "chevron",
    "error-scan", "spectral", "encoding-cost"};

void check_keys(const Json& obj, const std::vector<std::string>& allowed,
                const std::string& path, std::vector<std::string>& errs) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const auto& k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) errs.push_back("unknown key: " + path + it.key());
    }
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::vector<std::string> validate_config(const Json& doc) {
    std::vector<std::string> errs;
    if (!doc.is_object()) {
        errs.push_back("config must be a JSON object");
        return errs;
    }
    check_keys(doc,
               {"experiment", "model", "plan", "noise", "observables", "initial",
                "truncation", "seed", "out", "jobs", "chevron", "spectral",
                "error_scan", "encoding", "compile"},
               "", errs);

    if (!doc.contains("experiment") || !doc["experiment"].is_string()) {
        errs.push_back("experiment: required string");
    } else {
        std::string e = doc["experiment"].get<std::string>();
        bool ok = false;
        for (const auto& k : kExperiments)
            if (e == k) ok = true;
        if (!ok) {
            std::string all;
            for (const auto& k : kExperiments) all += (all.empty() ? "" : ", ") + k;
            errs.push_back("experiment: unknown kind '" + e + "'; one of: " + all);
        }
    }

    bool needs_model = true;
    if (doc.contains("experiment") && doc["experiment"].is_string()) {
        std::string e = doc["experiment"].get<std::string>();
        needs_model = (e == "simulate" || e == "compile" || e == "noise-map" ||
                       e == "error-scan");
    }
    if (doc.contains("model")) {
        const Json& m = doc["model"];
        check_keys(m, {"preset", "params"}, "model.", errs);
        if (!m.contains("preset") || !m["preset"].is_string())
            errs.push_back("model.preset: required string");
        else {
            std::string p = m["preset"].get<std::string>();
            bool ok = false;
            for (const auto& n : preset_names())
                if (p == n) ok = true;
            if (!ok) {
                std::string all;
                for (const auto& n : preset_names())
                    all += (all.empty() ? "" : ", ") + n;
                errs.push_back("model.preset: unknown preset '" + p +
                               "'; valid presets: " + all);
            }
        }
    } else if (needs_model) {
        errs.push_back("model: required for this experiment");
    }

    if (doc.contains("plan")) {
        const Json& p = doc["plan"];
        check_keys(p, {"order", "tau", "n_steps", "phase_convention"}, "plan.", errs);
        if (p.contains("order") && p["order"].is_number_integer()) {
            int o = p["order"].get<int>();
            if (o != 1 && o != 2) errs.push_back("plan.order must be 1 or 2");
        }
        if (p.contains("tau")) {
            if (!p["tau"].is_number() || p["tau"].get<double>() <= 0)
                errs.push_back("plan.tau must be > 0");
        }
        if (p.contains("n_steps") && p["n_steps"].is_number_integer() &&
            p["n_steps"].get<int>() < 0)
            errs.push_back("plan.n_steps must be >= 0");
        if (p.contains("phase_convention")) {
            std::string c = p["phase_convention"].get<std::string>();
            if (c != "midpoint" && c != "left_edge")
                errs.push_back("plan.phase_convention: 'midpoint' or 'left_edge'");
        }
    }

    if (doc.contains("noise")) {
        check_keys(doc["noise"], {"gamma", "Gamma", "t_gate", "chi_t", "kerr_t"},
                   "noise.", errs);
        for (const char* key : {"gamma", "Gamma"}) {
            if (!doc["noise"].contains(key)) continue;
            const Json& g = doc["noise"][key];
            if (g.is_array()) {
                for (const Json& v : g)
                    if (!v.is_number() || v.get<double>() < 0)
                        errs.push_back(std::string("noise.") + key +
                                       " entries must be >= 0");
            } else if (!g.is_number() || g.get<double>() < 0) {
                errs.push_back(std::string("noise.") + key + " must be >= 0");
            }
        }
        if (doc["noise"].contains("t_gate") &&
            doc["noise"]["t_gate"].get<double>() < 0)
            errs.push_back("noise.t_gate must be >= 0");
    }

    if (doc.contains("initial"))
        check_keys(doc["initial"], {"spins", "modes"}, "initial.", errs);
    if (doc.contains("truncation")) {
        if (!doc["truncation"].is_number_integer() ||
            doc["truncation"].get<int>() < 2)
            errs.push_back("truncation must be an integer >= 2");
    }
    if (doc.contains("jobs") &&
        (!doc["jobs"].is_number_integer() || doc["jobs"].get<int>() < 1))
        errs.push_back("jobs must be a positive integer");

    if (doc.contains("chevron"))
        check_keys(doc["chevron"],
                   {"manifold", "steps", "dphi_max", "dphi_count", "gamma_t_gate",
                    "placement"},
                   "chevron.", errs);
    if (doc.contains("spectral"))
        check_keys(doc["spectral"],
                   {"v", "omega0", "gamma", "Gamma", "t_max", "dt", "omega_min",
                    "omega_max", "omega_count"},
                   "spectral.", errs);
    if (doc.contains("error_scan"))
        check_keys(doc["error_scan"], {"orders", "taus", "truncations", "t_final"},
                   "error_scan.", errs);
    if (doc.contains("encoding"))
        check_keys(doc["encoding"], {"d"}, "encoding.", errs);
    if (doc.contains("compile"))
        check_keys(doc["compile"], {"network", "expand"}, "compile.", errs);
    return errs;
}

RunConfig parse_config(const Json& doc) {
    auto errs = validate_config(doc);
    if (!errs.empty()) throw ConfigError(errs.front());

    RunConfig cfg;
    cfg.experiment = doc.at("experiment").get<std::string>();
    if (doc.contains("model")) {
        cfg.preset_name = doc["model"].at("preset").get<std::string>();
        cfg.preset_params = doc["model"].value("params", Json::object());
    }
    if (doc.contains("plan")) {
        const Json& p = doc["plan"];
        cfg.plan.order = p.value("order", 2);
        cfg.plan.tau = p.value("tau", 0.1);
        cfg.plan.n_steps = p.value("n_steps", 1);
        cfg.plan.phase_convention =
            p.value("phase_convention", std::string("midpoint")) == "left_edge"
                ? PhaseConvention::LeftEdge
                : PhaseConvention::Midpoint;
    }
    if (doc.contains("noise")) cfg.noise = doc["noise"];
    if (doc.contains("observables"))
        cfg.observables = doc["observables"].get<std::vector<std::string>>();
    if (doc.contains("initial")) {
        if (doc["initial"].contains("spins"))
            cfg.initial_spins = doc["initial"]["spins"].get<std::vector<int>>();
        if (doc["initial"].contains("modes"))
            cfg.initial_modes = doc["initial"]["modes"].get<std::vector<int>>();
    }
    cfg.truncation = doc.value("truncation", 8);
    cfg.seed = doc.value("seed", uint64_t(0));
    cfg.out_dir = doc.value("out", std::string("run_out"));
    cfg.jobs = doc.value("jobs", 1);
    for (const char* block : {"chevron", "spectral", "error_scan", "encoding",
                              "compile"})
        if (doc.contains(block)) cfg.extra[block] = doc[block];
    return cfg;
}

// --- runners --------------------------------------------------------------------

namespace {

struct OutputDir {
    fs::path dir;
    Json manifest_files = Json::object();

    explicit OutputDir(const std::string& path) : dir(path) {
        fs::create_directories(dir);
    }
    void write(const std::string& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        out << content;
        manifest_files[name] = content_hash(content);
    }
    void finish(const Json& config_echo, double wall_s) {
        Json manifest;
        manifest["config"] = config_echo;
        manifest["artifacts"] = manifest_files;
        manifest["wall_time_s"] = wall_s;
        std::ofstream out(dir / "manifest.json");
        out << manifest.dump(2) << "\n";
    }
};

Json config_echo(const RunConfig& cfg) {
    Json j;
    j["experiment"] = cfg.experiment;
    if (!cfg.preset_name.empty())
        j["model"] = {{"preset", cfg.preset_name}, {"params", cfg.preset_params}};
    j["plan"] = {{"order", cfg.plan.order},
                 {"tau", cfg.plan.tau},
                 {"n_steps", cfg.plan.n_steps},
                 {"phase_convention",
                  cfg.plan.phase_convention == PhaseConvention::LeftEdge
                      ? "left_edge"
                      : "midpoint"}};
    j["noise"] = cfg.noise;
    j["truncation"] = cfg.truncation;
    j["seed"] = cfg.seed;
    j["extra"] = cfg.extra;
    return j;
}

NoiseSpec noise_from_json(const Json& j, int n_modes) {
    NoiseSpec n = NoiseSpec::none(n_modes);
    auto rates = [&](const char* key, std::vector<double>& out) {
        if (!j.contains(key)) return;
        if (j[key].is_array()) {
            out = j[key].get<std::vector<double>>();
            out.resize(n_modes, out.empty() ? 0.0 : out.back());
        } else {
            out.assign(n_modes, j[key].get<double>());
        }
    };
    rates("gamma", n.gamma);
    rates("Gamma", n.Gamma);
    n.t_gate = j.value("t_gate", 0.0);
    n.chi_t = j.value("chi_t", 0.0);
    n.kerr_t = j.value("kerr_t", 0.0);
    n.validate();
    return n;
}

std::vector<int> initial_occupation(const RunConfig& cfg, const ModelSpec& lowered,
                                    const Register& reg) {
    std::vector<int> occ(reg.size(), 0);
    const int n_qubits = reg.size() - lowered.n_modes();
    for (size_t i = 0; i < cfg.initial_spins.size(); ++i) {
        if (static_cast<int>(i) >= n_qubits)
            throw ConfigError("initial.spins longer than the register");
        occ[i] = cfg.initial_spins[i];
    }
    for (size_t k = 0; k < cfg.initial_modes.size(); ++k) {
        if (static_cast<int>(k) >= lowered.n_modes())
            throw ConfigError("initial.modes longer than the register");
        occ[n_qubits + k] = cfg.initial_modes[k];
    }
    return occ;
}

NamedObservables select_observables(const ModelSpec& model,
                                    const std::vector<std::string>& names) {
    NamedObservables all = observables_suite(model);
    if (names.empty()) return {};
    NamedObservables out;
    for (const auto& want : names) {
        bool found = false;
        for (const auto& [name, op] : all)
            if (name == want) {
                out.push_back({name, op});
                found = true;
            }
        if (!found) throw ConfigError("unknown observable: " + want);
    }
    return out;
}

std::string series_csv(const TimeSeries& ts) {
    std::string csv = "t,observable,value\n";
    for (size_t s = 0; s < ts.times.size(); ++s)
        for (size_t o = 0; o < ts.names.size(); ++o)
            csv += fmt_double(ts.times[s]) + "," + ts.names[o] + "," +
                   fmt_double(ts.values[o][s]) + "\n";
    return csv;
}

const char* kSeriesPlot = R"(import sys
import csv
from collections import defaultdict
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "series.csv"
data = defaultdict(lambda: ([], []))
with open(path) as fh:
    for row in csv.DictReader(fh):
        key = row.get("observable", "")
        if "curve" in row:
            key = row["curve"] + ":" + key
        t, v = data[key]
        t.append(float(row["t"]))
        v.append(float(row["value"]))
for key, (t, v) in sorted(data.items()):
    plt.plot(t, v, label=key)
plt.xlabel("t")
plt.legend()
plt.tight_layout()
plt.savefig("series.png", dpi=150)
)";

const char* kChevronPlot = R"(import csv
import numpy as np
import matplotlib.pyplot as plt

steps, phis, pops = [], [], {}
with open("chevron.csv") as fh:
    for row in csv.DictReader(fh):
        s, p, v = int(row["step"]), float(row["dphi"]), float(row["population"])
        pops[(p, s)] = v
ps = sorted({k[0] for k in pops})
ss = sorted({k[1] for k in pops})
grid = np.array([[pops[(p, s)] for s in ss] for p in ps])
plt.imshow(grid, aspect="auto", origin="lower",
           extent=[min(ss), max(ss), min(ps), max(ps)])
plt.xlabel("Trotter step")
plt.ylabel("dphi")
plt.colorbar(label="excited population")
plt.tight_layout()
plt.savefig("chevron.png", dpi=150)
)";

int run_simulate(const RunConfig& cfg, OutputDir& out, std::ostream& log) {
    ModelSpec model = preset(cfg.preset_name, cfg.preset_params);
    ModelSpec lowered = lower_model(model);
    Register reg = compiled_register(model, cfg.truncation);
    NoiseSpec noise = noise_from_json(cfg.noise, lowered.n_modes());
    NamedObservables obs = select_observables(lowered, cfg.observables);
    if (obs.empty()) {
        log << "no observables requested; writing manifest only\n";
        return 0;
    }
    auto occ = initial_occupation(cfg, lowered, reg);
    TimeSeries ts =
        (noise.enabled() || noise.chi_t != 0 || noise.kerr_t != 0)
            ? simulate_noisy_trotter(model, cfg.plan, noise, cfg.truncation, occ, obs)
            : simulate_pure_trotter(model, cfg.plan, cfg.truncation, occ, obs);
    out.write("series.csv", series_csv(ts));
    out.write("plot.py", kSeriesPlot);
    return 0;
}

int run_compile(const RunConfig& cfg, OutputDir& out, std::ostream&) {
    ModelSpec model = preset(cfg.preset_name, cfg.preset_params);
    Register reg = compiled_register(model, cfg.truncation);
    NetworkKind net = NetworkKind::Auto;
    if (cfg.extra.contains("compile")) {
        std::string n = cfg.extra["compile"].value("network", "auto");
        if (n == "linear") net = NetworkKind::Linear;
        if (n == "quadratic") net = NetworkKind::Quadratic;
        if (n == "none") net = NetworkKind::None;
    }
    Circuit c = compile(model, cfg.plan, net);
    bool expand = cfg.extra.contains("compile") &&
                  cfg.extra["compile"].value("expand", false);
    out.write("circuit.json", circuit_to_string(c, expand) + "\n");

    CircuitMetrics met = metrics(c, reg);
    Json mj;
    mj["depth"] = met.depth;
    mj["total_gates"] = met.total_gates;
    mj["entangling_qubit_gates"] = met.entangling_qubit_gates;
    mj["jc_per_mode"] = met.jc_per_mode;
    mj["calibration_angles"] = met.calibration_angles;
    out.write("metrics.json", mj.dump(2) + "\n");

    std::string csv = "metric,value\n";
    csv += "depth," + std::to_string(met.depth) + "\n";
    csv += "total_gates," + std::to_string(met.total_gates) + "\n";
    csv += "entangling_qubit_gates," + std::to_string(met.entangling_qubit_gates) +
           "\n";
    for (size_t k = 0; k < met.jc_per_mode.size(); ++k)
        csv += "jc_mode_" + std::to_string(k) + "," +
               std::to_string(met.jc_per_mode[k]) + "\n";
    out.write("metrics.csv", csv);

    std::string cal = "angle\n";
    for (double a : met.calibration_angles) cal += fmt_double(a) + "\n";
    out.write("calibration.csv", cal);
    return 0;
}

int run_noise_map(const RunConfig& cfg, OutputDir& out, std::ostream& log) {
    ModelSpec model = preset(cfg.preset_name, cfg.preset_params);
    ModelSpec lowered = lower_model(model);
    const int d = cfg.truncation;
    Register reg = compiled_register(model, d);
    NoiseSpec noise = noise_from_json(cfg.noise, lowered.n_modes());
    auto occ = initial_occupation(cfg, lowered, reg);
    NamedObservables obs = select_observables(
        lowered, cfg.observables.empty()
                     ? std::vector<std::string>{"P0", "P1", "n0", "n1"}
                     : cfg.observables);
    const double T = cfg.plan.tau * cfg.plan.n_steps;

    log << "noise-map: exact reference\n";
    Eigen::SelfAdjointEigenSolver<Matrix> es(
        embed(build(lowered, Frame::lab(), 0.0), reg));
    Vector psi0 = QuantumState::basis(reg, occ).amp;
    TimeSeries exact;
    for (const auto& [n, o] : obs) exact.names.push_back(n);
    exact.values.assign(obs.size(), {});
    for (int m = 0; m <= cfg.plan.n_steps; ++m) {
        double t = m * cfg.plan.tau;
        Vector ph(es.eigenvalues().size());
        for (long i = 0; i < ph.size(); ++i)
            ph(i) = std::exp(Complex(0, -t * es.eigenvalues()(i)));
        Vector v = es.eigenvectors() *
                   (ph.asDiagonal() * (es.eigenvectors().adjoint() * psi0));
        QuantumState q(reg, v);
        exact.times.push_back(t);
        for (size_t o = 0; o < obs.size(); ++o)
            exact.values[o].push_back(expectation(q, obs[o].second).real());
    }

    log << "noise-map: trotterized (noiseless)\n";
    TimeSeries pure = simulate_pure_trotter(model, cfg.plan, d, occ, obs);
    log << "noise-map: trotterized (noisy)\n";
    TimeSeries noisy = simulate_noisy_trotter(model, cfg.plan, noise, d, occ, obs);

    log << "noise-map: effective Lindblad solution\n";
    EffectiveNoise eff = effective_lindbladian(trotter_step(lowered, cfg.plan, 0),
                                               reg, noise, cfg.plan.tau);
    NoiseSpec lind = NoiseSpec::none(lowered.n_modes());
    lind.gamma = eff.gamma_eff;
    lind.Gamma = eff.Gamma_eff;
    DensityMatrix rho0 = DensityMatrix::basis(reg, occ);
    auto traj = lindblad_evolve(
        rho0, [&](double t) { return build(lowered, Frame::rotating(), t); }, lind,
        T, cfg.plan.tau, {}, true);
    TimeSeries lb;
    for (const auto& [n, o] : obs) lb.names.push_back(n);
    lb.values.assign(obs.size(), {});
    for (size_t s = 0; s < traj.size(); ++s) {
        lb.times.push_back(s * cfg.plan.tau);
        for (size_t o = 0; o < obs.size(); ++o)
            lb.values[o].push_back(expectation(traj[s], obs[o].second).real());
    }

    std::string csv = "t,curve,observable,value\n";
    auto add = [&](const char* curve, const TimeSeries& ts) {
        for (size_t s = 0; s < ts.times.size(); ++s)
            for (size_t o = 0; o < ts.names.size(); ++o)
                csv += fmt_double(ts.times[s]) + "," + curve + "," + ts.names[o] +
                       "," + fmt_double(ts.values[o][s]) + "\n";
    };
    add("exact", exact);
    add("trotter", pure);
    add("trotter_noisy", noisy);
    add("effective_lindblad", lb);
    out.write("curves.csv", csv);
    out.write("plot.py", kSeriesPlot);

    Json rates;
    rates["gamma_eff"] = eff.gamma_eff;
    rates["Gamma_eff"] = eff.Gamma_eff;
    out.write("effective_rates.json", rates.dump(2) + "\n");
    return 0;
}

int run_chevron(const RunConfig& cfg, OutputDir& out, std::ostream& log) {
    const Json& ch = cfg.extra.value("chevron", Json::object());
    std::string manifold_s = ch.value("manifold", "third");
    Manifold manifold = manifold_s == "second" ? Manifold::Second : Manifold::Third;
    int steps = ch.value("steps", 40);
    double dphi_max = ch.value("dphi_max", M_PI / 2);
    int count = ch.value("dphi_count", 64);
    double gt = ch.value("gamma_t_gate", 0.0);
    int placement = ch.value("placement", 2);

    std::vector<double> dphis;
    for (int k = 0; k < count; ++k)
        dphis.push_back(-dphi_max + 2 * dphi_max * k / std::max(1, count - 1));

    // Columns are independent; split across jobs deterministically.
    std::vector<std::vector<double>> pops(dphis.size());
    int jobs = std::max(1, cfg.jobs);
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < dphis.size(); i = next.fetch_add(1)) {
            ChevronResult r = replicate_manifold_demo(manifold, {dphis[i]}, steps,
                                                      gt, cfg.truncation, placement);
            pops[i] = r.population[0];
        }
    };
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    log << "chevron: " << dphis.size() << " columns x " << steps << " steps\n";

    std::string csv = "step,dphi,population\n";
    for (size_t p = 0; p < dphis.size(); ++p)
        for (int s = 0; s < steps; ++s)
            csv += std::to_string(s + 1) + "," + fmt_double(dphis[p]) + "," +
                   fmt_double(pops[p][s]) + "\n";
    out.write("chevron.csv", csv);
    out.write("plot.py", kChevronPlot);
    return 0;
}

int run_error_scan(const RunConfig& cfg, OutputDir& out, std::ostream& log) {
    ModelSpec model = preset(cfg.preset_name, cfg.preset_params);
    ModelSpec lowered = lower_model(model);
    const Json& es = cfg.extra.value("error_scan", Json::object());
    std::vector<int> orders = es.value("orders", std::vector<int>{1, 2});
    std::vector<double> taus =
        es.value("taus", std::vector<double>{0.4, 0.2, 0.1, 0.05});
    std::vector<int> ds = es.value("truncations", std::vector<int>{4, 8});
    double t_final = es.value("t_final", 4.0);

    int dmax = *std::max_element(ds.begin(), ds.end());
    Register reg = compiled_register(model, dmax);
    RunConfig tmp = cfg;
    auto occ_full = initial_occupation(tmp, lowered, reg);

    // The occupation carries over across truncations (levels must fit).
    TrotterErrorReport rep;
    {
        std::vector<int> spins(occ_full.begin(),
                               occ_full.end() - lowered.n_modes());
        std::vector<int> modes(occ_full.end() - lowered.n_modes(), occ_full.end());
        for (int d : ds) {
            Register r = compiled_register(model, d);
            std::vector<int> occ = spins;
            occ.insert(occ.end(), modes.begin(), modes.end());
            auto part = trotter_error_scan(model, orders, taus, {d}, t_final, occ);
            for (auto& e : part.entries) rep.entries.push_back(e);
            for (auto& [o, f] : part.tau_exponent) rep.tau_exponent[o] = f;
        }
    }
    log << "error-scan: " << rep.entries.size() << " entries\n";

    std::string csv = "order,tau,d,max_err\n";
    for (const auto& e : rep.entries)
        csv += std::to_string(e.order) + "," + fmt_double(e.tau) + "," +
               std::to_string(e.d) + "," + fmt_double(e.max_err) + "\n";
    out.write("scan.csv", csv);

    Json fits = Json::object();
    for (auto& [o, f] : rep.tau_exponent)
        fits[std::to_string(o)] = {{"slope", f.slope},
                                   {"stderr", f.stderr_slope}};
    out.write("fits.json", fits.dump(2) + "\n");
    return 0;
}

int run_spectral(const RunConfig& cfg, OutputDir& out, std::ostream& log) {
    const Json& sp = cfg.extra.value("spectral", Json::object());
    double v = sp.value("v", 1.0);
    double w0 = sp.value("omega0", 1.0);
    double gamma = sp.value("gamma", 0.2);
    double Gamma = sp.value("Gamma", 0.0);
    double t_max = sp.value("t_max", 80.0);
    double dt = sp.value("dt", 0.02);
    double wmin = sp.value("omega_min", 0.0);
    double wmax = sp.value("omega_max", 2.0);
    int count = sp.value("omega_count", 201);
    const double gs = gamma / 2 + Gamma;

    std::vector<double> times;
    for (double t = 0; t <= t_max + 1e-12; t += dt) times.push_back(t);
    auto corr = xx_correlation(v, w0, gamma, Gamma, cfg.truncation, times);

    std::vector<double> grid;
    for (int k = 0; k < count; ++k)
        grid.push_back(wmin + (wmax - wmin) * k / std::max(1, count - 1));
    auto numeric = spectrum_from_correlation(times, corr, grid);
    auto formula = spectral_function({v}, {w0}, {gs}, grid);
    log << "spectral: peak formula " << formula[count / 2] << "\n";

    std::string csv = "omega,formula,numeric\n";
    for (int k = 0; k < count; ++k)
        csv += fmt_double(grid[k]) + "," + fmt_double(formula[k]) + "," +
               fmt_double(numeric[k]) + "\n";
    out.write("spectrum.csv", csv);
    return 0;
}

int run_encoding(const RunConfig& cfg, OutputDir& out, std::ostream&) {
    const Json& en = cfg.extra.value("encoding", Json::object());
    std::vector<int> ds = en.value("d", std::vector<int>{4, 8, 16, 32});
    std::string csv = "code,d,qubits,resonators,entangling_gates\n";
    for (int d : ds) {
        for (auto [code, name] :
             {std::pair<EncodingCode, const char*>{EncodingCode::ResonatorQubit,
                                                   "resonator_qubit"},
              {EncodingCode::Unary, "unary"},
              {EncodingCode::Binary, "binary"}}) {
            EncodingCost c = encoding_cost(d, code);
            csv += std::string(name) + "," + std::to_string(d) + "," +
                   std::to_string(c.qubits) + "," + std::to_string(c.resonators) +
                   "," + std::to_string(c.entangling_gates) + "\n";
        }
    }
    out.write("encoding.csv", csv);
    return 0;
}

}  // namespace

int run_experiment(const RunConfig& cfg, std::ostream& log) {
    auto start = std::chrono::steady_clock::now();
    OutputDir out(cfg.out_dir);
    int rc = 1;
    try {
        if (cfg.experiment == "simulate")
            rc = run_simulate(cfg, out, log);
        else if (cfg.experiment == "compile")
            rc = run_compile(cfg, out, log);
        else if (cfg.experiment == "noise-map")
            rc = run_noise_map(cfg, out, log);
        else if (cfg.experiment == "chevron")
            rc = run_chevron(cfg, out, log);
        else if (cfg.experiment == "error-scan")
            rc = run_error_scan(cfg, out, log);
        else if (cfg.experiment == "spectral")
            rc = run_spectral(cfg, out, log);
        else if (cfg.experiment == "encoding-cost")
            rc = run_encoding(cfg, out, log);
        else
            throw ConfigError("unknown experiment: " + cfg.experiment);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                start)
                      .count();
    out.finish(config_echo(cfg), wall);
    return rc;
}

}  // namespace rqsim
