#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rqsim/cli.hpp"

namespace {

int load_json(const std::string& path, rqsim::Json& doc, std::ostream& err) {
    std::ifstream in(path);
    if (!in.good()) {
        err << "cannot open config file: " << path << "\n";
        return 2;
    }
    try {
        in >> doc;
    } catch (const std::exception& e) {
        err << "config parse error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rqsim: resonator-qubit quantum simulation toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    uint64_t seed = 0;
    int jobs = 0, truncation = 0;

    CLI::App* run = app.add_subcommand("run", "execute an experiment config");
    run->add_option("--config", config_path, "config JSON path")->required();
    run->add_option("--seed", seed, "override the base RNG seed");
    run->add_option("--out", out_dir, "override the output directory");
    run->add_option("--jobs", jobs, "parallel workers for sweep grids");
    run->add_option("--truncation", truncation, "override the boson truncation");

    std::string validate_path;
    CLI::App* val = app.add_subcommand("validate", "check a config file");
    val->add_option("--config", validate_path, "config JSON path")->required();

    CLI11_PARSE(app, argc, argv);

    if (val->parsed()) {
        rqsim::Json doc;
        if (int rc = load_json(validate_path, doc, std::cerr)) return rc;
        auto errs = rqsim::validate_config(doc);
        for (const auto& e : errs) std::cerr << e << "\n";
        if (errs.empty()) std::cout << "config ok\n";
        return errs.empty() ? 0 : 2;
    }

    rqsim::Json doc;
    if (int rc = load_json(config_path, doc, std::cerr)) return rc;
    auto errs = rqsim::validate_config(doc);
    if (!errs.empty()) {
        for (const auto& e : errs) std::cerr << e << "\n";
        return 2;
    }
    rqsim::RunConfig cfg;
    try {
        cfg = rqsim::parse_config(doc);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (run->count("--seed")) cfg.seed = seed;
    if (jobs > 0) cfg.jobs = jobs;
    if (truncation > 0) cfg.truncation = truncation;

    return rqsim::run_experiment(cfg, std::cout);
}
