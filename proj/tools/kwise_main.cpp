#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "kwise/experiments.hpp"

namespace {

struct CommonOpts {
    std::string config;
    std::string out;
    int seed = -1;
    int jobs = 0;
};

void add_common(CLI::App* sub, CommonOpts& o) {
    sub->add_option("--config", o.config, "configuration file")->required();
    sub->add_option("--out", o.out, "output directory (overrides the config)");
    sub->add_option("--seed", o.seed, "seed override");
    sub->add_option("--jobs", o.jobs, "concurrent runs (overrides the config)");
}

int dispatch(const std::string& experiment, const CommonOpts& o) {
    kwise::ExperimentConfig cfg;
    try {
        cfg = kwise::ExperimentConfig::load(o.config, experiment);
        if (!o.out.empty()) cfg.output_dir = o.out;
        if (o.seed >= 0) cfg.seeds = {static_cast<unsigned>(o.seed)};
        if (o.jobs >= 1) cfg.jobs = o.jobs;
        cfg.validate();
    } catch (const kwise::ConfigError& e) {
        std::cerr << o.config << ":" << e.line << ": " << e.what() << "\n";
        return 2;
    } catch (const kwise::InvalidArgument& e) {
        std::cerr << o.config << ": " << e.what() << "\n";
        return 2;
    }
    try {
        return kwise::run_experiment(cfg);
    } catch (const kwise::ConvergenceFailure& e) {
        std::cerr << experiment << ": solver failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"least-energy solutions of K-wise coupled Schrodinger systems"};
    app.require_subcommand(1);

    const std::pair<const char*, const char*> kinds[] = {
        {"scalar", "single-equation ground state with the analytic oracle"},
        {"thresholds", "explicit constants and dichotomy threshold bounds"},
        {"dichotomy", "classification of constrained minimizers across couplings"},
        {"sweep", "strong-competition continuation towards segregation"},
        {"limit", "structured segregated limit problem"},
    };
    std::map<std::string, CommonOpts> opts;
    for (const auto& [name, desc] : kinds) add_common(app.add_subcommand(name, desc), opts[name]);

    CLI11_PARSE(app, argc, argv);
    for (const auto& [name, desc] : kinds)
        if (app.got_subcommand(name)) return dispatch(name, opts.at(name));
    return 2;
}
