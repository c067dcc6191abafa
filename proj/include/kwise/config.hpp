#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kwise/params.hpp"

namespace kwise {

// Config file diagnostics carry the offending line.
class ConfigError : public InvalidArgument {
public:
    ConfigError(const std::string& what, int line)
        : InvalidArgument(what), line(line) {}
    int line;
};

// Flat key/value text with optional [section] headers. Lines are
//   key = value        with # comments and blank lines ignored.
struct KeyValueFile {
    struct Entry {
        std::string section;  // empty for the global scope
        std::string key;
        std::string value;
        int line;
    };
    std::vector<Entry> entries;

    static KeyValueFile parse_text(const std::string& text);
    static KeyValueFile parse_file(const std::string& path);

    std::optional<std::string> get(const std::string& section, const std::string& key) const;
};

struct ExperimentConfig {
    std::string experiment;  // scalar | thresholds | dichotomy | sweep | limit

    // system data
    Params params;

    // grid; rmax == 0 selects the decay-length heuristic
    double rmax = 0.0;
    int n = 4000;

    // scalar experiment overrides
    int scalar_d = 1;
    double scalar_p = 4.0;
    double scalar_lambda = 1.0;
    double scalar_mu = 1.0;
    double scalar_rmax = 20.0;
    int scalar_n = 4000;

    // dichotomy scan
    int dichotomy_points = 8;

    // strong-competition schedule
    std::vector<double> beta_schedule = {-1.0, -10.0, -100.0, -1000.0};

    std::vector<unsigned> seeds = {1};
    std::map<std::string, double> tolerances = {
        {"tol_energy", 1e-12}, {"tol_constraint", 1e-8}, {"quad_tol", 1e-5}};
    std::string output_dir = "results";
    int jobs = 1;

    static ExperimentConfig load(const std::string& path, const std::string& experiment);
    static ExperimentConfig from_text(const std::string& text, const std::string& experiment);

    void validate() const;

    // resolved grid for the system experiments
    GridPtr make_grid() const;
    bool rmax_is_heuristic() const { return rmax == 0.0; }

    // every key with its resolved value, for the metadata echo and the
    // generated reference file
    std::vector<std::pair<std::string, std::string>> echo() const;
};

// Reference file describing every recognized key and its default.
std::string config_reference_text();

}  // namespace kwise
