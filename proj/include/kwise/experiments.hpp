#pragma once

#include <string>
#include <vector>

#include "kwise/config.hpp"
#include "kwise/minimize.hpp"
#include "kwise/thresholds.hpp"

namespace kwise {

// One row of a coupling sweep. Wall time goes to the metadata sidecar,
// never into the CSV body, which must be byte-identical across reruns.
struct SweepRecord {
    double beta = 0.0;
    double level = 0.0;
    double interaction = 0.0;
    double scaled_interaction = 0.0;  // |beta| * interaction
    std::string classification;
    std::vector<double> comp_norms;  // |u_i|_{Kq,i}
    unsigned seed = 0;
    double wall_ms = 0.0;
    bool solver_ok = true;
};

struct ScalarRunResult {
    ScalarSolution solution;
    double nehari_rel_err = 0.0;
    double energy_identity_rel_err = 0.0;
    double oracle_max_err = -1.0;  // < 0: no closed-form oracle for this datum
    bool has_oracle = false;
    double wall_ms = 0.0;
};

ScalarRunResult run_scalar_experiment(const ExperimentConfig& cfg);

struct DichotomyRow {
    double beta = 0.0;
    double level = 0.0;   // best upper bound over the whole candidate pool
    double ceiling = 0.0;
    std::string classification;
    int n_trivial = 0;
    std::vector<double> comp_norms;
    double interaction = 0.0;
    unsigned best_seed = 0;
    double wall_ms = 0.0;
};

struct DichotomyResult {
    std::vector<DichotomyRow> rows;
    double crossing = 0.0;  // smallest dichotomy quotient over the pool
    ThresholdReport thresholds;
};

DichotomyResult run_dichotomy_scan(const ExperimentConfig& cfg);

struct StrongCompetitionResult {
    std::vector<SweepRecord> records;
    LimitStructure limit;
    SystemState final_state;
    double final_gap_rel = 0.0;  // |last level - limit level| / limit level
    int pair_a = 0, pair_b = 1;  // most segregated pair at the last coupling
    double interface_estimate = 0.0;
    std::vector<double> pair_overlaps;        // row-major over i < j
    std::vector<std::pair<int, int>> pairs;   // matching index pairs
};

StrongCompetitionResult run_strong_competition(const ExperimentConfig& cfg);

// Dispatch on cfg.experiment, write CSV + metadata + plot data into
// cfg.output_dir. Returns the process exit code (0 ok, 2 config error
// handled by the caller, 3 solver failure in a required computation).
int run_experiment(const ExperimentConfig& cfg);

}  // namespace kwise
