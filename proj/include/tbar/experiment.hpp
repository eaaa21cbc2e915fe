#ifndef TBAR_EXPERIMENT_HPP
#define TBAR_EXPERIMENT_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tbar/cycles.hpp"
#include "tbar/fixtures.hpp"
#include "tbar/io.hpp"
#include "tbar/maps.hpp"

namespace tbar {

enum class ExperimentKind { Energy, Jacobian, Balls, FlatNorm, Width, HangLin, MountainPass, MainInequality };

const char* experiment_kind_name(ExperimentKind k);
/// Accepts upper-case names (MAIN_INEQUALITY) and subcommand spellings (main-inequality).
ExperimentKind parse_experiment_kind(const std::string& s);

/// Map fixture: `constant` (angle), `linear` (q1, q2, q3), `vortex` (vortices plus q1, q2),
/// `random` (seeded angles), `sine_sphere` (center).
struct FixtureSpec {
    std::string kind = "linear";
    int q1 = 0, q2 = 1, q3 = 0;
    double angle = 0.0;
    std::vector<Vortex> vortices;
    Point center{0.13, 0.29, 0.41};
};

/// Default fixture of the given kind.
inline FixtureSpec fixture_of(const std::string& kind) {
    FixtureSpec f;
    f.kind = kind;
    return f;
}

GridMap build_fixture(const FixtureSpec& f, const TorusGrid& g, std::uint64_t seed);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Energy;
    std::uint64_t seed = 1;
    int n = 2;
    int m = 32;
    Target target = Target::Circle;
    int k = 2;
    std::vector<double> ps{1.9};
    std::vector<double> eps{0.2, 0.1, 0.05};
    FixtureSpec fixture;                 ///< the map under study, or v for two-map experiments
    FixtureSpec start = fixture_of("constant"); ///< u for two-map experiments
    // solver settings
    int beads = 12;
    int iters = 2000;
    double noise = 1e-3;
    int samples_per_stage = 4;
    int refine = 5;
    bool sequence = false;
    double sequence_delta = 0.05;
    int width_m = 4;
    double width_delta = 0.3;
    double mass_cap = 4.0;
    int chains = 20;
    int max_coefficient = 2;
    double sigma0 = 0.02;
    std::vector<double> scales{0.05, 0.1, 0.2};
    double tolerance = 0.0;
    std::string canonical;  ///< canonical config text the hash is computed from
    std::string hash;
};

/// Reads and validates an experiment configuration. Sections: [experiment] kind, seed;
/// [grid] n, m; [target] name; [sweep] p, eps; [fixture] / [start] kind, q1, q2, q3,
/// angle, vortices ("x y d; x y d"), center; [solver] beads, iters, noise,
/// samples_per_stage, refine, sequence, sequence_delta, width_m, width_delta, mass_cap,
/// chains, max_coefficient, sigma0, scales.
ExperimentConfig parse_experiment_config(const Config& cfg);

struct Verdict {
    std::string name;
    std::string inequality;
    double lhs = 0.0;
    double rhs = 0.0;
    bool passed = true;
};

struct ExperimentOutcome {
    bool passed = true;
    std::vector<Verdict> verdicts;
    std::vector<std::string> files;
    std::string summary_json;
};

/// Runs one experiment, writing CSV files (every row prefixed by the config hash),
/// SVG plots and summary.json into `out_dir` (created if missing). Deterministic
/// given the configuration. On failure a summary with the error is written and the
/// exception is rethrown.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int threads);

/// Random 0-chain on the grid with coefficients in [-max_coef, max_coef], at least one
/// nonzero, and zero augmentation (rejection sampling).
Chain random_balanced_chain(const TorusGrid& g, int max_coef, std::uint64_t seed);

/// Runs fn(0..count-1) on up to `threads` worker threads.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

} // namespace tbar

#endif
