#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wmhd/decay.hpp"
#include "wmhd/solver.hpp"

namespace wmhd {

// One smooth initial-data mode: amp * dir * cos(n.x + phase) added to a field
// (coefficient amp/2 * e^{i phase} * dir at +n, conjugate at -n).
struct ModeSeed {
  std::array<int, 3> n{0, 0, 0};
  std::array<double, 3> dir{0.0, 0.0, 0.0};
  double amp = 0.0;
  double phase = 0.0;
};

// Experiment parameters; parsed from a key=value config file (one pair per
// line, '#' comments) with command-line overrides on top. The full key schema
// is documented in the README.
struct RunConfig {
  std::string experiment = "selfcheck";

  int n = 8;
  double nu = 1.0;
  double sigma = 1.0;
  double dt = 5e-3;
  double t_final = 0.5;
  double delta = 0.5;              // roughness offset of the seeded profile
  double profile_c1 = 1.0, profile_c2 = 1.0;
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  std::vector<ModeSeed> v0_modes, b0_modes, e0_modes;
  double e0_profile_s = -1.0;      // >= 0: seed an E0 component from rho_s; < 0: off
  int e0_profile_component = 0;

  int picard_grid = 16;
  int picard_iters = 40;  // iteration stops early once the distance is below tol
  double picard_tol = 1e-10;

  std::vector<double> xnorm_s = {0.0, 1.0};
  int snapshot_stride = 0;         // 0: final state only; k > 0: every k steps too
  bool plots = false;
  bool nonlinear = true;

  int loss_m_lo = 4;
  int loss_m_hi = 0;               // 0: use n (the cutoff)
  double loss_control_s = 8.0;     // steep profile for the smooth control run

  std::vector<double> lemma_s = {0.5, 1.0, 2.0};
  int lemma_nmax_lo = 10;
  int lemma_nmax_hi = 15;

  static RunConfig load(const std::filesystem::path& path);
  // Applies one "key=value" pair; throws std::invalid_argument on unknown
  // keys or malformed values.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  SolverConfig solver_config() const;
};

// Initial data assembled per the config recipe: mode seeds, optional profile
// component for E0, v and B projected divergence-free, B mean zeroed,
// E Helmholtz-split.
StateVector build_initial_state(const RunConfig& cfg);

// One named check inside an experiment summary.
struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct ExperimentReport {
  std::string experiment;
  bool pass = false;
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;  // files written, relative to out_dir
};

// Each experiment writes its CSVs, snapshot files, a summary.json with the
// check booleans, and optional SVG plots into cfg.out_dir, then returns the
// same summary. Identical config + seed give byte-identical CSV/JSON output.
ExperimentReport run_local_existence(const RunConfig& cfg);
ExperimentReport run_picard_contraction(const RunConfig& cfg);
ExperimentReport run_loss_of_smoothness(const RunConfig& cfg);
ExperimentReport run_lemma_check(const RunConfig& cfg);
ExperimentReport run_selfcheck(const RunConfig& cfg);

// Dispatch on cfg.experiment.
ExperimentReport run_experiment(const RunConfig& cfg);

}  // namespace wmhd
