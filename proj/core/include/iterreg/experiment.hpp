#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iterreg/data.hpp"
#include "iterreg/grid_image.hpp"
#include "iterreg/priors.hpp"
#include "iterreg/schemes.hpp"
#include "iterreg/sinogram.hpp"
#include "iterreg/theory.hpp"

namespace iterreg {

struct IdxPathsConfig {
  std::string train_images;
  std::string train_labels;
  std::string validation_images;
  std::string validation_labels;
  int max_train = 150;
  int max_validation = 40;
};

struct DatasetConfig {
  std::optional<PhantomSpec> phantom;
  std::uint64_t phantom_seed = 1;
  std::optional<IdxPathsConfig> idx;
  /// When set, only training images of this class feed the prior set.
  std::optional<int> prior_class;
  /// Cap on the prior count after filtering (0 = no cap).
  int max_priors = 0;
};

struct GeometryConfig {
  /// Expected grid size; 0 derives it from the dataset, nonzero values are
  /// validated against it.
  int width = 0;
  int height = 0;
  int num_angles = 180;
  int bins = 0;  // 0 selects ceil(sqrt(2) * max(w, h))
  /// Limited-data window [lo, hi) in degrees; angles outside are zeroed.
  std::optional<std::pair<double, double>> angle_window_deg;
};

struct TargetConfig {
  int target_class = 3;  // -1 addresses the whole validation pool by index
  int index = 0;
};

struct SchemeEntry {
  std::string name;  // CSV label, defaults to the scheme acronym
  SchemeKind kind = SchemeKind::kLandweber;
  std::optional<double> omega;     // unset = 0.9 / ||R||_est^2
  std::optional<LambdaSequence> lambda;
  double mu = 0.001;
  std::optional<double> ddirli_c;  // unset = calibrated from ||A|| and the start residual
  std::optional<AdaptConfig> adapt;
  double tau = 1.1;
  int max_iterations = 1000;

  std::string label() const { return name.empty() ? to_string(kind) : name; }
};

struct TheoryConfig {
  double kappa = 0.5;
  std::optional<double> lambda_max;  // default: the scheme's own maximum
  std::optional<double> rho;         // default: 1.1 * ||truth - u0||
  std::optional<double> L;           // default: 1.01 * estimated ||R||
};

struct ExperimentConfig {
  DatasetConfig dataset;
  GeometryConfig geometry;
  NoiseSpec noise;
  TargetConfig target;
  std::vector<SchemeEntry> schemes;
  TheoryConfig theory;
  std::string output_dir = "out";
  /// Test-6 mode: one guess for every scheme ("mean", "gm", "zero", "similar").
  std::optional<std::string> shared_initial_guess;
  /// Auto step size is omega = omega_auto_fraction / ||R||_est^2 for schemes
  /// without an explicit omega. The classical safety bound needs a value
  /// <= 1; the presets use a small fraction so the damping terms matter.
  double omega_auto_fraction = 0.9;
};

ExperimentConfig parse_config_json(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

/// One row of results.csv plus diagnostic fields for run.json.
struct RunRecord {
  std::string method;
  double sigma2 = 0.0;
  double delta = 0.0;
  double tau = 0.0;
  int iterations = 0;
  double wall_time_s = 0.0;
  double rel_error_l2 = 0.0;
  std::string stop_reason;
  AssumptionReport assumptions;
  // Diagnostics (run.json only, not results.csv columns).
  double omega = 0.0;
  double ddirli_c = 0.0;
  double rho = 0.0;
  int final_active_priors = 0;
  bool used_fallback_guess = false;
  bool omega_safety_warning = false;
};

struct SchemeArtifacts {
  std::string name;
  IterationTrace trace;
  GridImage reconstruction;
  GridImage initial_guess;
  std::vector<int> surviving_priors;
};

struct ExperimentResult {
  std::vector<RunRecord> records;
  std::vector<SchemeArtifacts> artifacts;
  /// Schemes that failed, as "name: error"; the others still complete.
  std::vector<std::string> errors;
  GridImage target;
  Sinogram y_exact;
  Sinogram y_delta;
  double delta = 0.0;
  double operator_norm_estimate = 0.0;
  GridImage prior_mean_image;
  std::optional<GridImage> prior_gm_image;
  std::string config_json;
};

/// Wires data -> operator -> priors -> schemes -> metrics. Noise is applied
/// once and shared by every scheme. Limited-data windows zero the masked
/// sinogram rows before the noise norm is measured.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Assumption reports only; nothing is iterated.
std::vector<std::pair<std::string, AssumptionReport>> check_experiment(
    const ExperimentConfig& config);

/// Initial-guess policy: LANDWEBER/IRLI take a same-class validation image
/// distinct from the target (falling back to the prior mean), DDIRLI starts
/// from zero, GIRLI from the prior mean, GIRLI-GM from the geometric mean.
GridImage select_initial_guess(SchemeKind kind, const PriorSet& priors,
                               const std::vector<GridImage>& validation_pool,
                               const std::vector<int>& validation_labels, int target_index,
                               bool* used_fallback = nullptr);

inline constexpr const char* kResultsCsvHeader =
    "method,sigma2,delta,tau,iterations,wall_time_s,rel_error_l2,stop_reason";

/// Writes results.csv, per-scheme trace_<method>.csv, PGM images, and
/// run.json metadata under outdir.
void emit_outputs(const ExperimentResult& result, const std::string& outdir);

/// Paper-shaped demo presets 1..7 at desk scale (phantom data).
ExperimentConfig demo_preset(int test_number, std::uint64_t seed);

}  // namespace iterreg
