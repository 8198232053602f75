#include "iterreg/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>

#include <json.hpp>

#include "iterreg/io.hpp"
#include "iterreg/operator_utils.hpp"
#include "iterreg/radon.hpp"

namespace iterreg {

namespace {

using nlohmann::json;

constexpr std::uint64_t kNormSeed = 0x5eed;
constexpr int kNormIterations = 100;

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Workbench {
  Dataset dataset;
  std::shared_ptr<const RadonTransform> radon;
  std::shared_ptr<const AngleWindowOperator> window;  // non-null in limited-data mode
  const LinearOperator* op = nullptr;
  PriorSet priors;
  int target_index = -1;
  GridImage target;
  Sinogram y_exact;
  Sinogram y_delta;
  double delta = 0.0;
  double norm_estimate = 0.0;
};

void check_ingested(const GridImage& img, const std::string& what) {
  if (!img.values.allFinite() || (img.values.array() < 0.0).any()) {
    throw std::invalid_argument(what + ": ingested image has non-finite or negative pixels");
  }
}

Workbench setup(const ExperimentConfig& config) {
  Workbench wb;

  if (config.dataset.idx && config.dataset.phantom) {
    throw std::invalid_argument("ExperimentConfig: choose either idx or phantom dataset, not both");
  }
  if (config.dataset.idx) {
    const auto& idx = *config.dataset.idx;
    wb.dataset.train = read_idx_images(idx.train_images);
    wb.dataset.train_labels = read_idx_labels(idx.train_labels);
    wb.dataset.validation = read_idx_images(idx.validation_images);
    wb.dataset.validation_labels = read_idx_labels(idx.validation_labels);
    if (wb.dataset.train.size() != wb.dataset.train_labels.size() ||
        wb.dataset.validation.size() != wb.dataset.validation_labels.size()) {
      throw std::invalid_argument("IDX dataset: image/label counts differ");
    }
    if (idx.max_train > 0 && wb.dataset.train.size() > static_cast<std::size_t>(idx.max_train)) {
      wb.dataset.train.resize(idx.max_train);
      wb.dataset.train_labels.resize(idx.max_train);
    }
    if (idx.max_validation > 0 &&
        wb.dataset.validation.size() > static_cast<std::size_t>(idx.max_validation)) {
      wb.dataset.validation.resize(idx.max_validation);
      wb.dataset.validation_labels.resize(idx.max_validation);
    }
    wb.dataset.source = "idx(" + idx.train_images + ")";
  } else {
    const PhantomSpec spec = config.dataset.phantom.value_or(PhantomSpec{});
    wb.dataset = generate_phantoms(spec, config.dataset.phantom_seed);
  }
  if (wb.dataset.train.empty() || wb.dataset.validation.empty()) {
    throw std::invalid_argument("ExperimentConfig: dataset has an empty train or validation pool");
  }
  for (const auto& img : wb.dataset.train) check_ingested(img, "train");
  for (const auto& img : wb.dataset.validation) check_ingested(img, "validation");

  const int width = wb.dataset.train[0].width;
  const int height = wb.dataset.train[0].height;
  if ((config.geometry.width > 0 && config.geometry.width != width) ||
      (config.geometry.height > 0 && config.geometry.height != height)) {
    throw std::invalid_argument("ExperimentConfig: configured grid size " +
                                std::to_string(config.geometry.width) + "x" +
                                std::to_string(config.geometry.height) +
                                " does not match the dataset (" + std::to_string(width) + "x" +
                                std::to_string(height) + ")");
  }

  wb.radon = std::make_shared<RadonTransform>(
      width, height, equispaced_angles(config.geometry.num_angles),
      config.geometry.bins == 0 ? kAutoBins : config.geometry.bins);
  wb.op = wb.radon.get();
  if (config.geometry.angle_window_deg) {
    const double deg = std::acos(-1.0) / 180.0;
    wb.window = std::make_shared<AngleWindowOperator>(
        wb.radon, config.geometry.angle_window_deg->first * deg,
        config.geometry.angle_window_deg->second * deg);
    wb.op = wb.window.get();
  }

  // Prior set: optionally class-filtered and capped, sinograms through the
  // (possibly windowed) operator.
  std::vector<GridImage> prior_images;
  for (std::size_t i = 0; i < wb.dataset.train.size(); ++i) {
    if (config.dataset.prior_class && wb.dataset.train_labels[i] != *config.dataset.prior_class) {
      continue;
    }
    prior_images.push_back(wb.dataset.train[i]);
    if (config.dataset.max_priors > 0 &&
        prior_images.size() == static_cast<std::size_t>(config.dataset.max_priors)) {
      break;
    }
  }
  if (prior_images.empty()) {
    throw std::invalid_argument("ExperimentConfig: prior filter left no training images");
  }
  std::vector<Sinogram> prior_sinos;
  prior_sinos.reserve(prior_images.size());
  for (const auto& img : prior_images) prior_sinos.push_back(wb.op->apply(img));
  wb.priors = PriorSet(std::move(prior_images), std::move(prior_sinos));

  // Target selection.
  if (config.target.target_class >= 0) {
    int seen = 0;
    for (std::size_t i = 0; i < wb.dataset.validation.size(); ++i) {
      if (wb.dataset.validation_labels[i] == config.target.target_class) {
        if (seen == config.target.index) {
          wb.target_index = static_cast<int>(i);
          break;
        }
        ++seen;
      }
    }
    if (wb.target_index < 0) {
      throw std::invalid_argument("ExperimentConfig: no validation image of class " +
                                  std::to_string(config.target.target_class) + " at index " +
                                  std::to_string(config.target.index));
    }
  } else {
    if (config.target.index < 0 ||
        config.target.index >= static_cast<int>(wb.dataset.validation.size())) {
      throw std::invalid_argument("ExperimentConfig: target index out of range");
    }
    wb.target_index = config.target.index;
  }
  wb.target = wb.dataset.validation[wb.target_index];

  // One noisy sinogram shared by every scheme. In limited-data mode the mask
  // is applied before delta is measured so it reflects observed data only.
  wb.y_exact = wb.op->apply(wb.target);
  NoisyData noisy = add_noise(wb.y_exact, config.noise);
  if (wb.window) {
    wb.window->mask(noisy.sinogram);
    noisy.delta = (noisy.sinogram.values - wb.y_exact.values).norm();
  }
  wb.y_delta = std::move(noisy.sinogram);
  wb.delta = noisy.delta;

  wb.norm_estimate = estimate_operator_norm(*wb.op, kNormIterations, kNormSeed).value;
  return wb;
}

TheoryConstants make_constants(const ExperimentConfig& config, const SchemeEntry& entry,
                               const Workbench& wb, const GridImage& u0) {
  TheoryConstants constants;
  constants.kappa = config.theory.kappa;
  constants.eta = 0.0;  // linear forward operator
  if (config.theory.lambda_max) {
    constants.lambda_max = *config.theory.lambda_max;
  } else if (entry.lambda) {
    constants.lambda_max = entry.lambda->max_value();
  } else {
    constants.lambda_max = 0.01;
  }
  constants.L = config.theory.L ? *config.theory.L : 1.01 * wb.norm_estimate;
  if (config.theory.rho) {
    constants.rho = *config.theory.rho;
  } else {
    constants.rho = std::max(1.1 * (wb.target.values - u0.values).norm(), 1e-12);
  }
  constants.tau = entry.tau;
  return constants;
}

json lambda_to_json(const LambdaSequence& seq) {
  json j;
  j["kind"] = seq.kind == LambdaSequence::Kind::kConstant ? "CONSTANT" : "GEOMETRIC";
  j["lambda0"] = seq.lambda0;
  if (seq.kind == LambdaSequence::Kind::kGeometric) j["ratio"] = seq.ratio;
  return j;
}

LambdaSequence lambda_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "CONSTANT") return LambdaSequence::constant(j.at("lambda0").get<double>());
  if (kind == "GEOMETRIC") {
    return LambdaSequence::geometric(j.at("lambda0").get<double>(), j.at("ratio").get<double>());
  }
  throw std::invalid_argument("lambda sequence kind must be CONSTANT or GEOMETRIC, got " + kind);
}

json assumptions_to_json(const AssumptionReport& r) {
  json j;
  j["truth_in_ball_u0"] = r.truth_in_ball_u0;
  j["dist_u0"] = r.dist_u0;
  j["truth_near_mean"] = r.truth_near_mean;
  j["dist_mean"] = r.dist_mean;
  j["gm_defined"] = r.gm_defined;
  if (r.gm_defined) {
    j["truth_near_gm"] = r.truth_near_gm;
    j["dist_gm"] = r.dist_gm;
  }
  j["norm_bounded"] = r.norm_bounded;
  j["estimated_norm"] = r.estimated_norm;
  j["linear_eta_zero"] = r.linear_eta_zero;
  j["tangential_defect"] = r.tangential_defect;
  j["lambda_max_ok"] = r.lambda_max_ok;
  j["lambda_max"] = r.lambda_max_value;
  j["e_positive"] = r.e_positive;
  j["e_value"] = r.e_value;
  j["tau_admissible"] = r.tau_admissible;
  if (r.e_positive) j["tau_min"] = r.tau_min_value;
  return j;
}

}  // namespace

GridImage select_initial_guess(SchemeKind kind, const PriorSet& priors,
                               const std::vector<GridImage>& validation_pool,
                               const std::vector<int>& validation_labels, int target_index,
                               bool* used_fallback) {
  if (used_fallback) *used_fallback = false;
  if (validation_pool.empty()) {
    throw std::invalid_argument("select_initial_guess: empty validation pool");
  }
  switch (kind) {
    case SchemeKind::kGirli:
    case SchemeKind::kGirliAdapt:
      return priors.mean();
    case SchemeKind::kGirliGm:
      return priors.geometric_mean();
    case SchemeKind::kDdirli:
      return GridImage(validation_pool[0].width, validation_pool[0].height);
    case SchemeKind::kLandweber:
    case SchemeKind::kIrli:
    case SchemeKind::kIrliRevised: {
      if (target_index >= 0 && target_index < static_cast<int>(validation_pool.size()) &&
          validation_labels.size() == validation_pool.size()) {
        const int target_class = validation_labels[target_index];
        for (std::size_t j = 0; j < validation_pool.size(); ++j) {
          if (static_cast<int>(j) != target_index && validation_labels[j] == target_class) {
            return validation_pool[j];
          }
        }
      }
      if (used_fallback) *used_fallback = true;
      return priors.mean();
    }
  }
  throw std::logic_error("select_initial_guess: unknown scheme kind");
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  Workbench wb = setup(config);

  ExperimentResult result;
  result.target = wb.target;
  result.y_exact = wb.y_exact;
  result.y_delta = wb.y_delta;
  result.delta = wb.delta;
  result.operator_norm_estimate = wb.norm_estimate;
  result.config_json = config_to_json(config);

  // The handcrafted operator is shared by all DDIRLI entries; its build time
  // is charged to each DDIRLI record, matching how those run times are
  // reported.
  std::unique_ptr<HandcraftedOperator> a_op;
  double a_build_seconds = 0.0;
  double a_norm = 0.0;
  const bool any_ddirli =
      std::any_of(config.schemes.begin(), config.schemes.end(),
                  [](const SchemeEntry& e) { return e.kind == SchemeKind::kDdirli; });
  if (any_ddirli) {
    const auto t0 = std::chrono::steady_clock::now();
    a_op = std::make_unique<HandcraftedOperator>(build_handcrafted_operator(wb.priors));
    a_build_seconds = seconds_since(t0);
    a_norm = estimate_operator_norm(*a_op, 40, kNormSeed).value;
  }

  for (const SchemeEntry& entry : config.schemes) {
    try {
      bool used_fallback = false;
      GridImage u0;
      if (config.shared_initial_guess) {
        const std::string& mode = *config.shared_initial_guess;
        if (mode == "mean") {
          u0 = wb.priors.mean();
        } else if (mode == "gm") {
          u0 = wb.priors.geometric_mean();
        } else if (mode == "zero") {
          u0 = GridImage(wb.target.width, wb.target.height);
        } else if (mode == "similar") {
          u0 = select_initial_guess(SchemeKind::kLandweber, wb.priors, wb.dataset.validation,
                                    wb.dataset.validation_labels, wb.target_index, &used_fallback);
        } else {
          throw std::invalid_argument("shared_initial_guess must be mean|gm|zero|similar, got " +
                                      mode);
        }
      } else {
        u0 = select_initial_guess(entry.kind, wb.priors, wb.dataset.validation,
                                  wb.dataset.validation_labels, wb.target_index, &used_fallback);
      }

      SchemeConfig cfg;
      cfg.kind = entry.kind;
      cfg.omega = entry.omega
                      ? *entry.omega
                      : config.omega_auto_fraction /
                            std::max(wb.norm_estimate * wb.norm_estimate, 1e-300);
      cfg.lambda = entry.lambda;
      cfg.mu = entry.mu;
      cfg.adapt = entry.adapt;
      cfg.stop = StoppingRule{entry.tau, wb.delta};
      cfg.max_iterations = entry.max_iterations;
      cfg.prior_ref = "train";
      if (entry.kind == SchemeKind::kDdirli) {
        if (entry.ddirli_c) {
          cfg.ddirli_c = *entry.ddirli_c;
        } else {
          // beta_0 ||A||^2 = 1/2 at the starting residual keeps the
          // data-driven correction a contraction alongside the Landweber term.
          Sinogram r0 = wb.op->apply(u0);
          r0.values -= wb.y_delta.values;
          const double r0_sq = r0.values.squaredNorm();
          cfg.ddirli_c = 0.5 / std::max(a_norm * a_norm * r0_sq, 1e-300);
        }
      }

      const TheoryConstants constants = make_constants(config, entry, wb, u0);
      AssumptionReport report =
          check_assumptions(wb.priors, wb.target, u0, constants, *wb.op, kNormIterations,
                            kNormSeed);

      PriorSet scheme_priors = wb.priors;
      const auto t0 = std::chrono::steady_clock::now();
      SchemeRun run = run_scheme(cfg, *wb.op, wb.y_delta, u0, scheme_priors, &wb.target,
                                 entry.kind == SchemeKind::kDdirli ? a_op.get() : nullptr);
      const double run_seconds = seconds_since(t0);

      RunRecord rec;
      rec.method = entry.label();
      rec.sigma2 = config.noise.sigma2;
      rec.delta = wb.delta;
      rec.tau = entry.tau;
      rec.iterations = run.trace.stop_index;
      rec.wall_time_s = run_seconds + (entry.kind == SchemeKind::kDdirli ? a_build_seconds : 0.0);
      rec.rel_error_l2 = relative_error(wb.target, run.reconstruction);
      rec.stop_reason = to_string(run.trace.stop_reason);
      rec.assumptions = report;
      rec.omega = cfg.omega;
      rec.ddirli_c = entry.kind == SchemeKind::kDdirli ? cfg.ddirli_c : 0.0;
      rec.rho = constants.rho;
      rec.final_active_priors = scheme_priors.active_count();
      rec.used_fallback_guess = used_fallback;
      rec.omega_safety_warning = cfg.omega * wb.norm_estimate * wb.norm_estimate > 1.0;
      result.records.push_back(std::move(rec));

      SchemeArtifacts art;
      art.name = entry.label();
      art.trace = std::move(run.trace);
      art.reconstruction = std::move(run.reconstruction);
      art.initial_guess = std::move(u0);
      art.surviving_priors = scheme_priors.active_indices();
      result.artifacts.push_back(std::move(art));
    } catch (const std::exception& e) {
      result.errors.push_back(entry.label() + ": " + e.what());
    }
  }

  result.prior_mean_image = wb.priors.mean();
  try {
    result.prior_gm_image = wb.priors.geometric_mean();
  } catch (const std::exception&) {
    result.prior_gm_image.reset();
  }
  return result;
}

std::vector<std::pair<std::string, AssumptionReport>> check_experiment(
    const ExperimentConfig& config) {
  Workbench wb = setup(config);
  std::vector<std::pair<std::string, AssumptionReport>> reports;
  for (const SchemeEntry& entry : config.schemes) {
    GridImage u0 = select_initial_guess(entry.kind, wb.priors, wb.dataset.validation,
                                        wb.dataset.validation_labels, wb.target_index, nullptr);
    const TheoryConstants constants = make_constants(config, entry, wb, u0);
    reports.emplace_back(entry.label(), check_assumptions(wb.priors, wb.target, u0, constants,
                                                          *wb.op, kNormIterations, kNormSeed));
  }
  return reports;
}

// --- Config (de)serialization -------------------------------------------------

ExperimentConfig parse_config_json(const std::string& json_text) {
  json j = json::parse(json_text);
  ExperimentConfig config;

  if (j.contains("dataset")) {
    const json& d = j["dataset"];
    if (d.contains("phantom")) {
      PhantomSpec spec;
      const json& p = d["phantom"];
      spec.width = p.value("width", spec.width);
      spec.height = p.value("height", spec.height);
      spec.classes = p.value("classes", spec.classes);
      spec.train_per_class = p.value("train_per_class", spec.train_per_class);
      spec.validation_per_class = p.value("validation_per_class", spec.validation_per_class);
      spec.stroke_width = p.value("stroke_width", spec.stroke_width);
      spec.jitter_shift = p.value("jitter_shift", spec.jitter_shift);
      spec.jitter_rotate = p.value("jitter_rotate", spec.jitter_rotate);
      spec.jitter_scale = p.value("jitter_scale", spec.jitter_scale);
      config.dataset.phantom = spec;
    }
    if (d.contains("idx")) {
      IdxPathsConfig idx;
      const json& x = d["idx"];
      idx.train_images = x.at("train_images").get<std::string>();
      idx.train_labels = x.at("train_labels").get<std::string>();
      idx.validation_images = x.at("validation_images").get<std::string>();
      idx.validation_labels = x.at("validation_labels").get<std::string>();
      idx.max_train = x.value("max_train", idx.max_train);
      idx.max_validation = x.value("max_validation", idx.max_validation);
      config.dataset.idx = idx;
    }
    config.dataset.phantom_seed = d.value("phantom_seed", config.dataset.phantom_seed);
    if (d.contains("prior_class") && !d["prior_class"].is_null()) {
      config.dataset.prior_class = d["prior_class"].get<int>();
    }
    config.dataset.max_priors = d.value("max_priors", config.dataset.max_priors);
  }

  if (j.contains("geometry")) {
    const json& g = j["geometry"];
    config.geometry.width = g.value("width", config.geometry.width);
    config.geometry.height = g.value("height", config.geometry.height);
    config.geometry.num_angles = g.value("num_angles", config.geometry.num_angles);
    config.geometry.bins = g.value("bins", config.geometry.bins);
    if (g.contains("angle_window_deg") && !g["angle_window_deg"].is_null()) {
      const json& w = g["angle_window_deg"];
      config.geometry.angle_window_deg = std::make_pair(w.at(0).get<double>(),
                                                        w.at(1).get<double>());
      if (!(config.geometry.angle_window_deg->first < config.geometry.angle_window_deg->second) ||
          config.geometry.angle_window_deg->first < 0.0 ||
          config.geometry.angle_window_deg->second > 180.0) {
        throw std::invalid_argument("geometry.angle_window_deg must satisfy 0 <= lo < hi <= 180");
      }
    }
  }

  if (j.contains("noise")) {
    config.noise.sigma2 = j["noise"].value("sigma2", 0.0);
    config.noise.seed = j["noise"].value("seed", std::uint64_t{0});
  }

  if (j.contains("target")) {
    config.target.target_class = j["target"].value("class", config.target.target_class);
    config.target.index = j["target"].value("index", config.target.index);
  }

  if (j.contains("schemes")) {
    for (const json& s : j["schemes"]) {
      SchemeEntry entry;
      entry.kind = scheme_kind_from_string(s.at("kind").get<std::string>());
      entry.name = s.value("name", std::string{});
      if (s.contains("omega") && s["omega"].is_number()) entry.omega = s["omega"].get<double>();
      if (s.contains("lambda") && !s["lambda"].is_null()) {
        entry.lambda = lambda_from_json(s["lambda"]);
      }
      entry.mu = s.value("mu", entry.mu);
      if (s.contains("ddirli_c") && s["ddirli_c"].is_number()) {
        entry.ddirli_c = s["ddirli_c"].get<double>();
      }
      if (s.contains("adapt") && !s["adapt"].is_null()) {
        AdaptConfig adapt;
        adapt.k0 = s["adapt"].value("k0", adapt.k0);
        adapt.tol = s["adapt"].at("tol").get<double>();
        entry.adapt = adapt;
      }
      entry.tau = s.value("tau", entry.tau);
      entry.max_iterations = s.value("max_iterations", entry.max_iterations);
      config.schemes.push_back(std::move(entry));
    }
  }

  if (j.contains("theory")) {
    const json& t = j["theory"];
    config.theory.kappa = t.value("kappa", config.theory.kappa);
    if (t.contains("lambda_max") && t["lambda_max"].is_number()) {
      config.theory.lambda_max = t["lambda_max"].get<double>();
    }
    if (t.contains("rho") && t["rho"].is_number()) config.theory.rho = t["rho"].get<double>();
    if (t.contains("L") && t["L"].is_number()) config.theory.L = t["L"].get<double>();
  }

  config.output_dir = j.value("output_dir", config.output_dir);
  if (j.contains("shared_initial_guess") && !j["shared_initial_guess"].is_null()) {
    config.shared_initial_guess = j["shared_initial_guess"].get<std::string>();
  }
  config.omega_auto_fraction = j.value("omega_auto_fraction", config.omega_auto_fraction);

  if (config.dataset.idx) {
    for (const std::string& path :
         {config.dataset.idx->train_images, config.dataset.idx->train_labels,
          config.dataset.idx->validation_images, config.dataset.idx->validation_labels}) {
      if (!std::filesystem::exists(path)) {
        throw std::invalid_argument("ExperimentConfig: referenced file does not exist: " + path);
      }
    }
  }
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config_file: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_json(text);
}

std::string config_to_json(const ExperimentConfig& config) {
  json j;
  json d;
  if (config.dataset.phantom) {
    const PhantomSpec& p = *config.dataset.phantom;
    d["phantom"] = {{"width", p.width},
                    {"height", p.height},
                    {"classes", p.classes},
                    {"train_per_class", p.train_per_class},
                    {"validation_per_class", p.validation_per_class},
                    {"stroke_width", p.stroke_width},
                    {"jitter_shift", p.jitter_shift},
                    {"jitter_rotate", p.jitter_rotate},
                    {"jitter_scale", p.jitter_scale}};
  }
  if (config.dataset.idx) {
    const IdxPathsConfig& x = *config.dataset.idx;
    d["idx"] = {{"train_images", x.train_images},
                {"train_labels", x.train_labels},
                {"validation_images", x.validation_images},
                {"validation_labels", x.validation_labels},
                {"max_train", x.max_train},
                {"max_validation", x.max_validation}};
  }
  d["phantom_seed"] = config.dataset.phantom_seed;
  if (config.dataset.prior_class) d["prior_class"] = *config.dataset.prior_class;
  d["max_priors"] = config.dataset.max_priors;
  j["dataset"] = d;

  json g;
  g["width"] = config.geometry.width;
  g["height"] = config.geometry.height;
  g["num_angles"] = config.geometry.num_angles;
  g["bins"] = config.geometry.bins;
  if (config.geometry.angle_window_deg) {
    g["angle_window_deg"] = {config.geometry.angle_window_deg->first,
                             config.geometry.angle_window_deg->second};
  }
  j["geometry"] = g;

  j["noise"] = {{"sigma2", config.noise.sigma2}, {"seed", config.noise.seed}};
  j["target"] = {{"class", config.target.target_class}, {"index", config.target.index}};

  json schemes = json::array();
  for (const SchemeEntry& e : config.schemes) {
    json s;
    s["kind"] = to_string(e.kind);
    if (!e.name.empty()) s["name"] = e.name;
    if (e.omega) s["omega"] = *e.omega;
    if (e.lambda) s["lambda"] = lambda_to_json(*e.lambda);
    if (e.kind == SchemeKind::kIrliRevised) s["mu"] = e.mu;
    if (e.ddirli_c) s["ddirli_c"] = *e.ddirli_c;
    if (e.adapt) s["adapt"] = {{"k0", e.adapt->k0}, {"tol", e.adapt->tol}};
    s["tau"] = e.tau;
    s["max_iterations"] = e.max_iterations;
    schemes.push_back(s);
  }
  j["schemes"] = schemes;

  json t;
  t["kappa"] = config.theory.kappa;
  if (config.theory.lambda_max) t["lambda_max"] = *config.theory.lambda_max;
  if (config.theory.rho) t["rho"] = *config.theory.rho;
  if (config.theory.L) t["L"] = *config.theory.L;
  j["theory"] = t;

  j["output_dir"] = config.output_dir;
  if (config.shared_initial_guess) j["shared_initial_guess"] = *config.shared_initial_guess;
  j["omega_auto_fraction"] = config.omega_auto_fraction;
  return j.dump(2);
}

// --- Output files --------------------------------------------------------------

void emit_outputs(const ExperimentResult& result, const std::string& outdir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw std::runtime_error("emit_outputs: cannot create " + outdir + ": " + ec.message());

  auto open_out = [](const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_outputs: cannot open " + path);
    return out;
  };

  {
    std::ofstream out = open_out(outdir + "/results.csv");
    out << kResultsCsvHeader << "\n";
    for (const RunRecord& r : result.records) {
      char wall[32];
      std::snprintf(wall, sizeof wall, "%.6f", r.wall_time_s);
      out << r.method << ',' << format_double(r.sigma2) << ',' << format_double(r.delta) << ','
          << format_double(r.tau) << ',' << r.iterations << ',' << wall << ','
          << format_double(r.rel_error_l2) << ',' << r.stop_reason << "\n";
    }
    if (!out) throw std::runtime_error("emit_outputs: write failed for results.csv");
  }

  for (const SchemeArtifacts& art : result.artifacts) {
    std::ofstream out = open_out(outdir + "/trace_" + art.name + ".csv");
    out << "k,residual,error,active_priors\n";
    for (const IterationRecord& rec : art.trace.records) {
      out << rec.k << ',' << format_double(rec.residual_norm) << ','
          << (std::isnan(rec.error_norm) ? std::string{} : format_double(rec.error_norm)) << ','
          << rec.active_prior_count << "\n";
    }
    if (!out) throw std::runtime_error("emit_outputs: write failed for trace_" + art.name);
    write_pgm(outdir + "/recon_" + art.name + ".pgm", art.reconstruction);
    write_pgm(outdir + "/initial_" + art.name + ".pgm", art.initial_guess);
  }

  write_pgm(outdir + "/target.pgm", result.target);
  write_pgm(outdir + "/prior_mean.pgm", result.prior_mean_image);
  if (result.prior_gm_image) write_pgm(outdir + "/prior_gm.pgm", *result.prior_gm_image);

  json meta;
  meta["config"] = json::parse(result.config_json);
  meta["delta"] = result.delta;
  meta["operator_norm_estimate"] = result.operator_norm_estimate;
  json records = json::array();
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const RunRecord& r = result.records[i];
    json rec;
    rec["method"] = r.method;
    rec["sigma2"] = r.sigma2;
    rec["delta"] = r.delta;
    rec["tau"] = r.tau;
    rec["iterations"] = r.iterations;
    rec["wall_time_s"] = r.wall_time_s;
    rec["rel_error_l2"] = r.rel_error_l2;
    rec["stop_reason"] = r.stop_reason;
    rec["omega"] = r.omega;
    if (r.ddirli_c != 0.0) rec["ddirli_c"] = r.ddirli_c;
    rec["rho"] = r.rho;
    rec["final_active_priors"] = r.final_active_priors;
    rec["used_fallback_guess"] = r.used_fallback_guess;
    rec["omega_safety_warning"] = r.omega_safety_warning;
    rec["assumptions"] = assumptions_to_json(r.assumptions);
    if (i < result.artifacts.size()) {
      rec["surviving_priors"] = result.artifacts[i].surviving_priors;
    }
    records.push_back(rec);
  }
  meta["records"] = records;
  meta["errors"] = result.errors;
  {
    std::ofstream out = open_out(outdir + "/run.json");
    out << meta.dump(2) << "\n";
  }
}

}  // namespace iterreg
