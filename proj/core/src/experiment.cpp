// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include "sparsearch/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "sparsearch/error.hpp"
#include "sparsearch/loss.hpp"
#include "sparsearch/metrics.hpp"
#include "sparsearch/optimizer.hpp"
#include "sparsearch/policy.hpp"
#include "sparsearch/trajectory.hpp"

namespace sparsearch {

namespace {

using json = nlohmann::json;

constexpr const char* kSummaryFile = "summary.json";
constexpr const char* kMetricsFile = "metrics.jsonl";
constexpr const char* kTrajectoryFile = "trajectory.sptj";

// Epoch-wise shuffled minibatches drawn without replacement.
class BatchSampler {
public:
  BatchSampler(std::size_t samples, std::size_t batch, std::uint64_t seed)
      : order_(samples), batch_(std::min(batch, samples)), rng_(seed) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    rng_.shuffle(order_.begin(), order_.end());
  }

  void next(const Tensor& x, const Tensor& y, Tensor& bx, Tensor& by) {
    if (bx.rows() != batch_ || bx.cols() != x.cols()) bx = Tensor(batch_, x.cols());
    if (by.rows() != batch_ || by.cols() != y.cols()) by = Tensor(batch_, y.cols());
    for (std::size_t b = 0; b < batch_; ++b) {
      if (cursor_ == order_.size()) {
        rng_.shuffle(order_.begin(), order_.end());
        cursor_ = 0;
      }
      const std::size_t src = order_[cursor_++];
      std::copy(x.row(src).begin(), x.row(src).end(), bx.row(b).begin());
      std::copy(y.row(src).begin(), y.row(src).end(), by.row(b).begin());
    }
  }

private:
  std::vector<std::size_t> order_;
  std::size_t batch_;
  std::size_t cursor_ = 0;
  Rng rng_;
};

struct StepResult {
  double loss = 0.0;
  double accuracy = 0.0;
  bool rewired = false;
};

// Mutable training state. Copyable; lottery checkpoints are plain copies.
class Trainer {
public:
  Trainer(const Dataset& data, Mlp<float> model, const SparsityPolicy& policy, const LrSchedule& schedule,
          double momentum, std::size_t total_steps, std::size_t batch_size, std::uint64_t seed)
      : data_(&data),
        policy_(policy),
        total_(total_steps),
        model_(std::move(model)),
        opt_(schedule, momentum),
        sampler_(data.train_x.rows(), batch_size, derive_seed(seed, SeedStream::batches)),
        policy_rng_(derive_seed(seed, SeedStream::policy)) {
    for (const auto& layer : model_.layers()) {
      weight_slot_.push_back(opt_.add_slot(layer.weights.shape()));
      bias_slot_.push_back(opt_.add_slot(layer.bias.shape()));
      last_grads_.emplace_back(layer.weights.shape());
    }
  }

  Mlp<float>& model() { return model_; }
  const Mlp<float>& model() const { return model_; }
  void set_policy(const SparsityPolicy& policy) { policy_ = policy; }

  bool sparse_to_sparse() const {
    return policy_.method == Method::set || policy_.method == Method::rigl || policy_.method == Method::lottery;
  }

  // Zeroes non-participating weights and their momentum.
  void enforce_masks() {
    auto& layers = model_.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      auto& layer = layers[l];
      auto& v = opt_.velocity(weight_slot_[l]);
      for (std::size_t k = 0; k < layer.weights.size(); ++k) {
        if (!layer.mask[k]) {
          layer.weights[k] = 0.0f;
          v[k] = 0.0f;
        }
      }
    }
  }

  StepResult step(std::size_t i, std::size_t first_step) {
    StepResult result;
    auto& layers = model_.layers();

    switch (policy_.method) {
      case Method::search:
        if (should_rewire(i, policy_)) {
          for (auto& layer : layers) {
            if (layer.sparsify) layer.mask = structured_mask(layer.weights, policy_.d, policy_.structure);
          }
          result.rewired = true;
        }
        break;
      case Method::set:
      case Method::rigl:
        if (i == first_step) {
          for (auto& layer : layers) {
            if (layer.sparsify) layer.mask = topd_mask(layer.weights, policy_.d);
          }
          enforce_masks();
          result.rewired = true;
        } else if (should_rewire(i, policy_)) {
          const double f = rewire_fraction(i, total_, policy_.rewire_f0);
          for (std::size_t l = 0; l < layers.size(); ++l) {
            auto& layer = layers[l];
            if (!layer.sparsify) continue;
            layer.mask = policy_.method == Method::set ? set_rewire(layer.weights, layer.mask, f, policy_rng_)
                                                       : rigl_rewire(layer.weights, layer.mask, last_grads_[l], f);
          }
          enforce_masks();
          result.rewired = true;
        }
        break;
      case Method::dense:
      case Method::reduce:
      case Method::lottery:
        break;
    }

    sampler_.next(data_->train_x, data_->train_y, batch_x_, batch_y_);
    const Tensor out = model_.forward(batch_x_);
    const auto loss = compute_loss(data_->loss, out, batch_y_);
    if (!std::isfinite(loss.value)) {
      throw NumericError("loss became non-finite at step " + std::to_string(i));
    }
    result.loss = loss.value;
    result.accuracy = data_->classification ? accuracy(out, batch_y_) : 0.0;
    MlpGrads<float> grads = model_.backward(loss.grad);

    const bool fix_momentum = policy_.method == Method::search && policy_.fix_zero_momentum &&
                              policy_.exploitation.kind == ExploitKind::fix && i + 1 >= policy_.exploitation.v;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      auto& layer = layers[l];
      Tensor& g = grads.weights[l];
      if (sparse_to_sparse()) {
        last_grads_[l] = g;
        g = scale_nonparticipating_grads(g, layer.mask, 0.0);
      } else if (policy_.method == Method::search && layer.sparsify) {
        g = scale_nonparticipating_grads(g, layer.mask, policy_.s);
      }
      opt_.step(weight_slot_[l], layer.weights, g, i);
      opt_.step(bias_slot_[l], layer.bias, grads.biases[l], i);
      if (policy_.method == Method::search && layer.sparsify) {
        layer.weights = apply_exploitation(layer.weights, layer.mask, i + 1, policy_);
        if (fix_momentum) {
          auto& v = opt_.velocity(weight_slot_[l]);
          for (std::size_t k = 0; k < v.size(); ++k) {
            if (!layer.mask[k]) v[k] = 0.0f;
          }
        }
      }
    }
    if (sparse_to_sparse()) enforce_masks();
    return result;
  }

private:
  const Dataset* data_;
  SparsityPolicy policy_;
  std::size_t total_;
  Mlp<float> model_;
  SgdMomentum<float> opt_;
  std::vector<std::size_t> weight_slot_;
  std::vector<std::size_t> bias_slot_;
  BatchSampler sampler_;
  Rng policy_rng_;
  std::vector<Tensor> last_grads_;
  Tensor batch_x_;
  Tensor batch_y_;
};

std::vector<std::size_t> sparsified_layers(const Mlp<float>& model) {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < model.layers().size(); ++l) {
    if (model.layers()[l].sparsify) out.push_back(l);
  }
  return out;
}

std::vector<Tensor> weights_of(const Mlp<float>& model, const std::vector<std::size_t>& which) {
  std::vector<Tensor> out;
  out.reserve(which.size());
  for (std::size_t l : which) out.push_back(model.layers()[l].weights);
  return out;
}

std::vector<double> densities(const Mlp<float>& model) {
  std::vector<double> out;
  for (const auto& layer : model.layers()) out.push_back(density(layer.mask));
  return out;
}

void evaluate(const Mlp<float>& model, const Dataset& data, const Tensor& x, const Tensor& y, double& loss,
              double& acc) {
  const Tensor out = model.predict(x);
  loss = compute_loss(data.loss, out, y).value;
  acc = data.classification ? accuracy(out, y) : 0.0;
}

std::string echo_config(const RunConfig& config) {
  RunConfig echo = config;
  echo.output_dir.clear();
  return config_to_json(echo, -1);
}

// Marks layers a structure cannot tile as dense, or reports them.
void exempt_untileable(Mlp<float>& model, const SparsityPolicy& policy, bool exempt) {
  if (policy.structure.kind == StructureKind::unstructured) return;
  if (policy.method != Method::search && policy.method != Method::lottery) return;
  auto& layers = model.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& layer = layers[l];
    if (!layer.sparsify) continue;
    try {
      (void)structured_mask(layer.weights, policy.d, policy.structure);
    } catch (const StructureError& e) {
      if (!exempt) {
        throw StructureError("layer " + std::to_string(l) + " (" + to_string(layer.weights.shape()) + "): " + e.what());
      }
      layer.sparsify = false;
    }
  }
}

// Trains a dense copy to completion, then rewinds to epsilon with the mask
// taken from the final weights. Returns the trainer positioned at epsilon.
Trainer prepare_lottery(const Trainer& start, const SparsityPolicy& policy, std::size_t total) {
  SparsityPolicy dense = policy;
  dense.method = Method::dense;
  Trainer reference = start;
  reference.set_policy(dense);

  const auto tracked = sparsified_layers(reference.model());
  std::vector<Shape> shapes;
  for (std::size_t l : tracked) shapes.push_back(reference.model().layers()[l].weights.shape());
  TrajectoryLog log = TrajectoryLog::full(shapes);

  std::optional<Trainer> checkpoint;
  for (std::size_t i = 0; i < total; ++i) {
    if (i == policy.lottery_epsilon) {
      log.record(i, weights_of(reference.model(), tracked));
      checkpoint.emplace(reference);
    }
    reference.step(i, 0);
  }
  if (!checkpoint) throw ConfigError("policy.lottery_epsilon must be smaller than the number of steps");

  const auto trained = weights_of(reference.model(), tracked);
  std::vector<Mask> masks;
  if (policy.structure.kind == StructureKind::unstructured) {
    masks = lottery_mask(trained, policy.d);
  } else {
    for (const auto& w : trained) masks.push_back(structured_mask(w, policy.d, policy.structure));
  }
  auto rewound = lottery_rewind(log, policy.lottery_epsilon);

  Trainer trainer = std::move(*checkpoint);
  trainer.set_policy(policy);
  for (std::size_t t = 0; t < tracked.size(); ++t) {
    auto& layer = trainer.model().layers()[tracked[t]];
    layer.weights = std::move(rewound[t]);
    layer.mask = std::move(masks[t]);
  }
  trainer.enforce_masks();
  return trainer;
}

json probe_json(const Probe& p) {
  return {{"step", p.step}, {"max_abs_nonparticipating", p.max_abs_nonparticipating}, {"density", p.density}};
}

}  // namespace

RunSummary run_experiment(const RunConfig& config, const StepObserver& observer) {
  const auto started = std::chrono::steady_clock::now();
  config.validate();
  const SparsityPolicy policy = config.resolved_policy();
  const LrSchedule schedule = config.resolved_schedule();
  const std::size_t total = config.executed_steps();

  const Dataset data =
      make_dataset(config.task, config.task.seed.value_or(derive_seed(config.seed, SeedStream::data)));

  std::vector<std::size_t> hidden = config.hidden_widths;
  if (policy.method == Method::reduce) hidden = reduce_arch(data.in_dim, hidden, data.out_dim, policy.d);

  Mlp<float> model(data.in_dim, hidden, data.out_dim, config.min_sparse_in_dim);
  if (!config.sparsify_output) model.layers().back().sparsify = false;
  if (policy.method == Method::dense || policy.method == Method::reduce) {
    for (auto& layer : model.layers()) layer.sparsify = false;
  }
  {
    Rng init_rng(derive_seed(config.seed, SeedStream::init));
    model.initialize(init_rng);
  }
  exempt_untileable(model, policy, config.exempt_incompatible);

  Trainer trainer(data, std::move(model), policy, schedule, config.momentum, total, config.task.batch_size,
                  config.seed);
  std::size_t first_step = 0;
  if (policy.method == Method::lottery) {
    trainer = prepare_lottery(trainer, policy, total);
    first_step = policy.lottery_epsilon;
  }

  const std::filesystem::path out_dir = config.output_dir;
  const bool writing = !config.output_dir.empty();
  if (writing) std::filesystem::create_directories(out_dir);

  std::ofstream metrics_out;
  const bool write_metrics = writing && config.metrics_every > 0;
  if (write_metrics) {
    metrics_out.open(out_dir / kMetricsFile, std::ios::binary | std::ios::trunc);
    if (!metrics_out) throw IoError("cannot open " + (out_dir / kMetricsFile).string());
  }

  // Trajectory of the sparsified layers, or of all layers when none are.
  std::vector<std::size_t> tracked = sparsified_layers(trainer.model());
  if (tracked.empty()) {
    tracked.resize(trainer.model().layers().size());
    std::iota(tracked.begin(), tracked.end(), std::size_t{0});
  }
  const bool tracking = writing && config.snapshot_stride > 0;
  TrajectoryLog log;
  if (tracking) {
    std::vector<Shape> shapes;
    for (std::size_t l : tracked) shapes.push_back(trainer.model().layers()[l].weights.shape());
    log = TrajectoryLog::subsampled(shapes, config.snapshot_stride, config.tracked_per_layer,
                                    derive_seed(config.seed, SeedStream::tracking));
    log.record(first_step, weights_of(trainer.model(), tracked));
  }

  std::vector<Probe> probes;
  for (std::size_t i = first_step; i < total; ++i) {
    const StepResult r = trainer.step(i, first_step);
    const std::size_t post = i + 1;
    const auto& m = trainer.model();

    if (write_metrics && post % config.metrics_every == 0) {
      emit_metrics(metrics_out, {post, r.loss, r.accuracy, lr_at(schedule, i), densities(m), r.rewired});
    }
    if (std::find(config.probe_steps.begin(), config.probe_steps.end(), post) != config.probe_steps.end()) {
      Probe p;
      p.step = post;
      for (const auto& layer : m.layers()) {
        p.max_abs_nonparticipating.push_back(max_abs_nonparticipating(layer.weights, layer.mask));
        p.density.push_back(density(layer.mask));
      }
      probes.push_back(std::move(p));
    }
    if (tracking && (post % config.snapshot_stride == 0 || post == total) && post > log.last_step()) {
      log.record(post, weights_of(m, tracked));
    }
    if (observer) observer(StepView{post, r.loss, r.rewired, m});
  }

  RunSummary summary;
  summary.method = std::string(to_string(policy.method));
  summary.task = data.descriptor;
  summary.seed = config.seed;
  summary.steps = total;
  summary.classification = data.classification;
  evaluate(trainer.model(), data, data.train_x, data.train_y, summary.train_loss, summary.train_accuracy);
  evaluate(trainer.model(), data, data.val_x, data.val_y, summary.val_loss, summary.val_accuracy);
  summary.hidden_widths = hidden;
  for (const auto& layer : trainer.model().layers()) {
    summary.layers.push_back({layer.weights.rows(), layer.weights.cols(), layer.sparsify, density(layer.mask)});
  }
  summary.probes = std::move(probes);
  summary.policy_json = echo_config(config);

  if (writing) {
    metrics_out.close();
    if (write_metrics) summary.metrics_file = kMetricsFile;
    if (tracking) {
      log.save(out_dir / kTrajectoryFile);
      summary.trajectory_file = kTrajectoryFile;
    }
  }
  summary.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (writing) {
    std::ofstream out(out_dir / kSummaryFile, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + (out_dir / kSummaryFile).string());
    out << summary_to_json(summary) << '\n';
  }
  return summary;
}

std::string summary_to_json(const RunSummary& s, int indent) {
  json layers = json::array();
  for (const auto& l : s.layers) {
    layers.push_back({{"rows", l.rows}, {"cols", l.cols}, {"sparsified", l.sparsified}, {"density", l.density}});
  }
  json probes = json::array();
  for (const auto& p : s.probes) probes.push_back(probe_json(p));
  json j = {
      {"method", s.method},
      {"task", s.task},
      {"seed", s.seed},
      {"steps", s.steps},
      {"classification", s.classification},
      {"train_loss", s.train_loss},
      {"train_accuracy", s.train_accuracy},
      {"val_loss", s.val_loss},
      {"val_accuracy", s.val_accuracy},
      {"hidden_widths", s.hidden_widths},
      {"layers", layers},
      {"probes", probes},
      {"config", s.policy_json.empty() ? json(nullptr) : json::parse(s.policy_json)},
      {"wall_clock_seconds", s.wall_clock_seconds},
      {"trajectory_file", s.trajectory_file},
      {"metrics_file", s.metrics_file},
  };
  return j.dump(indent);
}

RunSummary summary_from_json(const std::string& text) {
  RunSummary s;
  try {
    const json j = json::parse(text);
    j.at("method").get_to(s.method);
    j.at("task").get_to(s.task);
    j.at("seed").get_to(s.seed);
    j.at("steps").get_to(s.steps);
    j.at("classification").get_to(s.classification);
    j.at("train_loss").get_to(s.train_loss);
    j.at("train_accuracy").get_to(s.train_accuracy);
    j.at("val_loss").get_to(s.val_loss);
    j.at("val_accuracy").get_to(s.val_accuracy);
    j.at("hidden_widths").get_to(s.hidden_widths);
    for (const auto& l : j.at("layers")) {
      s.layers.push_back({l.at("rows").get<std::size_t>(), l.at("cols").get<std::size_t>(),
                          l.at("sparsified").get<bool>(), l.at("density").get<double>()});
    }
    for (const auto& p : j.at("probes")) {
      s.probes.push_back({p.at("step").get<std::size_t>(), p.at("max_abs_nonparticipating").get<std::vector<double>>(),
                          p.at("density").get<std::vector<double>>()});
    }
    const auto& c = j.at("config");
    s.policy_json = c.is_null() ? std::string() : c.dump();
    j.at("wall_clock_seconds").get_to(s.wall_clock_seconds);
    j.at("trajectory_file").get_to(s.trajectory_file);
    j.at("metrics_file").get_to(s.metrics_file);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed run summary: ") + e.what());
  }
  return s;
}

RunSummary load_summary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return summary_from_json(buf.str());
}

double task_error(const RunSummary& regular, const RunSummary& sparse) {
  if (regular.task != sparse.task || regular.classification != sparse.classification) {
    throw ComparisonError("runs were trained on different tasks: '" + regular.task + "' vs '" + sparse.task + "'");
  }
  return regular.score() - sparse.score();
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "r") return SweepAxis::r;
  if (name == "s") return SweepAxis::s;
  if (name == "z") return SweepAxis::z;
  if (name == "d") return SweepAxis::d;
  if (name == "t" || name == "stretch") return SweepAxis::t;
  if (name == "strategy") return SweepAxis::strategy;
  throw ConfigError("unknown sweep axis '" + std::string(name) + "' (expected r, s, z, d, t or strategy)");
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::r: return "r";
    case SweepAxis::s: return "s";
    case SweepAxis::z: return "z";
    case SweepAxis::d: return "d";
    case SweepAxis::t: return "t";
    case SweepAxis::strategy: return "strategy";
  }
  return "?";
}

namespace {

double to_real(const std::string& value, SweepAxis axis) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty()) {
    throw ConfigError("sweep value '" + value + "' for axis " + std::string(to_string(axis)) + " is not a number");
  }
  return out;
}

std::size_t to_count(const std::string& value, SweepAxis axis) {
  const double x = to_real(value, axis);
  if (x < 0.0 || x != std::floor(x)) {
    throw ConfigError("sweep value '" + value + "' for axis " + std::string(to_string(axis)) +
                      " is not a non-negative integer");
  }
  return static_cast<std::size_t>(x);
}

}  // namespace

RunConfig apply_sweep_value(const RunConfig& base, SweepAxis axis, const std::string& value) {
  RunConfig c = base;
  auto& p = c.policy;
  switch (axis) {
    case SweepAxis::r:
      p.r = (value == "inf") ? std::numeric_limits<std::size_t>::max() : to_count(value, axis);
      break;
    case SweepAxis::s:
      p.s = to_real(value, axis);
      break;
    case SweepAxis::z:
      p.exploitation.kind = ExploitKind::reset;
      p.exploitation.z = to_count(value, axis);
      break;
    case SweepAxis::d:
      p.d = to_real(value, axis);
      break;
    case SweepAxis::t:
      c.schedule.stretch = to_real(value, axis);
      break;
    case SweepAxis::strategy:
      if (value == "no-explore") {
        p.method = Method::reduce;
        p.exploitation.kind = ExploitKind::none;
      } else if (value == "no-exploit") {
        p.method = Method::search;
        p.exploitation.kind = ExploitKind::none;
      } else if (value == "fix" || value == "reset" || value == "regularize") {
        p.method = Method::search;
        p.exploitation.kind = parse_exploit_kind(value);
      } else {
        p.method = parse_method(value);
        if (p.method != Method::search) p.exploitation.kind = ExploitKind::none;
      }
      break;
  }
  c.validate();
  return c;
}

}  // namespace sparsearch
