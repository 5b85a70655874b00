// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include "sparsearch/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sparsearch {

using nlohmann::json;

std::size_t RunConfig::executed_steps() const { return resolved_schedule().stretched_total(); }

LrSchedule RunConfig::resolved_schedule() const {
  LrSchedule s = schedule;
  s.decay_steps = total_steps > s.warmup_steps ? total_steps - s.warmup_steps : 0;
  return s;
}

SparsityPolicy RunConfig::resolved_policy() const {
  SparsityPolicy p = policy;
  const std::size_t steps = executed_steps();
  if (p.exploitation.kind == ExploitKind::fix) {
    p.exploitation.v = fix_v_steps.value_or(static_cast<std::size_t>(
        std::llround(fix_v_fraction * static_cast<double>(steps))));
    if (p.exploitation.v == 0) p.exploitation.v = 1;
  }
  if (p.method == Method::lottery) {
    p.lottery_epsilon = lottery_epsilon_steps.value_or(static_cast<std::size_t>(
        std::llround(lottery_epsilon_fraction * static_cast<double>(steps))));
  }
  return p;
}

void RunConfig::validate() const {
  if (total_steps == 0) throw ConfigError("total_steps must be >= 1");
  if (total_steps < schedule.warmup_steps) throw ConfigError("total_steps must be >= schedule.warmup_steps");
  if (task.batch_size == 0) throw ConfigError("task.batch_size must be >= 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must be in [0, 1)");
  if (!(fix_v_fraction > 0.0 && fix_v_fraction <= 1.0)) throw ConfigError("policy.v_fraction must be in (0, 1]");
  if (!(lottery_epsilon_fraction >= 0.0 && lottery_epsilon_fraction < 1.0)) {
    throw ConfigError("policy.lottery_epsilon_fraction must be in [0, 1)");
  }
  try {
    schedule.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
  policy.validate();
  if (policy.method == Method::lottery && resolved_policy().lottery_epsilon >= executed_steps()) {
    throw ConfigError("policy.lottery_epsilon must be smaller than the number of steps");
  }
}

namespace {

// Walks one JSON object, recording which keys were consumed so that
// leftovers can be reported as unknown.
class Reader {
public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where() + "expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = convert<T>(*it);
    } catch (const json::exception& e) {
      throw ConfigError("key '" + full(key) + "': " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError("key '" + full(key) + "': " + e.what());
    }
  }

  template <typename T>
  void get_optional(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return;
    T value{};
    get(key, value);
    out = value;
  }

  bool has(const char* key) const { return obj_.contains(key); }

  Reader child(const char* key) {
    seen_.insert(key);
    static const json empty = json::object();
    const auto it = obj_.find(key);
    return Reader(it == obj_.end() ? empty : *it, full(key));
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) throw ConfigError("unknown key '" + full(key) + "'");
    }
  }

private:
  template <typename T>
  static T convert(const json& v) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<std::int64_t>() < 0)) {
        throw ConfigError("expected a nonnegative integer");
      }
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError("expected a number");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("expected a string");
      return v.get<std::string>();
    } else {
      if (!v.is_array()) throw ConfigError("expected an array");
      T out;
      for (const auto& e : v) out.push_back(convert<typename T::value_type>(e));
      return out;
    }
  }

  std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "" : "'" + path_ + "': "; }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Enum, typename Parse>
void get_enum(Reader& r, const char* key, Enum& out, Parse parse) {
  std::optional<std::string> name;
  r.get_optional(key, name);
  if (name) out = parse(*name);
}

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json task_json(const TaskSpec& t) {
  json j;
  j["kind"] = std::string(to_string(t.kind));
  j["classes"] = t.classes;
  j["points_per_class"] = t.points_per_class;
  j["turns"] = t.turns;
  j["noise_sd"] = t.noise_sd;
  j["in_dim"] = t.in_dim;
  j["teacher_hidden"] = t.teacher_hidden;
  j["out_dim"] = t.out_dim;
  j["samples"] = t.samples;
  j["path"] = t.path;
  j["target_column"] = t.target_column;
  j["classification"] = t.classification;
  j["batch_size"] = t.batch_size;
  if (t.seed) j["seed"] = *t.seed;
  return j;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("config parse error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": " + e.what());
  }
  RunConfig c;
  Reader r(root, "");
  r.get("seed", c.seed);

  {
    if (!r.has("task")) throw ConfigError("missing key 'task'");
    Reader t = r.child("task");
    std::string kind;
    t.get("kind", kind);
    if (kind.empty()) throw ConfigError("missing key 'task.kind'");
    c.task.kind = parse_task_kind(kind);
    t.get("classes", c.task.classes);
    t.get("points_per_class", c.task.points_per_class);
    t.get("turns", c.task.turns);
    t.get("noise_sd", c.task.noise_sd);
    t.get("in_dim", c.task.in_dim);
    t.get("teacher_hidden", c.task.teacher_hidden);
    t.get("out_dim", c.task.out_dim);
    t.get("samples", c.task.samples);
    t.get("path", c.task.path);
    t.get("target_column", c.task.target_column);
    t.get("classification", c.task.classification);
    t.get("batch_size", c.task.batch_size);
    t.get_optional("seed", c.task.seed);
    t.finish();
  }

  r.get("hidden_widths", c.hidden_widths);
  r.get("min_sparse_in_dim", c.min_sparse_in_dim);
  r.get("sparsify_output", c.sparsify_output);
  r.get("exempt_incompatible", c.exempt_incompatible);
  r.get("total_steps", c.total_steps);
  r.get("momentum", c.momentum);

  {
    Reader s = r.child("schedule");
    s.get("base_lr", c.schedule.base_lr);
    s.get("warmup_steps", c.schedule.warmup_steps);
    get_enum(s, "kind", c.schedule.kind, parse_decay_kind);
    s.get("milestones", c.schedule.milestones);
    s.get("drop_factor", c.schedule.drop_factor);
    s.get("inverse_gamma", c.schedule.inverse_gamma);
    s.get("stretch", c.schedule.stretch);
    s.finish();
  }

  {
    Reader p = r.child("policy");
    SparsityPolicy& pol = c.policy;
    get_enum(p, "method", pol.method, parse_method);
    p.get("d", pol.d);
    std::optional<std::string> r_text;
    if (p.has("r") && root["policy"]["r"].is_string()) {
      p.get_optional("r", r_text);
      if (*r_text != "inf") throw ConfigError("key 'policy.r': expected an integer or \"inf\"");
      pol.r = std::numeric_limits<std::size_t>::max();
    } else {
      p.get("r", pol.r);
    }
    p.get("s", pol.s);
    get_enum(p, "exploitation", pol.exploitation.kind, parse_exploit_kind);
    p.get_optional("v", c.fix_v_steps);
    p.get("v_fraction", c.fix_v_fraction);
    p.get("z", pol.exploitation.z);
    p.get("beta", pol.exploitation.beta);
    get_enum(p, "structure", pol.structure.kind, parse_structure_kind);
    std::optional<std::string> axis;
    p.get_optional("axis", axis);
    if (axis) {
      if (*axis == "row") {
        pol.structure.axis = Axis::row;
      } else if (*axis == "col") {
        pol.structure.axis = Axis::col;
      } else {
        throw ConfigError("key 'policy.axis': expected \"row\" or \"col\"");
      }
    }
    p.get("block", pol.structure.block);
    std::optional<std::string> score;
    p.get_optional("block_score", score);
    if (score) {
      if (*score == "max_abs") {
        pol.structure.score = BlockScore::max_abs;
      } else if (*score == "p_norm") {
        pol.structure.score = BlockScore::p_norm;
      } else {
        throw ConfigError("key 'policy.block_score': expected \"max_abs\" or \"p_norm\"");
      }
    }
    p.get("p", pol.structure.p);
    p.get("rewire_f0", pol.rewire_f0);
    p.get_optional("lottery_epsilon", c.lottery_epsilon_steps);
    p.get("lottery_epsilon_fraction", c.lottery_epsilon_fraction);
    p.get("fix_zero_momentum", pol.fix_zero_momentum);
    p.finish();
  }

  r.get("snapshot_stride", c.snapshot_stride);
  r.get("tracked_per_layer", c.tracked_per_layer);
  r.get("metrics_every", c.metrics_every);
  r.get("probe_steps", c.probe_steps);
  r.get("output_dir", c.output_dir);
  r.finish();

  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_to_json(const RunConfig& c, int indent) {
  json j;
  j["seed"] = c.seed;
  j["task"] = task_json(c.task);
  j["hidden_widths"] = c.hidden_widths;
  j["min_sparse_in_dim"] = c.min_sparse_in_dim;
  j["sparsify_output"] = c.sparsify_output;
  j["exempt_incompatible"] = c.exempt_incompatible;
  j["total_steps"] = c.total_steps;
  j["momentum"] = c.momentum;
  j["schedule"] = {
      {"base_lr", c.schedule.base_lr},
      {"warmup_steps", c.schedule.warmup_steps},
      {"kind", std::string(to_string(c.schedule.kind))},
      {"milestones", c.schedule.milestones},
      {"drop_factor", c.schedule.drop_factor},
      {"inverse_gamma", c.schedule.inverse_gamma},
      {"stretch", c.schedule.stretch},
  };
  const SparsityPolicy& p = c.policy;
  json pol;
  pol["method"] = std::string(to_string(p.method));
  pol["d"] = p.d;
  if (p.r == std::numeric_limits<std::size_t>::max()) {
    pol["r"] = "inf";
  } else {
    pol["r"] = p.r;
  }
  pol["s"] = p.s;
  pol["exploitation"] = std::string(to_string(p.exploitation.kind));
  if (c.fix_v_steps) pol["v"] = *c.fix_v_steps;
  pol["v_fraction"] = c.fix_v_fraction;
  pol["z"] = p.exploitation.z;
  pol["beta"] = p.exploitation.beta;
  pol["structure"] = std::string(to_string(p.structure.kind));
  pol["axis"] = p.structure.axis == Axis::row ? "row" : "col";
  pol["block"] = p.structure.block;
  pol["block_score"] = p.structure.score == BlockScore::max_abs ? "max_abs" : "p_norm";
  pol["p"] = p.structure.p;
  pol["rewire_f0"] = p.rewire_f0;
  if (c.lottery_epsilon_steps) pol["lottery_epsilon"] = *c.lottery_epsilon_steps;
  pol["lottery_epsilon_fraction"] = c.lottery_epsilon_fraction;
  pol["fix_zero_momentum"] = p.fix_zero_momentum;
  j["policy"] = pol;
  j["snapshot_stride"] = c.snapshot_stride;
  j["tracked_per_layer"] = c.tracked_per_layer;
  j["metrics_every"] = c.metrics_every;
  j["probe_steps"] = c.probe_steps;
  j["output_dir"] = c.output_dir;
  return j.dump(indent);
}

void save_config(const RunConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << config_to_json(config) << '\n';
}

}  // namespace sparsearch
