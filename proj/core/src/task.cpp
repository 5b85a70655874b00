// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include "sparsearch/task.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

#include "sparsearch/mlp.hpp"
#include "sparsearch/rng.hpp"

namespace sparsearch {

TaskKind parse_task_kind(std::string_view name) {
  if (name == "spiral" || name == "spiral_classification") return TaskKind::spiral_classification;
  if (name == "teacher" || name == "teacher_regression") return TaskKind::teacher_regression;
  if (name == "csv" || name == "csv_dataset") return TaskKind::csv_dataset;
  throw ConfigError("unknown task kind '" + std::string(name) + "'");
}

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::spiral_classification: return "spiral_classification";
    case TaskKind::teacher_regression: return "teacher_regression";
    case TaskKind::csv_dataset: return "csv_dataset";
  }
  return "?";
}

namespace {

constexpr double kValidationFraction = 0.2;

struct Samples {
  std::vector<float> x;
  std::vector<float> y;
  std::size_t in_dim = 0;
  std::size_t y_dim = 0;
  std::size_t count() const { return in_dim == 0 ? 0 : x.size() / in_dim; }
};

Samples spiral(const TaskSpec& spec, Rng& rng) {
  if (spec.classes < 2 || spec.points_per_class < 2) throw ConfigError("spiral needs >= 2 classes and points");
  Samples s{{}, {}, 2, 1};
  for (std::size_t c = 0; c < spec.classes; ++c) {
    for (std::size_t i = 0; i < spec.points_per_class; ++i) {
      const double radius = static_cast<double>(i) / static_cast<double>(spec.points_per_class - 1);
      const double theta = 2.0 * std::numbers::pi *
                               (static_cast<double>(c) / static_cast<double>(spec.classes) + spec.turns * radius) +
                           spec.noise_sd * rng.normal();
      s.x.push_back(static_cast<float>(radius * std::sin(theta)));
      s.x.push_back(static_cast<float>(radius * std::cos(theta)));
      s.y.push_back(static_cast<float>(c));
    }
  }
  return s;
}

Samples teacher(const TaskSpec& spec, Rng& rng) {
  if (spec.in_dim == 0 || spec.out_dim == 0 || spec.samples < 2) throw ConfigError("invalid teacher task sizes");
  const std::size_t hidden[] = {spec.teacher_hidden};
  Mlp<float> net(spec.in_dim, hidden, spec.out_dim);
  net.initialize(rng);
  Tensor x(spec.samples, spec.in_dim);
  for (auto& v : x.flat()) v = static_cast<float>(rng.normal());
  Tensor y = net.predict(x);
  for (auto& v : y.flat()) v = static_cast<float>(v + spec.noise_sd * rng.normal());
  return {x.data(), y.data(), spec.in_dim, spec.out_dim};
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  return cells;
}

Samples from_csv(const TaskSpec& spec) {
  std::ifstream in(spec.path);
  if (!in) throw IoError("cannot open dataset " + spec.path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty dataset " + spec.path);
  const auto header = split_csv_line(line);
  std::size_t target = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == spec.target_column) target = i;
  }
  if (target == header.size()) throw ConfigError("target column '" + spec.target_column + "' not in " + spec.path);
  Samples s{{}, {}, header.size() - 1, 1};
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw IoError(spec.path + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                    " cells");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      float v;
      try {
        v = std::stof(cells[i]);
      } catch (const std::exception&) {
        throw IoError(spec.path + ":" + std::to_string(line_no) + ": non-numeric cell '" + cells[i] + "'");
      }
      if (i == target) {
        s.y.push_back(v);
      } else {
        s.x.push_back(v);
      }
    }
  }
  if (s.y.size() < 2) throw IoError("dataset " + spec.path + " has fewer than 2 rows");
  return s;
}

}  // namespace

Dataset make_dataset(const TaskSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  Samples s;
  Dataset d;
  std::ostringstream desc;
  desc << to_string(spec.kind);
  switch (spec.kind) {
    case TaskKind::spiral_classification:
      s = spiral(spec, rng);
      d.classification = true;
      desc << "(classes=" << spec.classes << ",points=" << spec.points_per_class << ",turns=" << spec.turns
           << ",noise=" << spec.noise_sd << ")";
      break;
    case TaskKind::teacher_regression:
      s = teacher(spec, rng);
      d.classification = false;
      desc << "(in=" << spec.in_dim << ",hidden=" << spec.teacher_hidden << ",out=" << spec.out_dim
           << ",samples=" << spec.samples << ",noise=" << spec.noise_sd << ")";
      break;
    case TaskKind::csv_dataset:
      s = from_csv(spec);
      d.classification = spec.classification;
      desc << "(path=" << spec.path << ",target=" << spec.target_column
           << ",classification=" << spec.classification << ")";
      break;
  }
  desc << "@seed=" << seed;
  d.descriptor = desc.str();
  d.in_dim = s.in_dim;
  d.loss = d.classification ? LossKind::cross_entropy : LossKind::mse;

  if (d.classification) {
    float top = 0.0f;
    for (float v : s.y) {
      if (v < 0.0f || v != std::floor(v)) throw ConfigError("classification targets must be nonnegative integers");
      top = std::max(top, v);
    }
    d.out_dim = static_cast<std::size_t>(top) + 1;
  } else {
    d.out_dim = s.y_dim;
  }

  const std::size_t n = s.count();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order.begin(), order.end());
  const std::size_t n_val = static_cast<std::size_t>(std::llround(kValidationFraction * static_cast<double>(n)));
  const std::size_t n_train = n - n_val;
  if (n_train == 0 || n_val == 0) throw ConfigError("dataset too small to split");

  auto gather = [&](std::size_t begin, std::size_t end, Tensor& x, Tensor& y) {
    x = Tensor(end - begin, s.in_dim);
    y = Tensor(end - begin, s.y_dim);
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t src = order[i];
      std::copy_n(s.x.begin() + static_cast<std::ptrdiff_t>(src * s.in_dim), s.in_dim, x.row(i - begin).begin());
      std::copy_n(s.y.begin() + static_cast<std::ptrdiff_t>(src * s.y_dim), s.y_dim, y.row(i - begin).begin());
    }
  };
  gather(0, n_train, d.train_x, d.train_y);
  gather(n_train, n, d.val_x, d.val_y);

  if (spec.kind == TaskKind::csv_dataset) {
    // Standardize features with training statistics.
    for (std::size_t c = 0; c < d.in_dim; ++c) {
      double mean = 0.0;
      double sq = 0.0;
      for (std::size_t r = 0; r < n_train; ++r) mean += d.train_x(r, c);
      mean /= static_cast<double>(n_train);
      for (std::size_t r = 0; r < n_train; ++r) sq += (d.train_x(r, c) - mean) * (d.train_x(r, c) - mean);
      const double sd = std::sqrt(sq / static_cast<double>(n_train));
      const double scale = sd > 0.0 ? 1.0 / sd : 1.0;
      for (Tensor* t : {&d.train_x, &d.val_x}) {
        for (std::size_t r = 0; r < t->rows(); ++r) (*t)(r, c) = static_cast<float>(((*t)(r, c) - mean) * scale);
      }
    }
  }
  return d;
}

}  // namespace sparsearch
