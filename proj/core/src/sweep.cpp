// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "sparsearch/analytics.hpp"
#include "sparsearch/error.hpp"
#include "sparsearch/experiment.hpp"

namespace sparsearch {

namespace {

struct Job {
  RunConfig config;
  RunSummary result;
};

void run_all(std::vector<Job>& jobs, std::size_t threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        jobs[j].result = run_experiment(jobs[j].config);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

RunConfig regular_of(const RunConfig& c) {
  RunConfig r = c;
  r.policy = SparsityPolicy{};
  r.policy.method = Method::dense;
  r.fix_v_steps.reset();
  r.lottery_epsilon_steps.reset();
  return r;
}

}  // namespace

SweepResult sweep(const RunConfig& base, SweepAxis axis, const std::vector<std::string>& values, std::size_t seeds,
                  std::size_t threads) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (seeds == 0) throw ConfigError("sweep needs at least one seed");

  std::vector<Job> jobs;
  // (stretch, seed) -> job index of the dense reference
  std::map<std::pair<double, std::size_t>, std::size_t> regular;
  std::vector<std::vector<std::size_t>> sparse(values.size());
  for (std::size_t v = 0; v < values.size(); ++v) {
    for (std::size_t k = 0; k < seeds; ++k) {
      RunConfig c = apply_sweep_value(base, axis, values[v]);
      c.seed = base.seed + k;
      c.output_dir.clear();
      const auto key = std::make_pair(c.schedule.stretch, k);
      if (!regular.count(key)) {
        regular[key] = jobs.size();
        jobs.push_back({regular_of(c), {}});
      }
      sparse[v].push_back(jobs.size());
      jobs.push_back({std::move(c), {}});
    }
  }
  run_all(jobs, threads);

  SweepResult result;
  result.axis = axis;
  for (std::size_t v = 0; v < values.size(); ++v) {
    SweepPoint point;
    point.value = values[v];
    for (std::size_t k = 0; k < seeds; ++k) {
      const Job& s = jobs[sparse[v][k]];
      const Job& r = jobs[regular.at({s.config.schedule.stretch, k})];
      point.task_errors.push_back(task_error(r.result, s.result));
      point.scores.push_back(s.result.score());
      point.regular_scores.push_back(r.result.score());
    }
    point.median_task_error = median(point.task_errors);
    point.median_score = median(point.scores);
    point.median_regular_score = median(point.regular_scores);
    result.points.push_back(std::move(point));
  }
  return result;
}

std::string sweep_to_csv(const SweepResult& result) {
  std::ostringstream out;
  out.precision(10);
  out << "axis,value,seeds,median_task_error,median_score,median_regular_score,task_errors\n";
  for (const auto& p : result.points) {
    out << to_string(result.axis) << ',' << p.value << ',' << p.task_errors.size() << ',' << p.median_task_error
        << ',' << p.median_score << ',' << p.median_regular_score << ',';
    for (std::size_t i = 0; i < p.task_errors.size(); ++i) {
      if (i) out << ';';
      out << p.task_errors[i];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace sparsearch
