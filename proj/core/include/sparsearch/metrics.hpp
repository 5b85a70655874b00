// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <vector>

namespace sparsearch {

struct MetricRecord {
  std::size_t step = 0;  // number of completed optimizer steps
  double loss = 0.0;     // minibatch loss of that step
  double accuracy = 0.0; // minibatch accuracy (classification) or 0
  double lr = 0.0;
  std::vector<double> density;  // participating fraction per layer
  bool rewired = false;          // mask recomputed at the top of the step

  friend bool operator==(const MetricRecord&, const MetricRecord&) = default;
};

// One JSON object per line. Reals are written with round-trip precision.
void emit_metrics(std::ostream& out, const MetricRecord& record);
std::vector<MetricRecord> read_metrics(std::istream& in);

}  // namespace sparsearch
