// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include "sparsearch/metrics.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "sparsearch/error.hpp"

namespace sparsearch {

void emit_metrics(std::ostream& out, const MetricRecord& record) {
  nlohmann::json j;
  j["step"] = record.step;
  j["loss"] = record.loss;
  j["accuracy"] = record.accuracy;
  j["lr"] = record.lr;
  j["density"] = record.density;
  j["rewired"] = record.rewired;
  out << j.dump() << '\n';
  if (!out) throw IoError("failed writing metrics record");
}

std::vector<MetricRecord> read_metrics(std::istream& in) {
  std::vector<MetricRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      MetricRecord r;
      r.step = j.at("step").get<std::size_t>();
      r.loss = j.at("loss").get<double>();
      r.accuracy = j.at("accuracy").get<double>();
      r.lr = j.at("lr").get<double>();
      r.density = j.at("density").get<std::vector<double>>();
      r.rewired = j.at("rewired").get<bool>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw IoError("metrics line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace sparsearch
