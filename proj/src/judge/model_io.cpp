// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "specjudge/error.hpp"
#include "specjudge/judge.hpp"

namespace specjudge::judge {

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num_list(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += num(values[i]);
  }
  return out + "]";
}

double read_num(const nlohmann::json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

}  // namespace

std::string JudgeModel::serialize(const std::string& config_json) const {
  const auto config = nlohmann::ordered_json::parse(config_json).dump();
  std::ostringstream out;
  out << "{\n"
      << " \"format_version\": " << kFormatVersion << ",\n"
      << " \"feature_dim\": " << feature_dim() << ",\n"
      << " \"weights\": " << num_list(weights) << ",\n"
      << " \"bias\": " << num(bias) << ",\n"
      << " \"thresholds\": {\"theta_recall\": " << num(thresholds.theta_recall)
      << ", \"theta_f1\": " << num(thresholds.theta_f1) << "},\n"
      << " \"training_meta\": {\"C\": " << num(meta.c) << ", \"auc\": " << num(meta.auc)
      << ", \"seed\": " << meta.seed << ", \"iterations\": " << meta.iterations << "},\n"
      << " \"standardization\": {\"enabled\": " << (standardization.enabled ? "true" : "false")
      << ", \"mean\": " << num_list(standardization.mean)
      << ", \"scale\": " << num_list(standardization.scale) << "},\n"
      << " \"config\": " << config << "\n"
      << "}\n";
  return out.str();
}

JudgeModel JudgeModel::deserialize(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format_version").get<int>() != kFormatVersion) {
      fail(ErrorKind::kFormat, "verifier file: unsupported format_version");
    }
    JudgeModel m;
    m.weights = doc.at("weights").get<std::vector<double>>();
    if (doc.at("feature_dim").get<std::size_t>() != m.weights.size()) {
      fail(ErrorKind::kFormat, "verifier file: feature_dim does not match weights");
    }
    m.bias = doc.at("bias").get<double>();
    const auto& th = doc.at("thresholds");
    m.thresholds.theta_recall = read_num(th.at("theta_recall"));
    m.thresholds.theta_f1 = read_num(th.at("theta_f1"));
    const auto& meta = doc.at("training_meta");
    m.meta.c = read_num(meta.at("C"));
    m.meta.auc = read_num(meta.at("auc"));
    m.meta.seed = meta.at("seed").get<std::uint64_t>();
    m.meta.iterations = meta.value("iterations", 0);
    if (doc.contains("standardization")) {
      const auto& st = doc.at("standardization");
      m.standardization.enabled = st.at("enabled").get<bool>();
      m.standardization.mean = st.at("mean").get<std::vector<double>>();
      m.standardization.scale = st.at("scale").get<std::vector<double>>();
      if (m.standardization.enabled && (m.standardization.mean.size() != m.weights.size() ||
                                        m.standardization.scale.size() != m.weights.size())) {
        fail(ErrorKind::kFormat, "verifier file: standardization size mismatch");
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, std::string("verifier file: ") + e.what());
  }
}

void JudgeModel::save(const std::filesystem::path& path, const std::string& config_json) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << serialize(config_json);
}

JudgeModel JudgeModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot read verifier " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace specjudge::judge
