// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <sstream>

#include "specjudge/error.hpp"
#include "specjudge/harness.hpp"

namespace specjudge::harness {

using ojson = nlohmann::ordered_json;

namespace {

std::vector<std::string> split_key(const std::string& dotted) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : dotted) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  for (const auto& p : parts) {
    if (p.empty()) fail("malformed config key '" + dotted + "'");
  }
  return parts;
}

// Recursive overlay of `patch` onto `base`; objects merge, everything else
// replaces.
void overlay(ojson& base, const ojson& patch) {
  if (!patch.is_object() || !base.is_object()) {
    base = patch;
    return;
  }
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (base.contains(it.key())) {
      overlay(base[it.key()], it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
}

}  // namespace

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig cfg;
  cfg.doc_ = ojson::parse(R"({
  "seed": 1234,
  "out": "out",
  "workers": 1,
  "corpus": {
    "path": "synthetic",
    "tokenization": "char",
    "synthetic": {"vocab_size": 20, "chain_order": 2, "sharpness": 1.0,
                  "chain_seed": 7, "num_sequences": 20, "length": 1000}
  },
  "target": {"order": 3, "alpha": 0.5},
  "draft": {"order": 2, "alpha": 0.5},
  "prompts": {"num_label": 300, "num_eval": 100, "length": 4},
  "decode": {"gamma": 6, "max_new_tokens": 64, "temperature": 0.0, "stop_token": -1,
             "topk": 2, "policies": ["rejection", "greedy", "judge"], "thetas": ["f1"]},
  "label": {"N": 20, "tau": "auto", "calibration_quantile": 0.1, "horizon": 8,
            "max_response_len": 64},
  "train": {"c_grid": [], "holdout_fraction": 0.2, "max_iter": 2000, "tol": 1e-6,
            "target_recall": 0.99, "standardize": false},
  "check_distribution": {"vocab_size": 6, "length": 3, "samples": 200000, "gamma": 2,
                         "temperature": 1.0, "chain_order": 3, "sharpness": 1.5,
                         "chain_seed": 11, "corpus_sequences": 40, "corpus_length": 25,
                         "target_order": 3, "draft_order": 2, "alpha": 0.5,
                         "prompt": [0, 1], "tolerance": 0.02},
  "check_theorem": {"trials": 1000, "max_support": 8}
})");
  ojson grid = ojson::array();
  for (double c : judge::default_c_grid()) grid.push_back(c);
  cfg.doc_["train"]["c_grid"] = std::move(grid);
  return cfg;
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  PipelineConfig cfg = defaults();
  try {
    overlay(cfg.doc_, ojson::parse(buf.str()));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, std::string("config file: ") + e.what());
  }
  return cfg;
}

void PipelineConfig::set_json(const std::string& dotted_key, ojson value) {
  ojson* node = &doc_;
  const auto parts = split_key(dotted_key);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    ojson& child = (*node)[parts[i]];
    if (!child.is_object()) child = ojson::object();
    node = &child;
  }
  (*node)[parts.back()] = std::move(value);
}

void PipelineConfig::set(const std::string& dotted_key, const std::string& value) {
  ojson parsed;
  try {
    parsed = ojson::parse(value);
  } catch (const nlohmann::json::exception&) {
    parsed = value;
  }
  set_json(dotted_key, std::move(parsed));
}

const ojson& PipelineConfig::at(const std::string& dotted_key) const {
  const ojson* node = &doc_;
  for (const auto& part : split_key(dotted_key)) {
    if (!node->is_object() || !node->contains(part)) {
      fail("missing config key '" + dotted_key + "'");
    }
    node = &(*node)[part];
  }
  return *node;
}

nlohmann::ordered_json PipelineConfig::provenance() const {
  ojson doc = doc_;
  doc.erase("out");
  doc.erase("workers");
  return doc;
}

std::uint64_t PipelineConfig::seed() const { return at("seed").get<std::uint64_t>(); }

std::filesystem::path PipelineConfig::out_dir() const {
  return std::filesystem::path(at("out").get<std::string>());
}

int PipelineConfig::workers() const { return at("workers").get<int>(); }

}  // namespace specjudge::harness
