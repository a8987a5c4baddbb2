// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include "specjudge/ngram_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "specjudge/error.hpp"

namespace specjudge {

using ojson = nlohmann::ordered_json;

NGramModel::NGramModel(Vocab vocab, int order, double alpha, CountTable counts)
    : vocab_(std::move(vocab)), order_(order), alpha_(alpha), counts_(std::move(counts)) {
  if (order_ < 1) fail("order must be >= 1");
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) fail("alpha must be > 0");
  for (const auto& [ctx, cc] : counts_) {
    if (ctx.size() >= static_cast<std::size_t>(order_)) fail("context longer than order-1");
    if (cc.counts.size() != vocab_.size()) fail("count row has wrong width");
    std::uint64_t sum = 0;
    for (auto c : cc.counts) sum += c;
    if (sum != cc.total) fail("count row total mismatch");
  }
}

NGramModel NGramModel::train(const Vocab& vocab, std::span<const TokenSeq> corpus,
                             int order, double alpha) {
  if (corpus.empty()) fail("empty corpus");
  if (order < 1) fail("order must be >= 1");
  if (!(alpha > 0.0)) fail("alpha must be > 0");
  const std::size_t max_ctx = static_cast<std::size_t>(order - 1);
  CountTable table;
  for (const auto& seq : corpus) {
    for (std::size_t j = 0; j < seq.size(); ++j) {
      if (!vocab.contains(seq[j])) fail("unknown token");
      const std::size_t longest = std::min(max_ctx, j);
      for (std::size_t len = 0; len <= longest; ++len) {
        TokenSeq ctx(seq.begin() + static_cast<std::ptrdiff_t>(j - len),
                     seq.begin() + static_cast<std::ptrdiff_t>(j));
        auto& row = table[ctx];
        if (row.counts.empty()) row.counts.assign(vocab.size(), 0);
        ++row.counts[static_cast<std::size_t>(seq[j])];
        ++row.total;
      }
    }
  }
  return NGramModel(vocab, order, alpha, std::move(table));
}

std::span<const TokenId> NGramModel::context_of(std::span<const TokenId> prefix) const {
  const std::size_t len = std::min(prefix.size(), static_cast<std::size_t>(order_ - 1));
  return prefix.subspan(prefix.size() - len);
}

const ContextCounts* NGramModel::lookup(std::span<const TokenId> context) const {
  // std::map lookup needs a key object; contexts are tiny.
  auto it = counts_.find(TokenSeq(context.begin(), context.end()));
  return it == counts_.end() ? nullptr : &it->second;
}

Distribution NGramModel::next_distribution(std::span<const TokenId> prefix) const {
  const std::size_t v = vocab_.size();
  const ContextCounts* row = lookup(context_of(prefix));
  const double total = row ? static_cast<double>(row->total) : 0.0;
  const double denom = total + alpha_ * static_cast<double>(v);
  Distribution dist{std::vector<double>(v)};
  for (std::size_t i = 0; i < v; ++i) {
    const double c = row ? static_cast<double>(row->counts[i]) : 0.0;
    dist.probs[i] = (c + alpha_) / denom;
  }
  return dist;
}

double NGramModel::prob(std::span<const TokenId> prefix, TokenId token) const {
  if (!vocab_.contains(token)) fail("unknown token");
  const ContextCounts* row = lookup(context_of(prefix));
  const double total = row ? static_cast<double>(row->total) : 0.0;
  const double c = row ? static_cast<double>(row->counts[static_cast<std::size_t>(token)]) : 0.0;
  return (c + alpha_) / (total + alpha_ * static_cast<double>(vocab_.size()));
}

std::string NGramModel::serialize(const std::string& config_json) const {
  ojson doc;
  doc["format_version"] = kFormatVersion;
  doc["order"] = order_;
  doc["alpha"] = alpha_;
  doc["vocab"] = vocab_.tokens();
  ojson rows = ojson::array();
  for (const auto& [ctx, cc] : counts_) {
    ojson sparse = ojson::array();
    for (std::size_t i = 0; i < cc.counts.size(); ++i) {
      if (cc.counts[i] != 0) sparse.push_back({i, cc.counts[i]});
    }
    rows.push_back({{"context", ctx}, {"counts", std::move(sparse)}});
  }
  doc["counts"] = std::move(rows);
  doc["config"] = ojson::parse(config_json);
  return doc.dump(1) + "\n";
}

NGramModel NGramModel::deserialize(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, std::string("model file: ") + e.what());
  }
  try {
    if (doc.at("format_version").get<int>() != kFormatVersion) {
      fail(ErrorKind::kFormat, "model file: unsupported format_version");
    }
    Vocab vocab(doc.at("vocab").get<std::vector<std::string>>());
    CountTable table;
    for (const auto& row : doc.at("counts")) {
      auto ctx = row.at("context").get<TokenSeq>();
      for (TokenId t : ctx) {
        if (!vocab.contains(t)) fail(ErrorKind::kFormat, "model file: unknown token");
      }
      ContextCounts cc;
      cc.counts.assign(vocab.size(), 0);
      for (const auto& entry : row.at("counts")) {
        const auto tok = entry.at(0).get<std::size_t>();
        if (tok >= vocab.size()) fail(ErrorKind::kFormat, "model file: unknown token");
        cc.counts[tok] = entry.at(1).get<std::uint64_t>();
        cc.total += cc.counts[tok];
      }
      table.emplace(std::move(ctx), std::move(cc));
    }
    return NGramModel(std::move(vocab), doc.at("order").get<int>(),
                      doc.at("alpha").get<double>(), std::move(table));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, std::string("model file: ") + e.what());
  }
}

void NGramModel::save(const std::filesystem::path& path,
                      const std::string& config_json) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << serialize(config_json);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
}

NGramModel NGramModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot read model " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

double sequence_logprob(const NGramModel& model, std::span<const TokenId> continuation,
                        std::span<const TokenId> prefix) {
  if (continuation.empty()) fail("empty continuation");
  TokenSeq ctx(prefix.begin(), prefix.end());
  double total = 0.0;
  for (TokenId tok : continuation) {
    total += std::log(model.prob(ctx, tok));
    ctx.push_back(tok);
  }
  return total;
}

TokenSeq greedy_rollout(const NGramModel& model, std::span<const TokenId> prefix,
                        std::size_t length, TokenId stop_token) {
  TokenSeq ctx(prefix.begin(), prefix.end());
  TokenSeq out;
  out.reserve(length);
  while (out.size() < length) {
    const TokenId next = model.next_distribution(ctx).argmax();
    out.push_back(next);
    ctx.push_back(next);
    if (next == stop_token) break;
  }
  return out;
}

}  // namespace specjudge
