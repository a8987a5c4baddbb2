// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#include "specjudge/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "specjudge/error.hpp"

namespace specjudge {

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < 2) fail("vocab needs at least 2 tokens");
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    auto [it, inserted] = index_.emplace(tokens_[i], static_cast<TokenId>(i));
    if (!inserted) fail("duplicate vocab token '" + tokens_[i] + "'");
  }
}

Vocab Vocab::numbered(std::size_t size) {
  std::vector<std::string> tokens;
  tokens.reserve(size);
  for (std::size_t i = 0; i < size; ++i) tokens.push_back("t" + std::to_string(i));
  return Vocab(std::move(tokens));
}

const std::string& Vocab::token(TokenId id) const {
  if (!contains(id)) fail("unknown token");
  return tokens_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> Vocab::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocab::id(std::string_view token) const {
  auto found = find(token);
  if (!found) fail("unknown token");
  return *found;
}

std::vector<std::string> split_tokens(std::string_view line, Tokenization mode) {
  std::vector<std::string> out;
  if (mode == Tokenization::kCharacter) {
    for (char c : line) {
      if (c == '\r' || c == '\n') continue;
      out.emplace_back(1, c);
    }
    return out;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

Vocab build_vocab(std::span<const std::string> lines, Tokenization mode) {
  std::set<std::string> distinct;
  for (const auto& line : lines) {
    for (auto& tok : split_tokens(line, mode)) distinct.insert(std::move(tok));
  }
  return Vocab(std::vector<std::string>(distinct.begin(), distinct.end()));
}

TokenSeq encode(const Vocab& vocab, std::string_view line, Tokenization mode) {
  TokenSeq out;
  for (const auto& tok : split_tokens(line, mode)) out.push_back(vocab.id(tok));
  return out;
}

std::string decode_text(const Vocab& vocab, std::span<const TokenId> tokens,
                        Tokenization mode) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (mode == Tokenization::kWhitespace && i > 0) out += ' ';
    out += vocab.token(tokens[i]);
  }
  return out;
}

}  // namespace specjudge
