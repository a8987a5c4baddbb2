// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace specjudge {

using TokenId = std::int32_t;
using TokenSeq = std::vector<TokenId>;

// Ordered token alphabet. Ids are 0..size()-1 and the string <-> id mapping
// is a bijection.
class Vocab {
 public:
  Vocab() = default;
  explicit Vocab(std::vector<std::string> tokens);

  // Synthetic alphabet "t0", "t1", ... of the given size.
  static Vocab numbered(std::size_t size);

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::string& token(TokenId id) const;
  std::optional<TokenId> find(std::string_view token) const;
  TokenId id(std::string_view token) const;
  bool contains(TokenId id) const noexcept {
    return id >= 0 && static_cast<std::size_t>(id) < tokens_.size();
  }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

enum class Tokenization { kCharacter, kWhitespace };

std::vector<std::string> split_tokens(std::string_view line, Tokenization mode);

// Builds a vocab from the sorted set of distinct tokens in `lines`.
Vocab build_vocab(std::span<const std::string> lines, Tokenization mode);

TokenSeq encode(const Vocab& vocab, std::string_view line, Tokenization mode);
std::string decode_text(const Vocab& vocab, std::span<const TokenId> tokens,
                        Tokenization mode);

}  // namespace specjudge
