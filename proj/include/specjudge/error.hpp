// Copyright 2026 The specjudge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace specjudge {

enum class ErrorKind {
  kInvalidArgument,
  kIo,
  kFormat,
  kState,
};

// Every failure raised by the core library. The C API maps `kind()` onto
// its status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(const std::string& what) {
  throw Error(ErrorKind::kInvalidArgument, what);
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace specjudge
