/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace tsalink {

/// Failure categories shared by the C++ core and the C API status codes.
enum class ErrorCode {
  InvalidArgument = 1,
  Parse = 2,
  Domain = 3,
  Degenerate = 4,
  Numeric = 5,
  Io = 6,
  NoPairs = 7,
  Algebra = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::Domain, what) {}
};

class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what)
      : Error(ErrorCode::Degenerate, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCode::Numeric, what) {}
};

class AlgebraError : public Error {
 public:
  explicit AlgebraError(const std::string& what) : Error(ErrorCode::Algebra, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCode::Parse, what) {}
};

}  // namespace tsalink
