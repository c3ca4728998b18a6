// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pcfr {

/// Position of a node in the source text it was parsed from. Line 0 means
/// the node was built programmatically.
struct SourceSpan {
  std::uint32_t line = 0;
  std::uint32_t column = 0;

  bool known() const { return line != 0; }
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class ErrorCode {
  NonFiniteNumeral,
  IndexOutOfRange,
  NonArrowFixType,
  UnboundVariable,
  ArityMismatch,
  ArgumentTypeMismatch,
  BranchTypeMismatch,
  NonArrowApplication,
  ProjOnNonProduct,
  GuardNotReal,
  FixNotArrow,
  IllTyped,
  MissingPartials,
  UnknownPrimitive,
  NotSimple,
  PrimDomainError,
  ParseError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, SourceSpan span = {});

  ErrorCode code() const { return code_; }
  SourceSpan span() const { return span_; }
  /// The message without the position prefix.
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  SourceSpan span_;
  std::string detail_;
};

class TypeError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, SourceSpan span)
      : Error(ErrorCode::ParseError, message, span) {}
};

/// Raised when a primitive is applied outside its domain (the result would
/// be NaN or not finite).
class PrimDomainError : public Error {
 public:
  PrimDomainError(std::string symbol, std::vector<double> args);

  const std::string& symbol() const { return symbol_; }
  const std::vector<double>& args() const { return args_; }

 private:
  std::string symbol_;
  std::vector<double> args_;
};

}  // namespace pcfr
