// SPDX-License-Identifier: Apache-2.0
#include "pcfr/error.hpp"

#include <sstream>

#include "pcfr/primitives.hpp"

namespace pcfr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteNumeral: return "NonFiniteNumeral";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonArrowFixType: return "NonArrowFixType";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::ArgumentTypeMismatch: return "ArgumentTypeMismatch";
    case ErrorCode::BranchTypeMismatch: return "BranchTypeMismatch";
    case ErrorCode::NonArrowApplication: return "NonArrowApplication";
    case ErrorCode::ProjOnNonProduct: return "ProjOnNonProduct";
    case ErrorCode::GuardNotReal: return "GuardNotReal";
    case ErrorCode::FixNotArrow: return "FixNotArrow";
    case ErrorCode::IllTyped: return "IllTyped";
    case ErrorCode::MissingPartials: return "MissingPartials";
    case ErrorCode::UnknownPrimitive: return "UnknownPrimitive";
    case ErrorCode::NotSimple: return "NotSimple";
    case ErrorCode::PrimDomainError: return "PrimDomainError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::string with_span(const std::string& message, SourceSpan span) {
  if (!span.known()) return message;
  std::ostringstream os;
  os << span.line << ":" << span.column << ": " << message;
  return os.str();
}

std::string domain_message(const std::string& symbol, const std::vector<double>& args) {
  std::string out = symbol + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += format_real(args[i]);
  }
  return out + ") is undefined";
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, SourceSpan span)
    : std::runtime_error(with_span(message, span)), code_(code), span_(span), detail_(message) {}

PrimDomainError::PrimDomainError(std::string symbol, std::vector<double> args)
    : Error(ErrorCode::PrimDomainError, domain_message(symbol, args)),
      symbol_(std::move(symbol)),
      args_(std::move(args)) {}

}  // namespace pcfr
