// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcfr/typecheck.hpp"

namespace pcfr {

/// Concrete syntax.
///
///   type  ::= R | R^k | 1 | type -> type | ( type * ... * type )
///   term  ::= \x:type. term | fix f:type. term
///           | if term then term else term      -- guard <= 0 selects then
///           | term + term | term - term | term * term | -term
///           | term term | <term, ...> | proj i k atom
///           | phi(term, ...) | phi^k(term, ...) | number | number^k | x
///
/// Primitive names are reserved. `-- ` starts a comment. Files may begin
/// with `def NAME = term;` definitions of closed terms and with pragmas
/// `-- args: x y` (parameter order) and `-- at: r1 r2` (sample points).
Term parse_term(std::string_view text, const PrimRegistry& reg = default_registry());
Type parse_type(std::string_view text);

/// Text that parses back to an alpha-equivalent term.
std::string print_term(const Term& t);

struct SourceProgram {
  std::string path;
  Term term;
  /// Parameters in order: the `args` pragma, otherwise the free variables.
  std::vector<Name> params;
  std::vector<std::vector<double>> sample_points;

  Program program() const { return make_program(term, params); }
  std::size_t arity() const { return params.size(); }
  /// Coarity when the term is a ground program, nothing otherwise.
  std::optional<std::size_t> coarity() const { return program_coarity(program()); }
};

SourceProgram parse_source(std::string_view text, std::string path = "<input>",
                           const PrimRegistry& reg = default_registry());
/// Throws Error(InvalidArgument) when the file cannot be read.
SourceProgram load_source(const std::filesystem::path& path,
                          const PrimRegistry& reg = default_registry());

}  // namespace pcfr
