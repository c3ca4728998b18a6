// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "pcfr/eval.hpp"
#include "pcfr/syntax.hpp"

namespace pcfr::testing {

inline SourceProgram corpus(const std::string& stem) {
  return load_source(std::string(PCFR_CORPUS_DIR) + "/" + stem + ".pcfr");
}

inline EvalConfig with_fuel(std::uint64_t fuel) {
  EvalConfig cfg;
  cfg.fuel = fuel;
  return cfg;
}

inline Program corpus_program(const std::string& stem) { return corpus(stem).program(); }

}  // namespace pcfr::testing
