// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pcfr {

/// A primitive function symbol phi : R^k -> R together with its partial
/// semantics and the names of its partial derivatives d_1 phi ... d_k phi.
///
/// `evaluate` may return NaN or a non-finite value to signal that the
/// argument lies outside the domain of the partial function.
struct PrimEntry {
  std::string name;
  std::size_t arity = 0;
  std::function<double(std::span<const double>)> evaluate;
  std::vector<std::string> partials;
  /// Admissibility contract: the symbol denotes an analytic function on an
  /// open domain. Documentation only; nothing checks it at runtime.
  bool analytic = true;
};

using Prim = std::shared_ptr<const PrimEntry>;

/// Symbol table of primitives. Besides explicit entries, the registry
/// resolves the scaled-power family `powc[c,k]` (x -> c * x^k, k an integer)
/// on demand, which closes `log` and `recip` under differentiation.
class PrimRegistry {
 public:
  PrimRegistry() = default;

  void add(PrimEntry entry);
  void set_family_enabled(bool enabled) { family_enabled_ = enabled; }

  /// Explicit entry or family member with this name, or null.
  Prim find(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name) != nullptr; }

  const std::map<std::string, Prim>& entries() const { return entries_; }

 private:
  std::map<std::string, Prim> entries_;
  bool family_enabled_ = false;
};

/// The shipped registry: add, sub, mul, neg, sin, cos, exp, log, recip and
/// the helper symbols their derivatives need.
const PrimRegistry& default_registry();

/// Name of the scaled-power family member c * x^k.
std::string powc_name(double c, int k);

struct RegistryViolation {
  std::string symbol;
  std::string message;
};

/// Checks closure under differentiation: every explicit entry lists exactly
/// `arity` partials, each naming a registered symbol of the same arity.
std::vector<RegistryViolation> registry_check(const PrimRegistry& reg);

/// Shortest decimal text that reads back to the same double.
std::string format_real(double value);

}  // namespace pcfr
