// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace pcfr {

/// Interned variable name. Comparison is by identity of the interned string.
class Name {
 public:
  Name() = default;
  explicit Name(std::string_view text);

  const std::string& str() const;
  std::uint32_t id() const { return id_; }

  /// A name derived from `base` that has never been handed out before.
  static Name fresh(const Name& base);

  friend bool operator==(Name a, Name b) { return a.id_ == b.id_; }
  friend auto operator<=>(Name a, Name b) { return a.id_ <=> b.id_; }

 private:
  std::uint32_t id_ = 0;
};

}  // namespace pcfr

template <>
struct std::hash<pcfr::Name> {
  std::size_t operator()(pcfr::Name n) const noexcept { return n.id(); }
};
