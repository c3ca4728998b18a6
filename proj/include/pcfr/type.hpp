// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace pcfr {

enum class TypeKind { Real, Arrow, Product };

class TypeNode;
using Type = std::shared_ptr<const TypeNode>;

/// PCF_R type: R, A -> B, or a k-ary product. Unary products never exist;
/// `product({A})` returns A itself.
class TypeNode {
 public:
  TypeKind kind() const { return kind_; }
  bool is_real() const { return kind_ == TypeKind::Real; }
  bool is_arrow() const { return kind_ == TypeKind::Arrow; }
  bool is_product() const { return kind_ == TypeKind::Product; }

  const Type& domain() const { return parts_[0]; }
  const Type& codomain() const { return parts_[1]; }
  std::span<const Type> components() const { return parts_; }
  std::size_t width() const { return parts_.size(); }

  struct Private;
  TypeNode(const Private&, TypeKind kind, std::vector<Type> parts)
      : kind_(kind), parts_(std::move(parts)) {}

 private:
  TypeKind kind_;
  std::vector<Type> parts_;
};

Type real_type();
Type arrow(Type domain, Type codomain);
Type product(std::vector<Type> components);
Type unit_type();
/// R^n, with R^1 = R and R^0 = 1.
Type real_power(std::size_t n);

bool type_equal(const Type& a, const Type& b);

/// True when `t` is R^m for some m (with R^1 = R); stores m.
bool is_ground_power(const Type& t, std::size_t* m = nullptr);

std::string to_string(const Type& t);
std::ostream& operator<<(std::ostream& os, const Type& t);

}  // namespace pcfr
