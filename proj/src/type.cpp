// SPDX-License-Identifier: Apache-2.0
#include "pcfr/type.hpp"

#include <sstream>

namespace pcfr {

struct TypeNode::Private {};

Type real_type() {
  static const Type r = std::make_shared<const TypeNode>(TypeNode::Private{}, TypeKind::Real,
                                                         std::vector<Type>{});
  return r;
}

Type arrow(Type domain, Type codomain) {
  return std::make_shared<const TypeNode>(TypeNode::Private{}, TypeKind::Arrow,
                                          std::vector<Type>{std::move(domain), std::move(codomain)});
}

Type product(std::vector<Type> components) {
  if (components.size() == 1) return components.front();
  return std::make_shared<const TypeNode>(TypeNode::Private{}, TypeKind::Product,
                                          std::move(components));
}

Type unit_type() { return product({}); }

Type real_power(std::size_t n) { return product(std::vector<Type>(n, real_type())); }

bool type_equal(const Type& a, const Type& b) {
  if (a == b) return true;
  if (!a || !b || a->kind() != b->kind() || a->width() != b->width()) return false;
  for (std::size_t i = 0; i < a->width(); ++i) {
    if (!type_equal(a->components()[i], b->components()[i])) return false;
  }
  return true;
}

bool is_ground_power(const Type& t, std::size_t* m) {
  if (t->is_real()) {
    if (m) *m = 1;
    return true;
  }
  if (!t->is_product()) return false;
  for (const auto& c : t->components()) {
    if (!c->is_real()) return false;
  }
  if (m) *m = t->width();
  return true;
}

namespace {

void print(std::ostream& os, const Type& t, bool arrow_lhs) {
  switch (t->kind()) {
    case TypeKind::Real:
      os << "R";
      return;
    case TypeKind::Product: {
      std::size_t m = 0;
      if (t->width() == 0) {
        os << "1";
      } else if (is_ground_power(t, &m)) {
        os << "R^" << m;
      } else {
        os << "(";
        for (std::size_t i = 0; i < t->width(); ++i) {
          if (i) os << " * ";
          print(os, t->components()[i], true);
        }
        os << ")";
      }
      return;
    }
    case TypeKind::Arrow:
      if (arrow_lhs) os << "(";
      print(os, t->domain(), true);
      os << " -> ";
      print(os, t->codomain(), false);
      if (arrow_lhs) os << ")";
      return;
  }
}

}  // namespace

std::string to_string(const Type& t) {
  std::ostringstream os;
  print(os, t, false);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Type& t) {
  print(os, t, false);
  return os;
}

}  // namespace pcfr
