// SPDX-License-Identifier: Apache-2.0
#include "pcfr/typecheck.hpp"

#include <algorithm>

namespace pcfr {

TypingEnv TypingEnv::ground(std::span<const Name> names) {
  TypingEnv env;
  for (Name x : names) env.push(x, real_type());
  return env;
}

const Type* TypingEnv::lookup(Name x) const {
  for (auto it = bindings_.rbegin(); it != bindings_.rend(); ++it) {
    if (it->first == x) return &it->second;
  }
  return nullptr;
}

namespace {

class Checker {
 public:
  explicit Checker(TypingEnv env) : env_(std::move(env)) {}

  Type run(const Term& m) {
    switch (m->kind()) {
      case TermKind::Var: {
        if (const Type* t = env_.lookup(m->name())) return *t;
        fail(ErrorCode::UnboundVariable, "unbound variable " + m->name().str(), m);
      }
      case TermKind::Prim: {
        const Type expected = real_power(m->lanes());
        if (!m->is_numeral()) {
          for (const auto& a : m->kids()) {
            Type t = run(a);
            if (!type_equal(t, expected)) {
              fail(ErrorCode::ArgumentTypeMismatch,
                   "argument of " + m->prim()->name + " has type " + to_string(t) +
                       ", expected " + to_string(expected),
                   a);
            }
          }
        }
        return expected;
      }
      case TermKind::Lam: {
        env_.push(m->name(), m->binder_type());
        Type body = run(m->body());
        env_.pop();
        return arrow(m->binder_type(), body);
      }
      case TermKind::App: {
        Type f = run(m->fun());
        if (!f->is_arrow()) {
          fail(ErrorCode::NonArrowApplication,
               "applying a term of non-arrow type " + to_string(f), m);
        }
        Type a = run(m->arg());
        if (!type_equal(f->domain(), a)) {
          fail(ErrorCode::ArgumentTypeMismatch,
               "argument has type " + to_string(a) + ", expected " + to_string(f->domain()),
               m->arg());
        }
        return f->codomain();
      }
      case TermKind::Tuple: {
        std::vector<Type> parts;
        for (const auto& k : m->kids()) parts.push_back(run(k));
        return product(std::move(parts));
      }
      case TermKind::Proj: {
        Type t = run(m->body());
        if (!t->is_product() || t->width() != m->width()) {
          fail(ErrorCode::ProjOnNonProduct,
               "projection pi_" + std::to_string(m->index()) + "^" + std::to_string(m->width()) +
                   " applied to " + to_string(t),
               m);
        }
        return t->components()[m->index() - 1];
      }
      case TermKind::Cond: {
        Type g = run(m->guard());
        if (!g->is_real()) {
          fail(ErrorCode::GuardNotReal, "guard has type " + to_string(g), m->guard());
        }
        Type a = run(m->then_branch());
        Type b = run(m->else_branch());
        if (!type_equal(a, b)) {
          fail(ErrorCode::BranchTypeMismatch,
               "branches have types " + to_string(a) + " and " + to_string(b), m);
        }
        return a;
      }
      case TermKind::Fix: {
        const Type& t = m->binder_type();
        if (!t->is_arrow()) {
          fail(ErrorCode::FixNotArrow, "fixpoint at non-arrow type " + to_string(t), m);
        }
        env_.push(m->name(), t);
        Type body = run(m->body());
        env_.pop();
        if (!type_equal(body, t)) {
          fail(ErrorCode::FixNotArrow,
               "fixpoint body has type " + to_string(body) + ", expected " + to_string(t), m);
        }
        return t;
      }
    }
    fail(ErrorCode::IllTyped, "unknown term", m);
  }

 private:
  [[noreturn]] void fail(ErrorCode code, const std::string& msg, const Term& at) {
    throw TypeError(code, msg, at->span());
  }

  TypingEnv env_;
};

}  // namespace

Type infer(const TypingEnv& env, const Term& m) { return Checker(env).run(m); }

std::optional<Type> try_infer(const TypingEnv& env, const Term& m) {
  try {
    return infer(env, m);
  } catch (const TypeError&) {
    return std::nullopt;
  }
}

Program make_program(Term body) {
  auto params = free_vars(body);
  return Program{std::move(body), std::move(params)};
}

Program make_program(Term body, std::vector<Name> params) {
  return Program{std::move(body), std::move(params)};
}

std::optional<std::size_t> program_coarity(const Program& p) {
  auto t = try_infer(TypingEnv::ground(p.params), p.body);
  std::size_t m = 0;
  if (!t || !is_ground_power(*t, &m)) return std::nullopt;
  return m;
}

bool check_program(const Program& p, std::size_t m) {
  auto got = program_coarity(p);
  return got && *got == m;
}

bool check_program(const Term& m, std::size_t n, std::size_t coarity) {
  auto params = free_vars(m);
  if (params.size() > n) return false;
  while (params.size() < n) params.push_back(Name::fresh(Name("x")));
  return check_program(Program{m, std::move(params)}, coarity);
}

}  // namespace pcfr
