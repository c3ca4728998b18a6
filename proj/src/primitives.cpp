// SPDX-License-Identifier: Apache-2.0
#include "pcfr/primitives.hpp"

#include <charconv>
#include <cmath>

namespace pcfr {

std::string format_real(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string powc_name(double c, int k) {
  return "powc[" + format_real(c) + "," + std::to_string(k) + "]";
}

namespace {

std::optional<std::pair<double, int>> parse_powc(const std::string& name) {
  constexpr std::string_view prefix = "powc[";
  if (!name.starts_with(prefix) || !name.ends_with("]")) return std::nullopt;
  const char* first = name.data() + prefix.size();
  const char* last = name.data() + name.size() - 1;
  double c = 0;
  auto r1 = std::from_chars(first, last, c);
  if (r1.ec != std::errc{} || r1.ptr == last || *r1.ptr != ',') return std::nullopt;
  int k = 0;
  auto r2 = std::from_chars(r1.ptr + 1, last, k);
  if (r2.ec != std::errc{} || r2.ptr != last || !std::isfinite(c)) return std::nullopt;
  return std::make_pair(c, k);
}

Prim make_powc(double c, int k) {
  auto e = std::make_shared<PrimEntry>();
  e->name = powc_name(c, k);
  e->arity = 1;
  e->evaluate = [c, k](std::span<const double> a) { return c * std::pow(a[0], k); };
  const double dc = c * k;
  e->partials = {dc == 0.0 ? std::string("zero1") : powc_name(dc, k - 1)};
  return e;
}

template <typename F>
PrimEntry entry(std::string name, std::size_t arity, F f, std::vector<std::string> partials) {
  return PrimEntry{std::move(name), arity, std::function<double(std::span<const double>)>(f),
                   std::move(partials), true};
}

PrimRegistry build_default() {
  using S = std::span<const double>;
  PrimRegistry reg;
  reg.add(entry("add", 2, [](S a) { return a[0] + a[1]; }, {"one2", "one2"}));
  reg.add(entry("sub", 2, [](S a) { return a[0] - a[1]; }, {"one2", "mone2"}));
  reg.add(entry("mul", 2, [](S a) { return a[0] * a[1]; }, {"mul_d1", "mul_d2"}));
  reg.add(entry("neg", 1, [](S a) { return -a[0]; }, {"mone1"}));

  // derivative helpers
  reg.add(entry("mul_d1", 2, [](S a) { return a[1]; }, {"zero2", "one2"}));
  reg.add(entry("mul_d2", 2, [](S a) { return a[0]; }, {"one2", "zero2"}));
  reg.add(entry("zero2", 2, [](S) { return 0.0; }, {"zero2", "zero2"}));
  reg.add(entry("one2", 2, [](S) { return 1.0; }, {"zero2", "zero2"}));
  reg.add(entry("mone2", 2, [](S) { return -1.0; }, {"zero2", "zero2"}));
  reg.add(entry("zero1", 1, [](S) { return 0.0; }, {"zero1"}));
  reg.add(entry("one1", 1, [](S) { return 1.0; }, {"zero1"}));
  reg.add(entry("mone1", 1, [](S) { return -1.0; }, {"zero1"}));

  reg.add(entry("sin", 1, [](S a) { return std::sin(a[0]); }, {"cos"}));
  reg.add(entry("cos", 1, [](S a) { return std::cos(a[0]); }, {"nsin"}));
  reg.add(entry("nsin", 1, [](S a) { return -std::sin(a[0]); }, {"ncos"}));
  reg.add(entry("ncos", 1, [](S a) { return -std::cos(a[0]); }, {"sin"}));
  reg.add(entry("exp", 1, [](S a) { return std::exp(a[0]); }, {"exp"}));
  reg.add(entry("log", 1, [](S a) { return std::log(a[0]); }, {"recip"}));
  reg.add(entry("recip", 1, [](S a) { return 1.0 / a[0]; }, {powc_name(-1, -2)}));
  reg.set_family_enabled(true);
  return reg;
}

}  // namespace

void PrimRegistry::add(PrimEntry entry) {
  auto name = entry.name;
  entries_[name] = std::make_shared<const PrimEntry>(std::move(entry));
}

Prim PrimRegistry::find(const std::string& name) const {
  if (auto it = entries_.find(name); it != entries_.end()) return it->second;
  if (family_enabled_) {
    if (auto ck = parse_powc(name)) return make_powc(ck->first, ck->second);
  }
  return nullptr;
}

const PrimRegistry& default_registry() {
  static const PrimRegistry reg = build_default();
  return reg;
}

std::vector<RegistryViolation> registry_check(const PrimRegistry& reg) {
  std::vector<RegistryViolation> out;
  auto check = [&](const PrimEntry& e) {
    if (e.partials.size() != e.arity) {
      out.push_back({e.name, "partials length " + std::to_string(e.partials.size()) +
                                 " \xe2\x89\xa0 " + std::to_string(e.arity)});
    }
    for (const auto& p : e.partials) {
      auto d = reg.find(p);
      if (!d) {
        out.push_back({e.name, "unregistered derivative " + p});
      } else if (d->arity != e.arity) {
        out.push_back({e.name, "wrong-arity derivative " + p + " (arity " +
                                   std::to_string(d->arity) + ")"});
      }
    }
  };
  for (const auto& [name, e] : reg.entries()) {
    check(*e);
    // family members reachable in one step are generated, check them too
    for (const auto& p : e->partials) {
      if (!reg.entries().contains(p)) {
        if (auto d = reg.find(p)) check(*d);
      }
    }
  }
  return out;
}

}  // namespace pcfr
