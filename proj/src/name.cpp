// SPDX-License-Identifier: Apache-2.0
#include "pcfr/name.hpp"

#include <atomic>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace pcfr {
namespace {

struct Interner {
  std::shared_mutex mutex;
  std::deque<std::string> texts{""};
  std::unordered_map<std::string, std::uint32_t> ids{{"", 0}};
  std::atomic<std::uint64_t> counter{0};

  std::uint32_t intern(std::string_view text) {
    {
      std::shared_lock lock(mutex);
      if (auto it = ids.find(std::string(text)); it != ids.end()) return it->second;
    }
    std::unique_lock lock(mutex);
    auto [it, inserted] = ids.emplace(std::string(text), static_cast<std::uint32_t>(texts.size()));
    if (inserted) texts.emplace_back(text);
    return it->second;
  }

  bool known(const std::string& text) {
    std::shared_lock lock(mutex);
    return ids.contains(text);
  }
};

Interner& interner() {
  static Interner instance;
  return instance;
}

}  // namespace

Name::Name(std::string_view text) : id_(interner().intern(text)) {}

const std::string& Name::str() const {
  auto& in = interner();
  std::shared_lock lock(in.mutex);
  return in.texts[id_];
}

Name Name::fresh(const Name& base) {
  std::string stem = base.str();
  // x'12 -> x
  if (auto tick = stem.find('\''); tick != std::string::npos) stem.resize(tick);
  if (stem.empty()) stem = "v";
  auto& in = interner();
  for (;;) {
    std::string candidate = stem + "'" + std::to_string(++in.counter);
    if (!in.known(candidate)) return Name(candidate);
  }
}

}  // namespace pcfr
