#pragma once

#include <map>
#include <string>
#include <variant>

#include "arenakit/rng.hpp"
#include "arenakit/value.hpp"

namespace arenakit {

class ActionSpace;

/// Continuous box with per-element f32 bounds; low <= high elementwise.
struct BoxSpace {
  Tensor low;
  Tensor high;
};

struct DiscreteSpace {
  int64_t n = 1;
};

struct CompositeSpace {
  std::map<std::string, ActionSpace> children;
};

class ActionSpace {
 public:
  using Variant = std::variant<BoxSpace, DiscreteSpace, CompositeSpace>;

  ActionSpace() : v_(DiscreteSpace{1}) {}
  ActionSpace(BoxSpace b) : v_(std::move(b)) { validate(); }
  ActionSpace(DiscreteSpace d) : v_(d) { validate(); }
  ActionSpace(CompositeSpace c) : v_(std::move(c)) { validate(); }

  static ActionSpace box(std::vector<int64_t> shape, float lo, float hi) {
    size_t n = static_cast<size_t>(Tensor::numel_of(shape));
    BoxSpace b;
    b.low = make_tensor_f32(shape, std::vector<float>(n, lo));
    b.high = make_tensor_f32(std::move(shape), std::vector<float>(n, hi));
    return ActionSpace(std::move(b));
  }

  bool is_box() const { return std::holds_alternative<BoxSpace>(v_); }
  bool is_discrete() const { return std::holds_alternative<DiscreteSpace>(v_); }
  bool is_composite() const { return std::holds_alternative<CompositeSpace>(v_); }

  const BoxSpace& box() const { return std::get<BoxSpace>(v_); }
  const DiscreteSpace& discrete() const { return std::get<DiscreteSpace>(v_); }
  const CompositeSpace& composite() const { return std::get<CompositeSpace>(v_); }

 private:
  void validate() const {
    if (is_box()) {
      const auto& b = std::get<BoxSpace>(v_);
      if (b.low.shape != b.high.shape) throw UsageError("box bounds shape mismatch");
      for (int64_t i = 0; i < b.low.numel(); ++i)
        if (b.low.at(i) > b.high.at(i)) throw UsageError("box low > high");
    } else if (is_discrete()) {
      if (std::get<DiscreteSpace>(v_).n <= 0) throw UsageError("discrete n must be positive");
    } else {
      if (std::get<CompositeSpace>(v_).children.empty())
        throw UsageError("composite space must be non-empty");
    }
  }

  Variant v_;
};

/// Uniform sample. Box -> f32 tensor elementwise uniform in [low, high];
/// Discrete -> scalar i64 tensor in [0, n); Composite -> Tree of child
/// samples, drawn in key order.
inline Value space_sample(const ActionSpace& space, SplitMix64& rng) {
  if (space.is_box()) {
    const auto& b = space.box();
    std::vector<float> out(static_cast<size_t>(b.low.numel()));
    for (size_t i = 0; i < out.size(); ++i)
      out[i] = static_cast<float>(rng.next_uniform(b.low.at(i), b.high.at(i)));
    return make_tensor_f32(b.low.shape, std::move(out));
  }
  if (space.is_discrete()) {
    return scalar_i64(static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(space.discrete().n))));
  }
  Tree t;
  for (const auto& [k, child] : space.composite().children) t[k] = space_sample(child, rng);
  return Value(std::move(t));
}

/// Pure function of (space, seed); two calls with equal arguments yield
/// bitwise-equal results.
inline Value space_sample(const ActionSpace& space, uint64_t seed) {
  SplitMix64 rng(seed);
  return space_sample(space, rng);
}

inline bool space_contains(const ActionSpace& space, const Value& v) {
  if (space.is_box()) {
    if (!v.is_tensor()) return false;
    const Tensor& t = v.tensor();
    const auto& b = space.box();
    if (t.shape != b.low.shape) return false;
    if (!t.all_finite()) return false;
    for (int64_t i = 0; i < t.numel(); ++i)
      if (t.at(i) < b.low.at(i) || t.at(i) > b.high.at(i)) return false;
    return true;
  }
  if (space.is_discrete()) {
    int64_t idx;
    if (v.is_tensor() && v.tensor().dtype == Dtype::I64 && v.tensor().numel() == 1)
      idx = v.tensor().as<int64_t>()[0];
    else if (v.is_scalar() && v.scalar() == static_cast<int64_t>(v.scalar()))
      idx = static_cast<int64_t>(v.scalar());
    else
      return false;
    return idx >= 0 && idx < space.discrete().n;
  }
  if (!v.is_tree()) return false;
  const Tree& t = v.tree();
  const auto& children = space.composite().children;
  if (t.size() != children.size()) return false;
  for (const auto& [k, child] : children) {
    auto it = t.find(k);
    if (it == t.end() || !space_contains(child, it->second)) return false;
  }
  return true;
}

}  // namespace arenakit
