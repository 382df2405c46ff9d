#pragma once

#include <cmath>
#include <memory>
#include <utility>

#include "arenakit/builtins/toy_arena.hpp"
#include "arenakit/rng.hpp"

namespace arenakit::builtins {

/// 1-D walker on a bucketed line segment. Positions snap to bucket
/// centers so the bucket-level process is an exact finite MDP: a unit
/// velocity moves the walker by exactly one bucket.
struct LineWalkerState {
  int buckets = 41;
  double lo = -10.0, hi = 10.0;
  int bucket = 0;
  int target_bucket = 0;

  double bucket_width() const { return (hi - lo) / buckets; }
  double center(int b) const { return lo + (b + 0.5) * bucket_width(); }
  double x() const { return center(bucket); }
  double target() const { return center(target_bucket); }
  double distance() const { return std::abs(x() - target()); }
};

constexpr uint64_t kLineLayoutSalt = 0x11A1CULL;

/// eid determines the start bucket; the target is fixed at the middle
/// bucket so the underlying MDP is the same across episodes.
inline LineWalkerState line_walker_layout(int buckets, int64_t eid) {
  LineWalkerState s;
  s.buckets = buckets;
  s.target_bucket = buckets / 2;
  SplitMix64 rng(combine_seed({kLineLayoutSalt, static_cast<uint64_t>(eid)}));
  s.bucket = static_cast<int>(rng.next_below(static_cast<uint64_t>(buckets)));
  return s;
}

class LineWalkerSurface {
 public:
  virtual ~LineWalkerSurface() = default;
  virtual LineWalkerState& line_state() = 0;
};

/// Velocity primitive: a single f32 in [-1,1]; the walker moves by
/// round(v) buckets, clamped to the segment.
class VelocityTool : public ActionTool {
 public:
  VelocityTool() {
    CompositeSpace c;
    c.children["velocity"] = ActionSpace::box({1}, -1.f, 1.f);
    space_ = ActionSpace(std::move(c));
  }

  std::string name() const override { return "velocity"; }
  const ActionSpace& action_space() const override { return space_; }

  Action no_op() const override {
    Action a;
    a.primitives["velocity"] = make_tensor_f32({1}, {0.f});
    return a;
  }

  Tree step(Arena& arena, const Action& action) override {
    auto* surface = dynamic_cast<LineWalkerSurface*>(&arena);
    if (!surface)
      throw CapabilityError("velocity tool requires a line-walker arena, got '" +
                            arena.name() + "'");
    LineWalkerState& s = surface->line_state();
    float v = action.primitives.at("velocity").as<float>()[0];
    int delta = static_cast<int>(std::lround(v));
    s.bucket = std::max(0, std::min(s.buckets - 1, s.bucket + delta));
    return {};
  }

 private:
  ActionSpace space_;
};

/// Reach-the-target task: per-step reward is the negative distance to
/// the target; success when the walker sits on the target bucket.
class ReachTask : public Task {
 public:
  std::string name() const override { return "reach"; }

  bool success(Arena& arena) override {
    const LineWalkerState& s = state(arena);
    return s.bucket == s.target_bucket;
  }

  std::map<std::string, double> evaluate(Arena& arena,
                                         const std::vector<std::string>& metrics) override {
    const LineWalkerState& s = state(arena);
    auto* toy = dynamic_cast<ToyArena*>(&arena);
    std::map<std::string, double> all{
        {"distance", s.distance()},
        {"return", toy ? toy->episode_return() : 0.0},
        {"success", s.bucket == s.target_bucket ? 1.0 : 0.0}};
    if (metrics.empty()) return all;
    std::map<std::string, double> out;
    for (const std::string& m : metrics) {
      auto it = all.find(m);
      if (it == all.end())
        throw UsageError("unknown metric '" + m + "'; available: distance, return, success");
      out[m] = it->second;
    }
    return out;
  }

  std::map<std::string, double> reward(Arena& arena) override {
    return {{"task", -state(arena).distance()}};
  }

  Tree goal(Arena& arena) override {
    Tree g;
    g["x"] = Value(state(arena).target());
    return g;
  }

 private:
  static const LineWalkerState& state(Arena& arena) {
    auto* surface = dynamic_cast<LineWalkerSurface*>(&arena);
    if (!surface)
      throw CapabilityError("reach task requires a line-walker arena, got '" + arena.name() +
                            "'");
    return surface->line_state();
  }
};

class LineWalkerArena : public ToyArena, public LineWalkerSurface {
 public:
  explicit LineWalkerArena(int buckets = 41, int horizon = 20)
      : ToyArena("line-walker", std::make_shared<VelocityTool>(), horizon), buckets_(buckets) {
    state_ = line_walker_layout(buckets_, 0);
  }

  LineWalkerState& line_state() override { return state_; }

 protected:
  void reset_dynamics(int64_t eid) override { state_ = line_walker_layout(buckets_, eid); }

  Tree observe() override {
    Tree obs;
    obs["x"] = Value(state_.x());
    obs["bucket"] = Value(scalar_i64(state_.bucket));
    return obs;
  }

  Tensor render_frame() override {
    // one row of buckets, 4px per bucket: walker white, target gray
    const int cell = 4, h = cell, w = buckets_ * cell;
    Tensor img = zeros(Dtype::U8, {h, w, 3});
    auto& buf = img.as<uint8_t>();
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        int b = c / cell;
        uint8_t v = b == state_.bucket ? 255 : (b == state_.target_bucket ? 128 : 16);
        for (int ch = 0; ch < 3; ++ch) buf[(r * w + c) * 3 + ch] = v;
      }
    return img;
  }

  std::pair<std::string, std::shared_ptr<const void>> oracle_handle() override {
    return {"line-walker", std::make_shared<const LineWalkerState>(state_)};
  }

 private:
  int buckets_;
  LineWalkerState state_;
};

}  // namespace arenakit::builtins
