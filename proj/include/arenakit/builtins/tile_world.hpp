#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "arenakit/builtins/toy_arena.hpp"
#include "arenakit/rng.hpp"

namespace arenakit::builtins {

/// Grid of tile counts. A cell holds 0 tiles (a hole), 1 tile (flat,
/// the target state) or 2 tiles (a stray sits on top). An episode
/// starts with `misplaced_init` holes and as many strays; coverage is
/// the fraction of cells holding at least one tile.
struct TileWorldState {
  int grid_size = 8;
  int misplaced_init = 3;
  std::vector<uint8_t> tiles;  // row-major counts

  int cells() const { return grid_size * grid_size; }

  double coverage() const {
    int covered = 0;
    for (uint8_t c : tiles) covered += c > 0;
    return static_cast<double>(covered) / cells();
  }

  std::vector<int> holes() const {
    std::vector<int> out;
    for (int i = 0; i < cells(); ++i)
      if (tiles[i] == 0) out.push_back(i);
    return out;
  }

  std::vector<int> strays() const {
    std::vector<int> out;
    for (int i = 0; i < cells(); ++i)
      if (tiles[i] >= 2) out.push_back(i);
    return out;
  }
};

constexpr uint64_t kTileLayoutSalt = 0x7131E5ULL;

/// eid -> initial layout: the first `misplaced_init` cells of a PRNG
/// permutation become holes, the next `misplaced_init` cells receive
/// the displaced tiles. Depends on the eid only.
inline TileWorldState tile_world_layout(int grid_size, int misplaced_init, int64_t eid) {
  TileWorldState s;
  s.grid_size = grid_size;
  s.misplaced_init = misplaced_init;
  s.tiles.assign(static_cast<size_t>(s.cells()), 1);
  std::vector<int> perm(static_cast<size_t>(s.cells()));
  for (int i = 0; i < s.cells(); ++i) perm[i] = i;
  SplitMix64 rng(combine_seed({kTileLayoutSalt, static_cast<uint64_t>(eid)}));
  for (int i = s.cells() - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.next_below(static_cast<uint64_t>(i + 1))]);
  for (int i = 0; i < misplaced_init; ++i) {
    s.tiles[perm[i]] = 0;
    s.tiles[perm[misplaced_init + i]] = 2;
  }
  return s;
}

/// State surface required by the pick-place tool and flattening task.
class TileWorldSurface {
 public:
  virtual ~TileWorldSurface() = default;
  virtual TileWorldState& tile_state() = 0;
};

inline int tile_cell_of(const TileWorldState& s, float row_frac, float col_frac) {
  auto clamp_idx = [&](float f) {
    int i = static_cast<int>(f * s.grid_size);
    if (i < 0) i = 0;
    if (i >= s.grid_size) i = s.grid_size - 1;
    return i;
  };
  return clamp_idx(row_frac) * s.grid_size + clamp_idx(col_frac);
}

/// Normalized coordinates of a cell's center, as (row, col) fractions.
inline std::pair<float, float> tile_cell_center(const TileWorldState& s, int cell) {
  int r = cell / s.grid_size, c = cell % s.grid_size;
  return {(r + 0.5f) / s.grid_size, (c + 0.5f) / s.grid_size};
}

/// pick moves one tile from a stacked cell to the place cell;
/// pick == place is a no-op; picking a flat or empty cell is a
/// recorded miss, not an error.
inline bool tile_world_apply(TileWorldState& s, int pick_cell, int place_cell) {
  if (pick_cell == place_cell) return true;
  if (s.tiles[pick_cell] < 2) return false;  // miss
  --s.tiles[pick_cell];
  ++s.tiles[place_cell];
  return true;
}

/// Greedy plan: pair the i-th stray with the i-th hole, both in
/// row-major order. Solves k misplaced tiles in exactly k moves.
inline std::vector<std::pair<int, int>> plan_tile_world(const TileWorldState& s) {
  std::vector<int> strays = s.strays();
  std::vector<int> holes = s.holes();
  std::vector<std::pair<int, int>> plan;
  for (size_t i = 0; i < strays.size() && i < holes.size(); ++i)
    plan.emplace_back(strays[i], holes[i]);
  return plan;
}

/// Normalized-pixel pick-and-place primitive with k pickers
/// (pick_i/place_i, coordinates in [0,1]^2 as row/col fractions).
class PickPlaceTool : public ActionTool {
 public:
  explicit PickPlaceTool(int pickers = 1) : pickers_(pickers) {
    CompositeSpace c;
    for (int i = 0; i < pickers_; ++i) {
      c.children["pick_" + std::to_string(i)] = ActionSpace::box({2}, 0.f, 1.f);
      c.children["place_" + std::to_string(i)] = ActionSpace::box({2}, 0.f, 1.f);
    }
    space_ = ActionSpace(std::move(c));
  }

  std::string name() const override { return "pixel-pick-and-place"; }
  const ActionSpace& action_space() const override { return space_; }

  Action no_op() const override {
    // zero-displacement move at the corner cell
    Action a;
    for (int i = 0; i < pickers_; ++i) {
      a.primitives["pick_" + std::to_string(i)] = make_tensor_f32({2}, {0.f, 0.f});
      a.primitives["place_" + std::to_string(i)] = make_tensor_f32({2}, {0.f, 0.f});
    }
    return a;
  }

  Tree step(Arena& arena, const Action& action) override {
    auto* surface = dynamic_cast<TileWorldSurface*>(&arena);
    if (!surface)
      throw CapabilityError("pick-place tool requires a tile-grid arena, got '" +
                            arena.name() + "'");
    TileWorldState& s = surface->tile_state();
    bool miss = false;
    for (int i = 0; i < pickers_; ++i) {
      const Tensor& pick = action.primitives.at("pick_" + std::to_string(i));
      const Tensor& place = action.primitives.at("place_" + std::to_string(i));
      int pick_cell = tile_cell_of(s, pick.as<float>()[0], pick.as<float>()[1]);
      int place_cell = tile_cell_of(s, place.as<float>()[0], place.as<float>()[1]);
      if (!tile_world_apply(s, pick_cell, place_cell)) miss = true;
    }
    Tree flags;
    if (miss) flags["no_pick"] = Value(true);
    return flags;
  }

 private:
  int pickers_;
  ActionSpace space_;
};

/// Coverage task mirroring a fabric-flattening interface.
class FlatteningTask : public Task {
 public:
  std::string name() const override { return "flattening"; }

  bool success(Arena& arena) override { return state(arena).coverage() >= 1.0; }

  std::map<std::string, double> evaluate(Arena& arena,
                                         const std::vector<std::string>& metrics) override {
    const TileWorldState& s = state(arena);
    std::map<std::string, double> all{{"coverage", s.coverage()},
                                      {"success", s.coverage() >= 1.0 ? 1.0 : 0.0}};
    if (metrics.empty()) return all;
    std::map<std::string, double> out;
    for (const std::string& m : metrics) {
      auto it = all.find(m);
      if (it == all.end())
        throw UsageError("unknown metric '" + m + "'; available: coverage, success");
      out[m] = it->second;
    }
    return out;
  }

  std::map<std::string, double> reward(Arena& arena) override {
    return {{"task", state(arena).coverage()}};
  }

  Tree goal(Arena&) override {
    Tree g;
    g["coverage"] = Value(1.0);
    return g;
  }

 private:
  static const TileWorldState& state(Arena& arena) {
    auto* surface = dynamic_cast<TileWorldSurface*>(&arena);
    if (!surface)
      throw CapabilityError("flattening task requires a tile-grid arena, got '" +
                            arena.name() + "'");
    return surface->tile_state();
  }
};

/// Deterministic flattening stand-in: an 8x8 grid of tiles rendered as
/// flat RGB blocks, driven by normalized pick-and-place actions.
class TileWorldArena : public ToyArena, public TileWorldSurface {
 public:
  static constexpr int kCellPixels = 8;

  TileWorldArena(int grid_size = 8, int misplaced_init = 3, int pickers = 1, int horizon = 3)
      : ToyArena("tile-world", std::make_shared<PickPlaceTool>(pickers), horizon),
        grid_size_(grid_size),
        misplaced_init_(misplaced_init) {
    state_ = tile_world_layout(grid_size_, misplaced_init_, 0);
  }

  TileWorldState& tile_state() override { return state_; }

 protected:
  void reset_dynamics(int64_t eid) override {
    state_ = tile_world_layout(grid_size_, misplaced_init_, eid);
  }

  Tree observe() override {
    Tree obs;
    obs["rgb"] = Value(render_frame());
    return obs;
  }

  Tensor render_frame() override {
    const int px = grid_size_ * kCellPixels;
    Tensor img = zeros(Dtype::U8, {px, px, 3});
    auto& buf = img.as<uint8_t>();
    for (int r = 0; r < px; ++r)
      for (int c = 0; c < px; ++c) {
        uint8_t count = state_.tiles[(r / kCellPixels) * grid_size_ + c / kCellPixels];
        uint8_t rgb[3];
        if (count == 0) {
          rgb[0] = rgb[1] = rgb[2] = 0;  // hole
        } else if (count == 1) {
          rgb[0] = rgb[1] = rgb[2] = 255;  // flat
        } else {
          rgb[0] = 255;
          rgb[1] = rgb[2] = 64;  // stacked
        }
        for (int ch = 0; ch < 3; ++ch) buf[(r * px + c) * 3 + ch] = rgb[ch];
      }
    return img;
  }

  std::pair<std::string, std::shared_ptr<const void>> oracle_handle() override {
    return {"tile-world", std::make_shared<const TileWorldState>(state_)};
  }

 private:
  int grid_size_;
  int misplaced_init_;
  TileWorldState state_;
};

}  // namespace arenakit::builtins
