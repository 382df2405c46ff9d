#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "arenakit/agent.hpp"
#include "arenakit/arena.hpp"
#include "arenakit/builtins/line_walker.hpp"
#include "arenakit/builtins/tile_world.hpp"

namespace arenakit::builtins {

namespace detail {

inline int64_t state_int(const Tree& st, const std::string& key, int64_t fallback) {
  auto v = value_get(st, {key});
  return v && v->is_tensor() ? v->tensor().as<int64_t>()[0] : fallback;
}

inline double info_reward(const Information& info) {
  auto v = value_get(info.root, {"reward", "task"});
  if (!v || !v->is_scalar()) throw ProtocolError("information carries no task reward");
  return v->scalar();
}

inline bool info_success(const Information& info) {
  auto v = value_get(info.root, {"evaluation", "success"});
  return v && v->is_scalar() && v->scalar() == 1.0;
}

}  // namespace detail

/// Uniform random policy over the arena's action space. Draws are a
/// pure function of (seed, arena_id, eid, step) so batched and
/// sequential execution produce identical trials.
class RandomAgent : public Agent {
 public:
  explicit RandomAgent(Config config = Config()) : Agent(std::move(config)) { name_ = "random"; }

  std::vector<bool> init(const std::vector<Information>& informations) override {
    Agent::init(informations);
    for (const Information& info : informations)
      internal_states_[info.arena_id()]["step"] = Value(scalar_i64(0));
    return std::vector<bool>(informations.size(), true);
  }

  std::vector<Action> act(const std::vector<Information>& informations, bool update) override {
    std::vector<Action> out;
    out.reserve(informations.size());
    for (const Information& info : informations) {
      ArenaId id = info.arena_id();
      require_tracked(id);
      if (!info.action_space) throw ProtocolError("random agent needs an attached action space");
      Tree& st = internal_states_[id];
      int64_t step = detail::state_int(st, "step", 0);
      uint64_t seed = combine_seed({seed_, static_cast<uint64_t>(id),
                                    static_cast<uint64_t>(info.eid()),
                                    static_cast<uint64_t>(step)});
      out.push_back(value_to_action(space_sample(*info.action_space, seed)));
      if (update) st["step"] = Value(scalar_i64(step + 1));
    }
    return out;
  }
};

/// Oracle for the tile world: reads the true grid from the oracle
/// handle at init, plans greedily (one misplaced tile per step,
/// row-major tie-break) and replays the plan.
class OracleTileAgent : public Agent {
 public:
  explicit OracleTileAgent(Config config = Config()) : Agent(std::move(config)) {
    name_ = "oracle-tile";
  }

  std::vector<bool> init(const std::vector<Information>& informations) override {
    Agent::init(informations);
    for (const Information& info : informations) {
      if (info.oracle_kind != "tile-world" || !info.oracle)
        throw CapabilityError("oracle-tile agent requires a tile-world oracle handle");
      const auto* state = static_cast<const TileWorldState*>(info.oracle.get());
      ValueList plan;
      for (auto [stray, hole] : plan_tile_world(*state)) {
        auto [pr, pc] = tile_cell_center(*state, stray);
        auto [qr, qc] = tile_cell_center(*state, hole);
        plan.push_back(Value(make_tensor_f32({2, 2}, {pr, pc, qr, qc})));
      }
      Tree& st = internal_states_[info.arena_id()];
      st["plan"] = Value(std::move(plan));
      st["next"] = Value(scalar_i64(0));
    }
    return std::vector<bool>(informations.size(), true);
  }

  std::vector<Action> act(const std::vector<Information>& informations, bool update) override {
    std::vector<Action> out;
    for (const Information& info : informations) {
      ArenaId id = info.arena_id();
      require_tracked(id);
      Tree& st = internal_states_[id];
      auto plan = value_get(st, {"plan"});
      if (!plan) throw ProtocolError("oracle-tile agent was not initialised for arena " +
                                     std::to_string(id));
      int64_t next = detail::state_int(st, "next", 0);
      Action a;
      if (next < static_cast<int64_t>(plan->list().size())) {
        const Tensor& move = plan->list()[next].tensor();
        const auto& d = move.as<float>();
        a.primitives["pick_0"] = make_tensor_f32({2}, {d[0], d[1]});
        a.primitives["place_0"] = make_tensor_f32({2}, {d[2], d[3]});
        if (update) st["next"] = Value(scalar_i64(next + 1));
      } else {
        a.primitives["pick_0"] = make_tensor_f32({2}, {0.f, 0.f});
        a.primitives["place_0"] = make_tensor_f32({2}, {0.f, 0.f});
      }
      out.push_back(std::move(a));
    }
    return out;
  }

  std::map<ArenaId, bool> success() const override {
    std::map<ArenaId, bool> out;
    for (const auto& [id, st] : internal_states_) {
      auto plan = value_get(st, {"plan"});
      out[id] = plan && detail::state_int(st, "next", 0) >=
                            static_cast<int64_t>(plan->list().size());
    }
    return out;
  }
};

/// Tabular Q-learning on the bucketed line walker. Three actions
/// (left, stay, right); epsilon-greedy while training, greedy in eval
/// mode with ties broken toward the lowest action index.
class TabularQAgent : public TrainableAgent {
 public:
  static constexpr int kActions = 3;

  explicit TabularQAgent(Config config) : TrainableAgent(std::move(config)) {
    name_ = "tabular-q";
    buckets_ = static_cast<int>(config_.get_int("buckets", 41));
    alpha_ = config_.get_double("alpha", 0.1);
    gamma_ = config_.get_double("gamma", 0.95);
    epsilon_ = config_.get_double("epsilon", 0.1);
    alpha_decay_ = config_.get_double("alpha_decay", 0.0);
    q_.assign(static_cast<size_t>(buckets_) * kActions, 0.f);
    visits_.assign(q_.size(), 0);
  }

  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  double epsilon() const { return epsilon_; }
  int buckets() const { return buckets_; }

  float q_value(int bucket, int action) const { return q_[bucket * kActions + action]; }

  int greedy_action(int bucket) const {
    int best = 0;
    for (int a = 1; a < kActions; ++a)
      if (q_[bucket * kActions + a] > q_[bucket * kActions + best]) best = a;
    return best;
  }

  std::vector<bool> init(const std::vector<Information>& informations) override {
    Agent::init(informations);
    for (const Information& info : informations) {
      Tree& st = internal_states_[info.arena_id()];
      st["bucket"] = Value(scalar_i64(bucket_of(info)));
      st["step"] = Value(scalar_i64(0));
    }
    return std::vector<bool>(informations.size(), true);
  }

  std::vector<Action> act(const std::vector<Information>& informations, bool update) override {
    std::vector<Action> out;
    for (const Information& info : informations) {
      ArenaId id = info.arena_id();
      require_tracked(id);
      Tree& st = internal_states_[id];
      int bucket = bucket_of(info);
      if (update && training_ && value_get(st, {"prev_action"}))
        apply_backup(st, info);
      int64_t step = detail::state_int(st, "step", 0);
      int a;
      if (training_ && epsilon_ > 0.0) {
        SplitMix64 rng(combine_seed({seed_, 0xE5u, static_cast<uint64_t>(id),
                                     static_cast<uint64_t>(info.eid()),
                                     static_cast<uint64_t>(step)}));
        a = rng.next_double() < epsilon_ ? static_cast<int>(rng.next_below(kActions))
                                         : greedy_action(bucket);
      } else {
        a = greedy_action(bucket);
      }
      if (update) {
        st["bucket"] = Value(scalar_i64(bucket));
        if (training_) st["prev_action"] = Value(scalar_i64(a));
        st["step"] = Value(scalar_i64(step + 1));
      }
      out.push_back(action_for(a));
    }
    return out;
  }

  std::vector<bool> update(const std::vector<Information>& informations,
                           const std::vector<Action>& actions) override {
    TrainableAgent::update(informations, actions);
    if (training_) {
      for (size_t i = 0; i < informations.size(); ++i) {
        Tree& st = internal_states_[informations[i].arena_id()];
        st["prev_action"] = Value(scalar_i64(action_index(actions[i])));
        apply_backup(st, informations[i]);
      }
    }
    return std::vector<bool>(informations.size(), true);
  }

  /// One update step per environment step on the first provided arena.
  bool train(int64_t update_steps, const std::vector<Arena*>& arenas = {}) override {
    if (update_steps <= 0) throw UsageError("train: update_steps must be positive");
    if (!training_) throw UsageError("train called on an agent in eval mode");
    if (arenas.empty() || arenas[0] == nullptr) return false;
    Arena& arena = *arenas[0];
    episode_live_ = false;  // the arena may have been used since the last chunk
    SplitMix64 rng(combine_seed({seed_, 0x7Au, static_cast<uint64_t>(update_steps_)}));

    for (int64_t i = 0; i < update_steps; ++i) {
      if (!episode_live_) {
        Information info = arena.reset();
        episode_bucket_ = bucket_of(info);
        episode_live_ = true;
        episode_return_ = 0.0;
      }
      int a = rng.next_double() < epsilon_ ? static_cast<int>(rng.next_below(kActions))
                                           : greedy_action(episode_bucket_);
      Information next = arena.step(action_for(a));
      double r = detail::info_reward(next);
      int next_bucket = bucket_of(next);
      bool terminal = detail::info_success(next);
      double td = backup(episode_bucket_, a, r, next_bucket, terminal);
      episode_return_ += r;
      episode_bucket_ = next_bucket;
      bump_update_steps();
      train_writer_.add_scalar(update_steps_, "td_error", std::abs(td));
      if (next.done()) {
        episode_live_ = false;
        train_writer_.add_scalar(update_steps_, "return", episode_return_);
      }
    }
    return true;
  }

 protected:
  std::map<std::string, Tensor> export_params() const override {
    Tensor q = make_tensor_f32({buckets_, kActions}, q_);
    std::map<std::string, Tensor> out;
    out["q_table"] = std::move(q);
    out["visits"] = make_tensor_i64({buckets_, kActions}, visits_);
    return out;
  }

  void import_params(const std::map<std::string, Tensor>& params, int64_t) override {
    const Tensor& q = params.at("q_table");
    const Tensor& v = params.at("visits");
    if (q.shape != std::vector<int64_t>{buckets_, kActions})
      throw SchemaError("q_table shape does not match the configured bucket count");
    q_ = q.as<float>();
    visits_ = v.as<int64_t>();
  }

 private:
  static int action_index(const Action& a) {
    float v = a.primitives.at("velocity").as<float>()[0];
    return static_cast<int>(std::lround(v)) + 1;
  }

  static Action action_for(int a) {
    Action out;
    out.primitives["velocity"] = make_tensor_f32({1}, {static_cast<float>(a - 1)});
    return out;
  }

  int bucket_of(const Information& info) const {
    auto v = value_get(info.root, {"observation", "bucket"});
    if (!v || !v->is_tensor())
      throw ProtocolError("tabular-q agent needs a 'bucket' observation");
    int b = static_cast<int>(v->tensor().as<int64_t>()[0]);
    if (b < 0 || b >= buckets_) throw ProtocolError("observation bucket out of range");
    return b;
  }

  double effective_alpha(size_t idx) {
    return alpha_decay_ > 0.0 ? alpha_ / (1.0 + alpha_decay_ * visits_[idx]) : alpha_;
  }

  /// One-step Q backup; returns the TD error.
  double backup(int s, int a, double r, int s_next, bool terminal) {
    size_t idx = static_cast<size_t>(s) * kActions + a;
    double target = r;
    if (!terminal) target += gamma_ * q_[s_next * kActions + greedy_action(s_next)];
    double td = target - q_[idx];
    q_[idx] = static_cast<float>(q_[idx] + effective_alpha(idx) * td);
    ++visits_[idx];
    return td;
  }

  void apply_backup(Tree& st, const Information& info) {
    auto prev_a = value_get(st, {"prev_action"});
    if (!prev_a) return;
    int s = static_cast<int>(detail::state_int(st, "bucket", 0));
    int a = static_cast<int>(prev_a->tensor().as<int64_t>()[0]);
    double r = detail::info_reward(info);
    int s_next = bucket_of(info);
    backup(s, a, r, s_next, detail::info_success(info));
    st["bucket"] = Value(scalar_i64(s_next));
    st.erase("prev_action");
  }

  int buckets_;
  double alpha_, gamma_, epsilon_, alpha_decay_;
  std::vector<float> q_;
  std::vector<int64_t> visits_;
  bool episode_live_ = false;
  int episode_bucket_ = 0;
  double episode_return_ = 0.0;
};

}  // namespace arenakit::builtins
