#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arenakit/arena.hpp"
#include "arenakit/serialize.hpp"

namespace arenakit::builtins {

/// Episode-id partition shared by the built-in arenas:
/// train [0,100), eval [100,120), val [120,130).
struct EidRange {
  int64_t begin;
  int64_t end;
  int64_t size() const { return end - begin; }
};

inline EidRange eid_range(Mode mode) {
  switch (mode) {
    case Mode::Train: return {0, 100};
    case Mode::Eval: return {100, 120};
    case Mode::Val: return {120, 130};
  }
  return {0, 0};
}

/// Common reset/step pipeline for the deterministic toy arenas: eid
/// resolution, task/tool delegation, reward and evaluation assembly,
/// frame capture and step logging.
class ToyArena : public Arena {
 public:
  ToyArena(std::string name, std::shared_ptr<ActionTool> tool, int horizon)
      : tool_(std::move(tool)), horizon_(horizon) {
    name_ = std::move(name);
  }

  Information reset(std::optional<EpisodeConfig> episode_config = std::nullopt) override {
    EpisodeConfig cfg = episode_config.value_or(EpisodeConfig{});
    EidRange range = eid_range(mode_);
    int64_t eid;
    if (cfg.eid) {
      eid = *cfg.eid;
      if (eid < range.begin || eid >= range.end)
        throw ConfigError("eid " + std::to_string(eid) + " outside the " +
                          std::string(mode_name(mode_)) + " range [" +
                          std::to_string(range.begin) + "," + std::to_string(range.end) + ")");
    } else if (random_reset_) {
      eid = range.begin + static_cast<int64_t>(eid_rng_.next_below(static_cast<uint64_t>(range.size())));
    } else {
      eid = range.begin;  // deterministic fallback
    }

    current_eid_ = eid;
    save_video_ = cfg.save_video;
    step_count_ = 0;
    done_ = false;
    episode_active_ = true;
    episode_return_ = 0.0;
    reset_dynamics(eid);
    task_->reset(*this);
    tool_->reset(*this);
    clear_frames();
    if (save_video_) frames_.push_back(render_frame());
    return make_information(/*include_reward=*/false, Tree{});
  }

  Information step(const Action& action) override {
    if (!episode_active_) throw ProtocolError("step called before reset");
    if (done_) throw ProtocolError("step called after episode is done");
    for (const auto& [k, t] : action.primitives)
      if (!t.all_finite()) throw UsageError("action primitive '" + k + "' is not finite");
    if (!space_contains(tool_->action_space(), action_to_value(action)))
      throw UsageError("action rejected: outside the arena's action space");

    Tree flags = tool_->step(*this, action);
    ++step_count_;
    auto rewards = task_->reward(*this);
    auto it = rewards.find("task");
    if (it != rewards.end()) episode_return_ += it->second;
    done_ = task_->success(*this) || step_count_ >= action_horizon();

    Information info = make_information(/*include_reward=*/true, std::move(flags));
    if (save_video_) frames_.push_back(render_frame());
    if (!logger_->is_dummy()) {
      StepRecord rec;
      rec.eid = current_eid_;
      rec.step = step_count_;
      Tree payload;
      Tree act_tree;
      for (const auto& [k, t] : action.primitives) act_tree[k] = Value(t);
      payload["action"] = Value(std::move(act_tree));
      Tree eval_tree;
      for (const auto& [k, v] : task_->evaluate(*this, {})) eval_tree[k] = Value(v);
      payload["evaluation"] = Value(std::move(eval_tree));
      rec.payload = std::move(payload);
      logger_->log_step(rec);
    }
    return info;
  }

  std::vector<EpisodeConfig> eval_configs() override { return mode_configs(Mode::Eval); }
  std::vector<EpisodeConfig> val_configs() override { return mode_configs(Mode::Val); }

  ActionSpace action_space() override { return tool_->action_space(); }
  Action no_op() override { return tool_->no_op(); }
  int action_horizon() override { return horizon_ > 0 ? horizon_ : tool_->action_horizon(); }
  int64_t num_episodes() override { return eid_range(mode_).size(); }
  Tree goal() override { return task_->goal(*this); }

  ActionTool& tool() { return *tool_; }
  int64_t step_count() const { return step_count_; }
  double episode_return() const { return episode_return_; }
  bool done() const { return done_; }

 protected:
  virtual void reset_dynamics(int64_t eid) = 0;
  virtual Tree observe() = 0;
  virtual Tensor render_frame() = 0;
  /// Process-local snapshot handed to oracle agents; empty kind disables it.
  virtual std::pair<std::string, std::shared_ptr<const void>> oracle_handle() { return {"", nullptr}; }

  Information make_information(bool include_reward, Tree flags) {
    Information info;
    info.root["observation"] = Value(observe());
    info.root["arena_id"] = Value(scalar_i64(id_));
    info.root["eid"] = Value(scalar_i64(current_eid_));
    info.root["done"] = Value(done_);
    info.root["goal"] = Value(task_->goal(*this));
    if (include_reward) {
      Tree reward_tree;
      for (const auto& [k, v] : task_->reward(*this)) reward_tree[k] = Value(v);
      info.root["reward"] = Value(std::move(reward_tree));
      Tree eval_tree;
      for (const auto& [k, v] : task_->evaluate(*this, {})) eval_tree[k] = Value(v);
      info.root["evaluation"] = Value(std::move(eval_tree));
    }
    for (auto& [k, v] : flags) info.root[k] = std::move(v);
    info.action_space = tool_->action_space();
    auto [kind, handle] = oracle_handle();
    info.oracle_kind = kind;
    info.oracle = std::move(handle);
    return info;
  }

  std::vector<EpisodeConfig> mode_configs(Mode mode) const {
    EidRange range = eid_range(mode);
    std::vector<EpisodeConfig> out;
    for (int64_t eid = range.begin; eid < range.end; ++eid)
      out.push_back(EpisodeConfig{eid, false, mode});
    return out;
  }

  std::shared_ptr<ActionTool> tool_;
  int horizon_ = 0;
  int64_t step_count_ = 0;
  bool done_ = false;
  bool save_video_ = false;
  double episode_return_ = 0.0;
};

}  // namespace arenakit::builtins
