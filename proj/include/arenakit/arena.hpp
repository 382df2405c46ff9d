#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arenakit/logger.hpp"
#include "arenakit/rng.hpp"
#include "arenakit/types.hpp"

namespace arenakit {

class Arena;

/// Stateless evaluator bound to an arena: goals, rewards, success and
/// metrics. Services take the arena as an argument so the same task
/// can serve arenas with different dynamics.
class Task {
 public:
  virtual ~Task() = default;
  virtual std::string name() const = 0;
  virtual void reset(Arena& arena) { (void)arena; }
  virtual bool success(Arena& arena) = 0;
  /// Requested metrics; all defined metrics when the list is empty.
  /// Unknown metric names raise an error listing the available ones.
  virtual std::map<std::string, double> evaluate(Arena& arena,
                                                 const std::vector<std::string>& metrics) = 0;
  virtual std::map<std::string, double> reward(Arena& arena) = 0;
  virtual Tree goal(Arena& arena) = 0;
};

/// Installed when no task is specified: the arena operates without
/// goals or rewards.
class DummyTask : public Task {
 public:
  std::string name() const override { return "dummy"; }
  bool success(Arena&) override { return false; }
  std::map<std::string, double> evaluate(Arena&, const std::vector<std::string>& metrics) override {
    if (!metrics.empty())
      throw UsageError("dummy task defines no metrics (requested '" + metrics.front() + "')");
    return {};
  }
  std::map<std::string, double> reward(Arena&) override { return {}; }
  Tree goal(Arena&) override { return {}; }
};

/// Action-primitive layer interpreting agent actions against arena
/// dynamics; swappable independently of the task.
class ActionTool {
 public:
  virtual ~ActionTool() = default;
  virtual std::string name() const = 0;
  virtual const ActionSpace& action_space() const = 0;
  virtual int action_horizon() const { return 0; }
  virtual Action no_op() const = 0;
  virtual void reset(Arena& arena) { (void)arena; }
  /// Applies the action to the arena's dynamics; returns flags to be
  /// merged into the step information (e.g. "no_pick").
  virtual Tree step(Arena& arena, const Action& action) = 0;
};

/// An environment encapsulating dynamics, a task, and an action tool;
/// the unit of parallel execution. One instance = one actor with
/// exclusive state.
class Arena {
 public:
  Arena() : logger_(std::make_shared<Logger>("arena")), task_(std::make_shared<DummyTask>()) {}
  virtual ~Arena() = default;

  const std::string& name() const { return name_; }

  Mode mode() const { return mode_; }
  void set_train() { mode_ = Mode::Train; }
  void set_val() { mode_ = Mode::Val; }
  void set_eval() { mode_ = Mode::Eval; }
  void set_mode(Mode m) { mode_ = m; }

  ArenaId id() const { return id_; }
  /// Assign the unique id used to tag this arena's informations when
  /// running in parallel.
  void assign_id(ArenaId id) { id_ = id; }

  bool disp() const { return disp_; }
  void set_disp(bool flg) { disp_ = flg; }

  bool random_reset() const { return random_reset_; }
  void set_random_reset(bool flg) { random_reset_ = flg; }

  /// Seed for episode-id sampling and random-action draws. Initial
  /// layouts depend only on the eid, never on this seed.
  void set_seed(uint64_t seed) {
    eid_rng_ = SplitMix64(combine_seed({seed, 0x41u}));
    action_rng_ = SplitMix64(combine_seed({seed, 0x42u}));
  }

  LoggerHandle logger() const { return logger_; }
  void set_log_dir(const std::filesystem::path& path) { logger_->set_log_dir(path); }

  void set_task(std::shared_ptr<Task> task) { task_ = std::move(task); }
  Task& task() { return *task_; }

  virtual Information reset(std::optional<EpisodeConfig> episode_config = std::nullopt) = 0;
  virtual Information step(const Action& action) = 0;

  virtual std::vector<EpisodeConfig> eval_configs() = 0;
  virtual std::vector<EpisodeConfig> val_configs() = 0;

  virtual ActionSpace action_space() = 0;
  virtual Action no_op() = 0;
  virtual int action_horizon() = 0;
  virtual int64_t num_episodes() { return -1; }
  virtual Tree goal() = 0;

  virtual Action sample_random_action() {
    return value_to_action(space_sample(action_space(), action_rng_));
  }

  bool success() { return task_->success(*this); }
  std::map<std::string, double> evaluate() { return task_->evaluate(*this, {}); }

  const std::vector<Tensor>& frames() const { return frames_; }
  void clear_frames() { frames_.clear(); }

  bool episode_active() const { return episode_active_; }
  int64_t current_eid() const { return current_eid_; }

 protected:
  std::string name_ = "arena";
  Mode mode_ = Mode::Train;
  ArenaId id_ = 0;
  bool disp_ = false;
  bool random_reset_ = true;
  LoggerHandle logger_;
  std::shared_ptr<Task> task_;
  std::vector<Tensor> frames_;
  bool episode_active_ = false;
  int64_t current_eid_ = 0;
  SplitMix64 eid_rng_{combine_seed({0, 0x41u})};
  SplitMix64 action_rng_{combine_seed({0, 0x42u})};
};

}  // namespace arenakit
