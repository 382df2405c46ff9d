#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arenakit/config.hpp"
#include "arenakit/logger.hpp"
#include "arenakit/serialize.hpp"
#include "arenakit/types.hpp"

namespace arenakit {

class Arena;

/// Append-only scalar log for training progress, keyed by update step.
class TrainWriter {
 public:
  struct Record {
    int64_t update_step;
    std::string key;
    double value;
  };

  void attach(const std::filesystem::path& file) {
    std::filesystem::create_directories(file.parent_path());
    out_.open(file, std::ios::app);
    if (!out_) throw IoError("cannot open train log '" + file.string() + "'");
  }

  void add_scalar(int64_t update_step, const std::string& key, double value) {
    auto it = last_step_.find(key);
    if (it != last_step_.end() && update_step < it->second)
      throw UsageError("train writer: update_step went backwards for key '" + key + "'");
    last_step_[key] = update_step;
    records_.push_back({update_step, key, value});
    if (out_.is_open()) {
      Json j;
      j["update_step"] = update_step;
      j["key"] = key;
      j["value"] = value;
      out_ << j.dump() << "\n";
      out_.flush();
    }
  }

  const std::vector<Record>& records() const { return records_; }

 private:
  std::vector<Record> records_;
  std::map<std::string, int64_t> last_step_;
  std::ofstream out_;
};

/// Base behavioural contract for every agent. Maintains one internal
/// state tree per arena it was reset for; all batched methods are
/// arena-sensitive via the arena_id carried in each information.
class Agent {
 public:
  explicit Agent(Config config) : config_(std::move(config)), logger_(std::make_shared<Logger>("agent")) {}
  virtual ~Agent() = default;

  const std::string& name() const { return name_; }
  const Config& config() const { return config_; }
  LoggerHandle logger() const { return logger_; }

  virtual void set_log_dir(const std::filesystem::path& path) { logger_->set_log_dir(path); }

  virtual std::vector<bool> reset(const std::vector<ArenaId>& arena_ids) {
    if (arena_ids.empty()) throw UsageError("agent reset: empty arena id list");
    for (size_t i = 0; i < arena_ids.size(); ++i)
      for (size_t j = i + 1; j < arena_ids.size(); ++j)
        if (arena_ids[i] == arena_ids[j]) throw UsageError("agent reset: duplicate arena ids");
    internal_states_.clear();
    for (ArenaId id : arena_ids) internal_states_[id] = Tree{};
    return std::vector<bool>(arena_ids.size(), true);
  }

  virtual std::vector<bool> init(const std::vector<Information>& informations) {
    for (const Information& info : informations) require_tracked(info.arena_id());
    return std::vector<bool>(informations.size(), true);
  }

  virtual std::vector<bool> update(const std::vector<Information>& informations,
                                   const std::vector<Action>& actions) {
    if (informations.size() != actions.size())
      throw UsageError("agent update: informations/actions arity mismatch");
    for (const Information& info : informations) require_tracked(info.arena_id());
    return std::vector<bool>(informations.size(), true);
  }

  /// One action per information, in matching order. When `update` is
  /// true the agent also applies its internal-state update; callers
  /// that already invoked update/init pass false.
  virtual std::vector<Action> act(const std::vector<Information>& informations, bool update) = 0;

  virtual std::map<ArenaId, bool> success() const { return per_arena(false); }
  virtual std::map<ArenaId, bool> terminate() const { return per_arena(false); }
  virtual std::map<ArenaId, ActionPhase> phase() const {
    std::map<ArenaId, ActionPhase> out;
    for (const auto& [id, _] : internal_states_) out[id] = "none";
    return out;
  }

  const std::map<ArenaId, Tree>& state() const { return internal_states_; }

  /// Base agent seed; batched action randomness is derived from it
  /// together with (arena_id, eid, step) so that parallel and
  /// sequential execution coincide.
  void set_seed(uint64_t seed) { seed_ = seed; }
  uint64_t seed() const { return seed_; }

 protected:
  void require_tracked(ArenaId id) const {
    if (internal_states_.find(id) == internal_states_.end())
      throw ProtocolError("agent received information for unknown arena id " + std::to_string(id));
  }

  std::map<ArenaId, bool> per_arena(bool v) const {
    std::map<ArenaId, bool> out;
    for (const auto& [id, _] : internal_states_) out[id] = v;
    return out;
  }

  Config config_;
  std::string name_ = "agent";
  std::map<ArenaId, Tree> internal_states_;
  LoggerHandle logger_;
  uint64_t seed_ = 0;
};

/// Learning-based agent: checkpointing keyed by the update-step
/// counter, a train writer, and train/eval modes.
class TrainableAgent : public Agent {
 public:
  explicit TrainableAgent(Config config) : Agent(std::move(config)) { name_ = "trainable-agent"; }

  /// Perform exactly `update_steps` parameter updates, interacting
  /// with `arenas` when given. Base contract: not trainable.
  virtual bool train(int64_t update_steps, const std::vector<Arena*>& arenas = {}) {
    if (update_steps <= 0) throw UsageError("train: update_steps must be positive");
    (void)arenas;
    return false;
  }

  virtual void set_train() { training_ = true; }
  virtual void set_eval() { training_ = false; }
  bool is_training() const { return training_; }

  int64_t update_steps() const { return update_steps_; }

  TrainWriter& train_writer() { return train_writer_; }

  void set_log_dir(const std::filesystem::path& path) override {
    Agent::set_log_dir(path);
    train_writer_.attach(logger_->component_dir() / "train_log.jsonl");
  }

  /// Save a checkpoint named by the current update-step count. Returns
  /// false when no directory is available.
  virtual bool save(std::optional<std::filesystem::path> path = std::nullopt) {
    std::optional<std::filesystem::path> root = checkpoint_root(path);
    if (!root) return false;
    std::filesystem::path dir = *root / ("checkpoint_" + std::to_string(update_steps_));
    std::filesystem::create_directories(dir);
    Json manifest;
    manifest["update_steps"] = update_steps_;
    manifest["agent"] = name_;
    Json params = Json::object();
    for (const auto& [key, t] : export_params()) {
      params[key] = {{"dtype", dtype_name(t.dtype)}, {"shape", t.shape}, {"crc32", crc32_of(t)}};
      std::ofstream blob(dir / (key + ".bin"), std::ios::binary | std::ios::trunc);
      blob.write(static_cast<const char*>(t.raw_data()), static_cast<std::streamsize>(t.byte_size()));
      if (!blob) return false;
    }
    manifest["params"] = std::move(params);
    std::ofstream mf(dir / "manifest.json", std::ios::trunc);
    mf << manifest.dump(2) << "\n";
    return static_cast<bool>(mf);
  }

  /// Restore the latest checkpoint under `path` (or the log dir).
  /// Returns the loaded step count, or -1 when nothing loadable exists.
  virtual int64_t load(std::optional<std::filesystem::path> path = std::nullopt) {
    std::optional<std::filesystem::path> root = checkpoint_root(path);
    if (!root || !std::filesystem::exists(*root)) return -1;
    int64_t best = -1;
    for (const auto& entry : std::filesystem::directory_iterator(*root)) {
      std::string fn = entry.path().filename().string();
      if (entry.is_directory() && fn.rfind("checkpoint_", 0) == 0)
        best = std::max(best, static_cast<int64_t>(std::stoll(fn.substr(11))));
    }
    if (best < 0) return -1;
    return load_from_dir(*root / ("checkpoint_" + std::to_string(best))) ? best : -1;
  }

  virtual bool load_checkpoint(int64_t checkpoint,
                               std::optional<std::filesystem::path> path = std::nullopt) {
    std::optional<std::filesystem::path> root = checkpoint_root(path);
    if (!root) return false;
    return load_from_dir(*root / ("checkpoint_" + std::to_string(checkpoint)));
  }

 protected:
  /// Named parameter arrays making up a checkpoint.
  virtual std::map<std::string, Tensor> export_params() const = 0;
  /// Install parameters; called only with a complete, verified set.
  virtual void import_params(const std::map<std::string, Tensor>& params, int64_t update_steps) = 0;

  void bump_update_steps(int64_t n = 1) { update_steps_ += n; }

  std::optional<std::filesystem::path> checkpoint_root(
      const std::optional<std::filesystem::path>& path) const {
    if (path) return path;
    if (!logger_->is_dummy()) return logger_->component_dir();
    return std::nullopt;
  }

  bool load_from_dir(const std::filesystem::path& dir) {
    // Read and verify everything before touching agent state.
    try {
      std::ifstream mf(dir / "manifest.json");
      if (!mf) return false;
      Json manifest = Json::parse(mf);
      int64_t steps = manifest.at("update_steps").get<int64_t>();
      std::map<std::string, Tensor> params;
      for (auto it = manifest.at("params").begin(); it != manifest.at("params").end(); ++it) {
        Tensor t = zeros(dtype_from_name(it.value().at("dtype").get<std::string>()),
                         it.value().at("shape").get<std::vector<int64_t>>());
        std::ifstream blob(dir / (it.key() + ".bin"), std::ios::binary);
        if (!blob) return false;
        blob.read(static_cast<char*>(t.raw_data()), static_cast<std::streamsize>(t.byte_size()));
        if (blob.gcount() != static_cast<std::streamsize>(t.byte_size())) return false;
        if (crc32_of(t) != it.value().at("crc32").get<uint32_t>()) return false;
        params[it.key()] = std::move(t);
      }
      import_params(params, steps);
      update_steps_ = steps;
      return true;
    } catch (const std::exception&) {
      return false;
    }
  }

  TrainWriter train_writer_;
  bool training_ = true;
  int64_t update_steps_ = 0;
};

}  // namespace arenakit
