#pragma once

#include <chrono>
#include <cmath>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "arenakit/agent.hpp"
#include "arenakit/arena.hpp"
#include "arenakit/serialize.hpp"

namespace arenakit {

/// One reset-to-termination interaction with an arena.
struct TrialResult {
  std::vector<Information> information;  // length steps+1, includes reset info
  std::vector<Action> actions;           // length steps
  std::vector<Tree> internal_states;     // agent state snapshot after each act
  std::map<std::string, double> evaluation;
  int64_t eid = 0;
  ArenaId arena_id = 0;
};

/// Field-by-field comparison; oracle handles and attached spaces are
/// process-local and excluded.
inline bool trial_results_equal(const TrialResult& a, const TrialResult& b) {
  if (a.eid != b.eid || a.arena_id != b.arena_id) return false;
  if (a.evaluation != b.evaluation) return false;
  if (a.actions != b.actions) return false;
  if (a.internal_states != b.internal_states) return false;
  if (a.information.size() != b.information.size()) return false;
  for (size_t i = 0; i < a.information.size(); ++i)
    if (!(a.information[i].root == b.information[i].root)) return false;
  return true;
}

struct EvaluationReport {
  struct Trial {
    int64_t eid;
    std::map<std::string, double> metrics;
  };
  struct Aggregate {
    double mean = 0.0;
    double std = 0.0;
  };
  std::vector<Trial> per_trial;
  std::map<std::string, Aggregate> aggregate;
  int64_t checkpoint = 0;
};

namespace detail {

/// Batched coordinator: gathers the latest information from every
/// unfinished arena, invokes the agent once per round, and scatters
/// actions to the arenas on worker threads. Running one arena through
/// it is the sequential case.
inline std::vector<TrialResult> run_wave(const std::vector<Arena*>& arenas, Agent& agent,
                                         const std::vector<EpisodeConfig>& configs,
                                         std::optional<int> max_steps) {
  const size_t n = arenas.size();
  std::vector<TrialResult> results(n);

  // parallel resets
  std::vector<std::future<Information>> reset_futures;
  for (size_t i = 0; i < n; ++i) {
    Arena* arena = arenas[i];
    EpisodeConfig cfg = configs[i];
    arena->set_mode(cfg.mode);
    reset_futures.push_back(
        std::async(std::launch::async, [arena, cfg] { return arena->reset(cfg); }));
  }
  std::vector<Information> latest;
  std::vector<ArenaId> ids;
  for (size_t i = 0; i < n; ++i) {
    latest.push_back(reset_futures[i].get());
    ids.push_back(arenas[i]->id());
    results[i].arena_id = arenas[i]->id();
    results[i].eid = latest[i].eid();
    results[i].information.push_back(latest[i]);
  }

  agent.reset(ids);
  agent.init(latest);

  std::vector<int> limits(n);
  for (size_t i = 0; i < n; ++i)
    limits[i] = max_steps ? *max_steps : arenas[i]->action_horizon();

  std::vector<bool> active(n);
  std::vector<int> steps(n, 0);
  auto refresh_active = [&] {
    std::map<ArenaId, bool> term = agent.terminate();
    for (size_t i = 0; i < n; ++i)
      active[i] = !latest[i].done() && steps[i] < limits[i] && !term[ids[i]];
  };
  refresh_active();

  while (true) {
    std::vector<size_t> round;
    for (size_t i = 0; i < n; ++i)
      if (active[i]) round.push_back(i);
    if (round.empty()) break;

    std::vector<Information> batch;
    for (size_t i : round) batch.push_back(latest[i]);
    std::vector<Action> acts = agent.act(batch, /*update=*/true);
    if (acts.size() != batch.size())
      throw ProtocolError("agent returned " + std::to_string(acts.size()) + " actions for " +
                          std::to_string(batch.size()) + " informations");

    std::vector<std::future<Information>> step_futures;
    for (size_t k = 0; k < round.size(); ++k) {
      Arena* arena = arenas[round[k]];
      Action a = acts[k];
      step_futures.push_back(
          std::async(std::launch::async, [arena, a] { return arena->step(a); }));
    }
    for (size_t k = 0; k < round.size(); ++k) {
      size_t i = round[k];
      latest[i] = step_futures[k].get();
      ++steps[i];
      results[i].actions.push_back(acts[k]);
      results[i].information.push_back(latest[i]);
      Tree snapshot = agent.state().at(ids[i]);
      if (!agent.logger()->is_dummy()) {
        StepRecord rec;
        rec.eid = results[i].eid;
        rec.step = steps[i];
        rec.payload = snapshot;
        agent.logger()->log_step(rec);
      }
      results[i].internal_states.push_back(std::move(snapshot));
    }
    refresh_active();
  }

  for (size_t i = 0; i < n; ++i) results[i].evaluation = arenas[i]->evaluate();
  return results;
}

}  // namespace detail

/// Run one agent against many arenas from start to finish, batching
/// the agent across unfinished arenas each round. Semantically
/// equivalent to per-pair perform_single runs; results follow the
/// config order. When more configs than arenas are given, configs are
/// processed in waves over the arena list.
inline std::vector<TrialResult> perform_parallel(const std::vector<Arena*>& arenas, Agent& agent,
                                                 std::vector<EpisodeConfig> configs = {},
                                                 std::optional<int> max_steps = std::nullopt) {
  if (arenas.empty()) throw UsageError("perform_parallel: no arenas");
  std::set<ArenaId> seen;
  for (Arena* a : arenas)
    if (!seen.insert(a->id()).second)
      throw ConfigError("duplicate arena id " + std::to_string(a->id()) +
                        " (assign unique ids before parallel runs)");
  if (configs.empty())
    for (Arena* a : arenas) configs.push_back(EpisodeConfig{std::nullopt, false, a->mode()});

  std::vector<TrialResult> results;
  for (size_t off = 0; off < configs.size(); off += arenas.size()) {
    size_t count = std::min(arenas.size(), configs.size() - off);
    std::vector<Arena*> wave_arenas(arenas.begin(), arenas.begin() + count);
    std::vector<EpisodeConfig> wave_configs(configs.begin() + off, configs.begin() + off + count);
    std::vector<TrialResult> wave = detail::run_wave(wave_arenas, agent, wave_configs, max_steps);
    for (TrialResult& r : wave) results.push_back(std::move(r));
  }
  return results;
}

/// Per-pair fallback for multiple agents (no batching).
inline std::vector<TrialResult> perform_parallel(const std::vector<Arena*>& arenas,
                                                 const std::vector<Agent*>& agents,
                                                 std::vector<EpisodeConfig> configs = {},
                                                 std::optional<int> max_steps = std::nullopt) {
  if (arenas.size() != agents.size())
    throw UsageError("perform_parallel: arenas/agents arity mismatch");
  if (configs.empty())
    for (Arena* a : arenas) configs.push_back(EpisodeConfig{std::nullopt, false, a->mode()});
  if (configs.size() != arenas.size())
    throw UsageError("perform_parallel: one config per (arena, agent) pair expected");
  std::vector<TrialResult> results;
  for (size_t i = 0; i < arenas.size(); ++i)
    results.push_back(
        detail::run_wave({arenas[i]}, *agents[i], {configs[i]}, max_steps).front());
  return results;
}

inline TrialResult perform_single(Arena& arena, Agent& agent, Mode mode,
                                  std::optional<int> max_steps = std::nullopt,
                                  std::optional<EpisodeConfig> episode_config = std::nullopt) {
  EpisodeConfig cfg = episode_config.value_or(EpisodeConfig{});
  cfg.mode = mode;
  return detail::run_wave({&arena}, agent, {cfg}, max_steps).front();
}

/// Thin alias of perform_single with the mode taken from the config.
inline TrialResult run(Agent& agent, Arena& arena, const EpisodeConfig& episode_config) {
  return perform_single(arena, agent, episode_config.mode, std::nullopt, episode_config);
}

namespace detail {

inline EvaluationReport aggregate_report(const std::vector<TrialResult>& trials,
                                         int64_t checkpoint) {
  EvaluationReport report;
  report.checkpoint = checkpoint;
  std::set<std::string> metric_names;
  for (const TrialResult& t : trials) {
    report.per_trial.push_back({t.eid, t.evaluation});
    for (const auto& [k, _] : t.evaluation) metric_names.insert(k);
  }
  for (const std::string& m : metric_names) {
    double sum = 0.0;
    size_t count = 0;
    for (const TrialResult& t : trials) {
      auto it = t.evaluation.find(m);
      if (it != t.evaluation.end()) {
        sum += it->second;
        ++count;
      }
    }
    double mean = sum / static_cast<double>(count);
    double var = 0.0;
    for (const TrialResult& t : trials) {
      auto it = t.evaluation.find(m);
      if (it != t.evaluation.end()) var += (it->second - mean) * (it->second - mean);
    }
    report.aggregate[m] = {mean, std::sqrt(var / static_cast<double>(count))};
  }
  return report;
}

inline Json report_to_json(const EvaluationReport& report) {
  Json j;
  j["checkpoint"] = report.checkpoint;
  Json trials = Json::array();
  for (const auto& t : report.per_trial) {
    Json jt;
    jt["eid"] = t.eid;
    jt["metrics"] = t.metrics;
    trials.push_back(std::move(jt));
  }
  j["trials"] = std::move(trials);
  Json agg = Json::object();
  for (const auto& [k, a] : report.aggregate) agg[k] = {{"mean", a.mean}, {"std", a.std}};
  j["aggregate"] = std::move(agg);
  // timestamps stay in this one field so reports are otherwise byte-reproducible
  j["timestamp"] = static_cast<int64_t>(
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count());
  return j;
}

inline void write_report(const EvaluationReport& report, Agent& agent, Arena& arena,
                         const std::string& prefix) {
  std::filesystem::path dir;
  if (!agent.logger()->is_dummy())
    dir = agent.logger()->log_dir();
  else if (!arena.logger()->is_dummy())
    dir = arena.logger()->log_dir();
  else
    return;
  std::ofstream f(dir / (prefix + "_" + std::to_string(report.checkpoint) + ".json"));
  f << report_to_json(report).dump(2) << "\n";
}

inline EvaluationReport sweep(Agent& agent, Arena& arena, Mode mode, const std::string& prefix) {
  std::vector<EpisodeConfig> configs =
      mode == Mode::Eval ? arena.eval_configs() : arena.val_configs();
  if (configs.empty())
    throw UsageError("arena '" + arena.name() + "' defines no " + mode_name(mode) +
                     " episode configs");
  arena.set_mode(mode);
  auto* trainable = dynamic_cast<TrainableAgent*>(&agent);
  if (trainable) trainable->set_eval();
  std::vector<TrialResult> trials = perform_parallel({&arena}, agent, configs);
  EvaluationReport report =
      aggregate_report(trials, trainable ? trainable->update_steps() : 0);
  write_report(report, agent, arena, prefix);
  return report;
}

}  // namespace detail

/// Run the agent on every evaluation episode of the arena and
/// aggregate the task metrics; the report lands in the log dir as
/// eval_<checkpoint>.json.
inline EvaluationReport evaluate(Agent& agent, Arena& arena) {
  return detail::sweep(agent, arena, Mode::Eval, "eval");
}

inline EvaluationReport validate(Agent& agent, Arena& arena) {
  return detail::sweep(agent, arena, Mode::Val, "val");
}

/// Train with intermediate validations and checkpoints, then evaluate.
/// Training progress is clocked purely by update steps
/// (config: total_update_steps, validation_interval); an existing
/// checkpoint is resumed, not re-run.
inline EvaluationReport train_and_evaluate(Agent& agent, Arena& arena) {
  auto* trainable = dynamic_cast<TrainableAgent*>(&agent);
  if (!trainable) throw UsageError("train_and_evaluate requires a trainable agent");
  const int64_t total = trainable->config().get_int("total_update_steps", 2000);
  const int64_t interval = trainable->config().get_int("validation_interval", 500);
  if (total <= 0 || interval <= 0)
    throw ConfigError("total_update_steps and validation_interval must be positive");

  trainable->load();  // resume from the latest checkpoint when present
  while (trainable->update_steps() < total) {
    int64_t chunk = std::min(interval, total - trainable->update_steps());
    trainable->set_train();
    arena.set_train();
    if (!trainable->train(chunk, {&arena}))
      throw UsageError("agent '" + trainable->name() + "' is not trainable in this configuration");
    trainable->save();
    validate(agent, arena);
  }
  return evaluate(agent, arena);
}

}  // namespace arenakit
