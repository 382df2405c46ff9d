#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arenakit/arenakit.hpp"

namespace {

using namespace arenakit;

struct CommonFlags {
  std::string agent;
  std::string arena;
  std::string config = "default";
  std::string log_dir;
  uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool need_agent = true) {
  if (need_agent) {
    cmd->add_option("--agent", f.agent, "agent string")->required();
    cmd->add_option("--arena", f.arena, "arena domain string")->required();
    cmd->add_option("--config", f.config, "config name under the config root");
  }
  cmd->add_option("--log-dir", f.log_dir, "directory for logs, reports and checkpoints");
  cmd->add_option("--seed", f.seed, "base random seed");
}

struct Built {
  std::unique_ptr<Arena> arena;
  std::unique_ptr<Agent> agent;
};

Built build_pair(const CommonFlags& f) {
  Built b;
  b.arena = build_arena(f.arena);
  b.agent = build_agent(f.agent, retrieve_config(f.agent, f.arena, f.config));
  b.arena->set_seed(f.seed);
  b.agent->set_seed(f.seed);
  if (!f.log_dir.empty()) {
    b.arena->set_log_dir(f.log_dir);
    b.agent->set_log_dir(f.log_dir);
  }
  return b;
}

Json trial_to_json(const TrialResult& r) {
  Json j;
  j["eid"] = r.eid;
  j["arena_id"] = r.arena_id;
  j["steps"] = r.actions.size();
  j["evaluation"] = r.evaluation;
  return j;
}

// "rgb:128x128x3:u8" or "norm-pixel-pick-and-place:2x2:f32->default"
SchemaEntry parse_schema_flag(const std::string& flag) {
  std::string body = flag, output;
  size_t arrow = flag.rfind("->");
  if (arrow != std::string::npos) {
    body = flag.substr(0, arrow);
    output = flag.substr(arrow + 2);
  }
  size_t c2 = body.rfind(':');
  size_t c1 = c2 == std::string::npos ? std::string::npos : body.rfind(':', c2 - 1);
  if (c1 == std::string::npos || c2 == c1)
    throw ParseError("schema flag must look like <key>:<dims>:<dtype>[-><output>], got '" +
                     flag + "'");
  std::string key = body.substr(0, c1);
  std::string dims = body.substr(c1 + 1, c2 - c1 - 1);
  std::string dtype = body.substr(c2 + 1);
  std::vector<int64_t> shape;
  size_t pos = 0;
  while (pos <= dims.size()) {
    size_t x = dims.find('x', pos);
    std::string part = dims.substr(pos, x == std::string::npos ? std::string::npos : x - pos);
    try {
      shape.push_back(std::stoll(part));
    } catch (const std::exception&) {
      throw ParseError("bad dimension '" + part + "' in schema flag '" + flag + "'");
    }
    if (x == std::string::npos) break;
    pos = x + 1;
  }
  return schema_entry(key, shape, dtype_from_name(dtype), output);
}

Tensor extract_observation(const Information& info, const SchemaEntry& entry) {
  auto obs = value_get(info.root, {"observation", entry.saved_key});
  std::string key = entry.saved_key;
  if (!obs && entry.saved_key == "rgb") {
    // any single image-like observation serves an rgb schema
    auto it = info.root.find("observation");
    if (it != info.root.end() && it->second.is_tree())
      for (const auto& [k, v] : it->second.tree())
        if (v.is_tensor() && v.tensor().shape.size() == 3) {
          obs = v;
          key = k;
        }
  }
  if (!obs || !obs->is_tensor())
    throw SchemaError("observation key '" + entry.saved_key + "' not produced by the arena");
  Tensor t = obs->tensor();
  if (t.shape.size() == 3 && entry.shape.size() == 3 &&
      (t.shape[0] != entry.shape[0] || t.shape[1] != entry.shape[1]))
    t = resize_nearest(t, entry.shape[0], entry.shape[1]);
  if (t.dtype != entry.dtype || t.shape != entry.shape)
    throw SchemaError("observation '" + key + "' does not fit the schema shape");
  return t;
}

Tensor extract_action(const Action& action, const SchemaEntry& entry) {
  auto it = action.primitives.find(entry.saved_key);
  if (it != action.primitives.end()) {
    if (it->second.shape != entry.shape || it->second.dtype != entry.dtype)
      throw SchemaError("action primitive '" + entry.saved_key + "' does not fit the schema");
    return it->second;
  }
  // pick/place primitive pairs stack into one (2,2) row per step
  auto pick = action.primitives.find("pick_0");
  auto place = action.primitives.find("place_0");
  if (pick != action.primitives.end() && place != action.primitives.end() &&
      entry.shape == std::vector<int64_t>{2, 2} && entry.dtype == Dtype::F32) {
    const auto& p = pick->second.as<float>();
    const auto& q = place->second.as<float>();
    return make_tensor_f32({2, 2}, {p[0], p[1], q[0], q[1]});
  }
  throw SchemaError("no action primitive matches schema key '" + entry.saved_key + "'");
}

int cmd_run(const CommonFlags& f, std::optional<int64_t> eid, const std::string& mode_str,
            std::optional<int> max_steps) {
  Built b = build_pair(f);
  EpisodeConfig cfg;
  cfg.eid = eid;
  cfg.mode = mode_from_name(mode_str);
  TrialResult r = perform_single(*b.arena, *b.agent, cfg.mode, max_steps, cfg);
  std::cout << trial_to_json(r).dump(2) << "\n";
  return 0;
}

int cmd_train(const CommonFlags& f) {
  Built b = build_pair(f);
  EvaluationReport report = train_and_evaluate(*b.agent, *b.arena);
  std::cout << detail::report_to_json(report).dump(2) << "\n";
  return 0;
}

int cmd_evaluate(const CommonFlags& f) {
  Built b = build_pair(f);
  if (auto* trainable = dynamic_cast<TrainableAgent*>(b.agent.get())) trainable->load();
  EvaluationReport report = evaluate(*b.agent, *b.arena);
  std::cout << detail::report_to_json(report).dump(2) << "\n";
  return 0;
}

int cmd_collect(const CommonFlags& f, const std::string& out, int64_t trials, int max_steps,
                const std::vector<std::string>& obs_flags,
                const std::vector<std::string>& act_flags, Compression compression) {
  Built b = build_pair(f);
  StoreManifest manifest;
  manifest.compression = compression;
  for (const std::string& flag : obs_flags) {
    SchemaEntry e = parse_schema_flag(flag);
    manifest.obs_config[e.saved_key] = e;
  }
  for (const std::string& flag : act_flags) {
    SchemaEntry e = parse_schema_flag(flag);
    manifest.act_config[e.saved_key] = e;
  }
  if (manifest.obs_config.empty() || manifest.act_config.empty())
    throw UsageError("collect needs at least one --obs and one --act schema flag");

  TrajectoryStore store = TrajectoryStore::open(out, TrajectoryStore::IoMode::Append, manifest);
  while (store.num_trajectories() < trials) {
    TrialResult r = perform_single(*b.arena, *b.agent, Mode::Train, max_steps);
    std::map<std::string, std::vector<Tensor>> observations, actions;
    size_t steps = r.actions.size();
    for (const auto& [key, entry] : store.manifest().obs_config) {
      std::vector<Tensor> list;
      for (size_t t = 0; t < steps; ++t)
        list.push_back(extract_observation(r.information[t], entry));
      observations[key] = std::move(list);
    }
    for (const auto& [key, entry] : store.manifest().act_config) {
      std::vector<Tensor> list;
      for (const Action& a : r.actions) list.push_back(extract_action(a, entry));
      actions[key] = std::move(list);
    }
    store.add_trajectory(observations, actions);
    std::cerr << "collected trajectory " << store.num_trajectories() << "/" << trials << "\n";
  }
  Json j;
  j["path"] = out;
  j["num_trajectories"] = store.num_trajectories();
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_inspect_data(const std::string& path) {
  TrajectoryStore store = TrajectoryStore::open(path, TrajectoryStore::IoMode::Read);
  if (auto err = store.validate()) {
    std::cerr << "store invalid: " << *err << "\n";
    return 1;
  }
  const StoreManifest& m = store.manifest();
  Json j;
  j["num_trajectories"] = m.num_trajectories;
  j["lengths"] = m.lengths;
  j["obs_config"] = detail::config_to_json(m.obs_config);
  j["act_config"] = detail::config_to_json(m.act_config);
  j["goal_config"] = detail::config_to_json(m.goal_config);
  j["split_ratios"] = m.split_ratios;
  Json splits = Json::object();
  for (Split s : {Split::Train, Split::Val, Split::Eval})
    splits[split_name(s)] = store.split_indices(s);
  j["splits"] = std::move(splits);
  j["compression"] = m.compression == Compression::Deflate ? "deflate" : "none";
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_validate_data(const std::string& path) {
  TrajectoryStore store = TrajectoryStore::open(path, TrajectoryStore::IoMode::Read);
  if (auto err = store.validate()) {
    std::cerr << "store invalid: " << *err << "\n";
    return 1;
  }
  Json j;
  j["ok"] = true;
  j["num_trajectories"] = store.num_trajectories();
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"arena-kit: closed-loop agent/arena runner and dataset tools"};
  app.require_subcommand(1);

  CommonFlags run_f, train_f, eval_f, collect_f;
  std::optional<int64_t> run_eid;
  std::string run_mode = "train";
  std::optional<int> run_max_steps;
  std::string collect_out;
  int64_t collect_trials = 5;
  int collect_max_steps = 3;
  std::vector<std::string> obs_flags, act_flags;
  bool collect_deflate = false;
  std::string data_path;
  int workers = 0;

  CLI::App* run = app.add_subcommand("run", "run one trial and print its summary");
  add_common(run, run_f);
  run_f.config = "";
  run->add_option("--eid", run_eid, "episode id (defaults per arena mode)");
  run->add_option("--mode", run_mode, "train|val|eval");
  run->add_option("--max-steps", run_max_steps, "action budget override");

  CLI::App* train = app.add_subcommand("train", "train with validation sweeps, then evaluate");
  add_common(train, train_f);

  CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate the latest checkpoint");
  add_common(evaluate, eval_f);

  CLI::App* collect = app.add_subcommand("collect", "roll out trials into a trajectory store");
  add_common(collect, collect_f);
  collect_f.config = "";
  collect->add_option("--out", collect_out, "store directory")->required();
  collect->add_option("--trials", collect_trials, "total trajectories to reach");
  collect->add_option("--max-steps", collect_max_steps, "action budget per trial");
  collect->add_option("--obs", obs_flags, "observation schema, e.g. rgb:128x128x3:u8");
  collect->add_option("--act", act_flags,
                      "action schema, e.g. norm-pixel-pick-and-place:2x2:f32->default");
  collect->add_flag("--deflate", collect_deflate, "compress chunks");
  collect->add_option("--workers", workers, "parallel arena cap (reserved; collect is serial)");

  CLI::App* inspect = app.add_subcommand("inspect-data", "print a store's manifest summary");
  inspect->add_option("--path", data_path, "store directory")->required();

  CLI::App* validate = app.add_subcommand("validate-data", "check every chunk of a store");
  validate->add_option("--path", data_path, "store directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_f, run_eid, run_mode, run_max_steps);
    if (train->parsed()) return cmd_train(train_f);
    if (evaluate->parsed()) return cmd_evaluate(eval_f);
    if (collect->parsed())
      return cmd_collect(collect_f, collect_out, collect_trials, collect_max_steps, obs_flags,
                         act_flags,
                         collect_deflate ? Compression::Deflate : Compression::None);
    if (inspect->parsed()) return cmd_inspect_data(data_path);
    if (validate->parsed()) return cmd_validate_data(data_path);
  } catch (const arenakit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
