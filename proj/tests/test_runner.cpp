#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "arenakit/arenakit.hpp"

using namespace arenakit;
using namespace arenakit::builtins;

namespace {

const char* kTileString = "toy|domain:tile-world,action:pixel-pick-and-place(1),task:flattening";

std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("arenakit_runner_" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(PerformSingle, OracleSolvesTileWorld) {
  auto arena = build_arena(kTileString);
  OracleTileAgent agent;
  TrialResult r = perform_single(*arena, agent, Mode::Train, 3,
                                 EpisodeConfig{0, false, Mode::Train});
  EXPECT_EQ(r.eid, 0);
  EXPECT_EQ(r.actions.size(), 3u);
  EXPECT_EQ(r.information.size(), 4u);
  EXPECT_EQ(r.internal_states.size(), 3u);
  EXPECT_EQ(r.evaluation.at("coverage"), 1.0);
  EXPECT_EQ(r.evaluation.at("success"), 1.0);
}

TEST(PerformSingle, MaxStepsZeroMeansNoActions) {
  auto arena = build_arena(kTileString);
  OracleTileAgent agent;
  TrialResult r = perform_single(*arena, agent, Mode::Train, 0,
                                 EpisodeConfig{0, false, Mode::Train});
  EXPECT_TRUE(r.actions.empty());
  EXPECT_EQ(r.information.size(), 1u);
}

TEST(PerformSingle, RerunIsBitwiseIdentical) {
  RandomAgent agent;
  agent.set_seed(21);
  auto run_once = [&] {
    auto arena = build_arena(kTileString);
    arena->set_seed(21);
    return perform_single(*arena, agent, Mode::Train, 3,
                          EpisodeConfig{5, false, Mode::Train});
  };
  EXPECT_TRUE(trial_results_equal(run_once(), run_once()));
}

TEST(Run, AliasUsesConfigMode) {
  auto arena = build_arena(kTileString);
  OracleTileAgent agent;
  TrialResult r = run(agent, *arena, EpisodeConfig{100, false, Mode::Eval});
  EXPECT_EQ(r.eid, 100);
}

TEST(Run, SaveVideoCapturesFrames) {
  auto arena = build_arena(kTileString);
  OracleTileAgent agent;
  TrialResult r = run(agent, *arena, EpisodeConfig{0, true, Mode::Train});
  EXPECT_EQ(arena->frames().size(), r.actions.size() + 1);
}

TEST(PerformParallel, EquivalentToSequentialRuns) {
  OracleTileAgent par_agent;
  std::vector<std::unique_ptr<Arena>> owned;
  std::vector<Arena*> arenas;
  std::vector<EpisodeConfig> configs;
  for (int i = 0; i < 4; ++i) {
    owned.push_back(build_arena(kTileString));
    owned.back()->assign_id(i);
    arenas.push_back(owned.back().get());
    configs.push_back(EpisodeConfig{i, false, Mode::Train});
  }
  std::vector<TrialResult> parallel = perform_parallel(arenas, par_agent, configs);

  ASSERT_EQ(parallel.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    auto arena = build_arena(kTileString);
    arena->assign_id(i);
    OracleTileAgent seq_agent;
    TrialResult seq = perform_single(*arena, seq_agent, Mode::Train, std::nullopt, configs[i]);
    EXPECT_TRUE(trial_results_equal(parallel[i], seq)) << "arena " << i;
  }
}

TEST(PerformParallel, DuplicateIdsRejected) {
  auto a = build_arena(kTileString);
  auto b = build_arena(kTileString);
  a->assign_id(0);
  b->assign_id(0);
  OracleTileAgent agent;
  std::vector<Arena*> arenas{a.get(), b.get()};
  EXPECT_THROW(perform_parallel(arenas, agent), ConfigError);
}

TEST(PerformParallel, MixedLengthTrials) {
  // different misplaced counts finish at different steps; each trial's
  // length must match its own sequential run
  auto a = std::make_unique<TileWorldArena>(8, 1, 1, 5);
  auto b = std::make_unique<TileWorldArena>(8, 4, 1, 5);
  for (auto* arena : {a.get(), b.get()})
    arena->set_task(std::make_shared<FlatteningTask>());
  a->assign_id(0);
  b->assign_id(1);
  OracleTileAgent agent;
  std::vector<Arena*> arenas{a.get(), b.get()};
  std::vector<EpisodeConfig> configs{EpisodeConfig{2, false, Mode::Train},
                                     EpisodeConfig{2, false, Mode::Train}};
  auto results = perform_parallel(arenas, agent, configs);
  EXPECT_EQ(results[0].actions.size(), 1u);
  EXPECT_EQ(results[1].actions.size(), 4u);
  EXPECT_EQ(results[0].evaluation.at("coverage"), 1.0);
  EXPECT_EQ(results[1].evaluation.at("coverage"), 1.0);
}

TEST(PerformParallel, MoreConfigsThanArenasRunsInWaves) {
  auto arena = build_arena(kTileString);
  arena->assign_id(0);
  OracleTileAgent agent;
  std::vector<Arena*> arenas{arena.get()};
  std::vector<EpisodeConfig> configs;
  for (int64_t eid : {0, 1, 2}) configs.push_back(EpisodeConfig{eid, false, Mode::Train});
  auto results = perform_parallel(arenas, agent, configs);
  ASSERT_EQ(results.size(), 3u);
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(results[i].eid, static_cast<int64_t>(i));
    EXPECT_EQ(results[i].evaluation.at("coverage"), 1.0);
  }
}

TEST(PerformParallel, MultiAgentPerPairFallback) {
  auto a = build_arena(kTileString);
  auto b = build_arena(kTileString);
  a->assign_id(0);
  b->assign_id(1);
  OracleTileAgent agent_a, agent_b;
  std::vector<Arena*> arenas{a.get(), b.get()};
  std::vector<Agent*> agents{&agent_a, &agent_b};
  std::vector<EpisodeConfig> configs{EpisodeConfig{0, false, Mode::Train},
                                     EpisodeConfig{1, false, Mode::Train}};
  auto results = perform_parallel(arenas, agents, configs);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_EQ(results[0].evaluation.at("coverage"), 1.0);
  EXPECT_EQ(results[1].evaluation.at("coverage"), 1.0);
}

TEST(Evaluate, OracleCoverageAggregate) {
  auto arena = build_arena(kTileString);
  OracleTileAgent agent;
  EvaluationReport report = evaluate(agent, *arena);
  EXPECT_EQ(report.per_trial.size(), 20u);
  EXPECT_EQ(report.aggregate.at("coverage").mean, 1.0);
  EXPECT_EQ(report.aggregate.at("coverage").std, 0.0);
}

TEST(Evaluate, AggregateMatchesRecomputation) {
  auto arena = build_arena(kTileString);
  RandomAgent agent;
  agent.set_seed(5);
  EvaluationReport report = evaluate(agent, *arena);
  double sum = 0.0;
  for (const auto& t : report.per_trial) sum += t.metrics.at("coverage");
  EXPECT_NEAR(report.aggregate.at("coverage").mean, sum / report.per_trial.size(), 1e-12);
  // random is strictly worse than the oracle on average
  EXPECT_LT(report.aggregate.at("coverage").mean, 1.0);
}

TEST(Validate, UsesValPartition) {
  auto arena = build_arena(kTileString);
  OracleTileAgent agent;
  EvaluationReport report = validate(agent, *arena);
  EXPECT_EQ(report.per_trial.size(), 10u);
  for (const auto& t : report.per_trial) {
    EXPECT_GE(t.eid, 120);
    EXPECT_LT(t.eid, 130);
  }
}

TEST(Evaluate, ReportWrittenUnderLogDir) {
  auto dir = temp_dir("report");
  auto arena = build_arena(kTileString);
  OracleTileAgent agent;
  agent.set_log_dir(dir);
  evaluate(agent, *arena);
  ASSERT_TRUE(std::filesystem::exists(dir / "eval_0.json"));
  std::ifstream in(dir / "eval_0.json");
  Json j = Json::parse(in);
  EXPECT_EQ(j.at("checkpoint").get<int>(), 0);
  EXPECT_EQ(j.at("trials").size(), 20u);
  EXPECT_EQ(j.at("aggregate").at("coverage").at("mean").get<double>(), 1.0);
  EXPECT_TRUE(j.contains("timestamp"));
}

TEST(TrainAndEvaluate, NonTrainableAgentIsUsageError) {
  auto arena = build_arena("toy|domain:line-walker,task:reach");
  RandomAgent agent;
  EXPECT_THROW(train_and_evaluate(agent, *arena), UsageError);
}

TEST(TrainAndEvaluate, ProducesCheckpointsValidationsAndFinalEval) {
  auto dir = temp_dir("tae");
  auto arena = build_arena("toy|domain:line-walker,task:reach");
  arena->set_seed(11);
  Config cfg = retrieve_config("tabular-q", "toy|domain:line-walker", "default");
  TabularQAgent agent(cfg);
  agent.set_seed(11);
  agent.set_log_dir(dir);
  EvaluationReport final_report = train_and_evaluate(agent, *arena);

  EXPECT_EQ(agent.update_steps(), 2000);
  for (int ck : {500, 1000, 1500, 2000}) {
    EXPECT_TRUE(std::filesystem::exists(dir / "agent" / ("checkpoint_" + std::to_string(ck))))
        << ck;
    EXPECT_TRUE(std::filesystem::exists(dir / ("val_" + std::to_string(ck) + ".json"))) << ck;
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "eval_2000.json"));
  EXPECT_EQ(final_report.checkpoint, 2000);
  EXPECT_EQ(final_report.per_trial.size(), 20u);
}

TEST(TrainAndEvaluate, ResumesFromCheckpointWithoutRerunning) {
  auto dir = temp_dir("resume");
  auto arena = build_arena("toy|domain:line-walker,task:reach");
  arena->set_seed(11);
  Config cfg = retrieve_config("tabular-q", "toy|domain:line-walker", "default");
  {
    // interrupt after 1000 steps by training manually and saving
    TabularQAgent agent(cfg);
    agent.set_seed(11);
    agent.set_log_dir(dir);
    ASSERT_TRUE(agent.train(1000, {arena.get()}));
    ASSERT_TRUE(agent.save());
  }
  TabularQAgent agent(cfg);
  agent.set_seed(11);
  agent.set_log_dir(dir);
  train_and_evaluate(agent, *arena);
  EXPECT_EQ(agent.update_steps(), 2000);
  // resumed run never produced the checkpoint_500 of a from-scratch run
  EXPECT_FALSE(std::filesystem::exists(dir / "agent" / "checkpoint_500"));
  EXPECT_TRUE(std::filesystem::exists(dir / "agent" / "checkpoint_1500"));
  EXPECT_TRUE(std::filesystem::exists(dir / "agent" / "checkpoint_2000"));
}

TEST(Loggers, ArenaRecordsActionsAgentRecordsStates) {
  auto dir = temp_dir("logsep");
  auto arena = build_arena(kTileString);
  OracleTileAgent agent;
  arena->set_log_dir(dir);
  agent.set_log_dir(dir);
  perform_single(*arena, agent, Mode::Train, 3, EpisodeConfig{0, false, Mode::Train});

  std::ifstream arena_log(dir / "arena" / "steps.jsonl");
  std::string line;
  int arena_lines = 0;
  while (std::getline(arena_log, line)) {
    Json j = Json::parse(line);
    EXPECT_TRUE(j.at("payload").contains("action"));
    EXPECT_TRUE(j.at("payload").contains("evaluation"));
    ++arena_lines;
  }
  EXPECT_EQ(arena_lines, 3);

  std::ifstream agent_log(dir / "agent" / "steps.jsonl");
  int agent_lines = 0;
  while (std::getline(agent_log, line)) {
    Json j = Json::parse(line);
    EXPECT_TRUE(j.at("payload").contains("plan"));
    EXPECT_FALSE(j.at("payload").contains("action"));
    ++agent_lines;
  }
  EXPECT_EQ(agent_lines, 3);
}
