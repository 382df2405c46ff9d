#include <gtest/gtest.h>

#include "arenakit/arenakit.hpp"

using namespace arenakit;
using namespace arenakit::builtins;

namespace {

TileWorldArena make_tile_arena() { return TileWorldArena(8, 3, 1, 3); }

Action pick_place(float pr, float pc, float qr, float qc) {
  Action a;
  a.primitives["pick_0"] = make_tensor_f32({2}, {pr, pc});
  a.primitives["place_0"] = make_tensor_f32({2}, {qr, qc});
  return a;
}

}  // namespace

TEST(Arena, ResetProducesRequiredInformationKeys) {
  auto arena = make_tile_arena();
  arena.set_task(std::make_shared<FlatteningTask>());
  Information info = arena.reset(EpisodeConfig{0, false, Mode::Train});
  EXPECT_TRUE(value_get(info.root, {"observation"}));
  EXPECT_EQ(info.arena_id(), 0);
  EXPECT_EQ(info.eid(), 0);
  EXPECT_FALSE(info.done());
  EXPECT_TRUE(info.action_space);
  EXPECT_TRUE(value_get(info.root, {"goal", "coverage"}));
  EXPECT_FALSE(value_get(info.root, {"reward"}));  // reward appears on steps only
}

TEST(Arena, ResetIsDeterministicInEid) {
  auto a = make_tile_arena();
  auto b = make_tile_arena();
  b.set_seed(999);  // seed must not affect layouts
  for (int64_t eid : {0, 5, 42}) {
    Information ia = a.reset(EpisodeConfig{eid, false, Mode::Train});
    Information ib = b.reset(EpisodeConfig{eid, false, Mode::Train});
    EXPECT_EQ(value_get(ia.root, {"observation", "rgb"})->tensor(),
              value_get(ib.root, {"observation", "rgb"})->tensor());
  }
}

TEST(Arena, EidOutsideModeRangeIsConfigError) {
  auto arena = make_tile_arena();
  arena.set_train();
  EXPECT_THROW(arena.reset(EpisodeConfig{100, false, Mode::Train}), ConfigError);
  arena.set_eval();
  EXPECT_THROW(arena.reset(EpisodeConfig{0, false, Mode::Eval}), ConfigError);
  EXPECT_NO_THROW(arena.reset(EpisodeConfig{100, false, Mode::Eval}));
}

TEST(Arena, RandomResetFalseFallsBackToRangeStart) {
  auto arena = make_tile_arena();
  arena.set_random_reset(false);
  arena.set_train();
  EXPECT_EQ(arena.reset().eid(), 0);
  arena.set_eval();
  EXPECT_EQ(arena.reset().eid(), 100);
  arena.set_val();
  EXPECT_EQ(arena.reset().eid(), 120);
}

TEST(Arena, RandomResetSamplesWithinModeRange) {
  auto arena = make_tile_arena();
  arena.set_seed(5);
  arena.set_eval();
  for (int i = 0; i < 50; ++i) {
    int64_t eid = arena.reset().eid();
    EXPECT_GE(eid, 100);
    EXPECT_LT(eid, 120);
  }
}

TEST(Arena, NumEpisodesFollowsMode) {
  auto arena = make_tile_arena();
  arena.set_train();
  EXPECT_EQ(arena.num_episodes(), 100);
  arena.set_eval();
  EXPECT_EQ(arena.num_episodes(), 20);
  arena.set_val();
  EXPECT_EQ(arena.num_episodes(), 10);
}

TEST(Arena, EvalValConfigListsMatchPartition) {
  auto arena = make_tile_arena();
  auto eval = arena.eval_configs();
  auto val = arena.val_configs();
  ASSERT_EQ(eval.size(), 20u);
  ASSERT_EQ(val.size(), 10u);
  EXPECT_EQ(*eval.front().eid, 100);
  EXPECT_EQ(*eval.back().eid, 119);
  EXPECT_EQ(*val.front().eid, 120);
  EXPECT_EQ(*val.back().eid, 129);
}

TEST(Arena, StepBeforeResetIsProtocolError) {
  auto arena = make_tile_arena();
  EXPECT_THROW(arena.step(arena.no_op()), ProtocolError);
}

TEST(Arena, StepAfterDoneIsProtocolError) {
  auto arena = make_tile_arena();
  arena.reset(EpisodeConfig{0, false, Mode::Train});
  for (int i = 0; i < 3; ++i) arena.step(arena.no_op());
  EXPECT_THROW(arena.step(arena.no_op()), ProtocolError);
}

TEST(Arena, RejectsOutOfSpaceAndNonFiniteActions) {
  auto arena = make_tile_arena();
  arena.reset(EpisodeConfig{0, false, Mode::Train});
  EXPECT_THROW(arena.step(pick_place(0.f, 0.f, 2.f, 0.f)), UsageError);
  EXPECT_THROW(arena.step(pick_place(std::nanf(""), 0.f, 0.f, 0.f)), UsageError);
  Action missing = pick_place(0.f, 0.f, 0.f, 0.f);
  missing.primitives.erase("place_0");
  EXPECT_THROW(arena.step(missing), UsageError);
}

TEST(Arena, NoOpIsNeutralForEvaluation) {
  auto tile = make_tile_arena();
  tile.set_task(std::make_shared<FlatteningTask>());
  tile.reset(EpisodeConfig{3, false, Mode::Train});
  auto before = tile.evaluate();
  tile.step(tile.no_op());
  EXPECT_EQ(tile.evaluate(), before);

  LineWalkerArena line(41, 20);
  line.set_task(std::make_shared<ReachTask>());
  line.reset(EpisodeConfig{3, false, Mode::Train});
  double d_before = line.evaluate().at("distance");
  line.step(line.no_op());
  EXPECT_EQ(line.evaluate().at("distance"), d_before);
}

TEST(Arena, SaveVideoCollectsFramePerStep) {
  auto arena = make_tile_arena();
  arena.reset(EpisodeConfig{0, true, Mode::Train});
  EXPECT_EQ(arena.frames().size(), 1u);
  arena.step(arena.no_op());
  arena.step(arena.no_op());
  EXPECT_EQ(arena.frames().size(), 3u);
  arena.reset(EpisodeConfig{0, false, Mode::Train});
  EXPECT_TRUE(arena.frames().empty());
}

TEST(Arena, RewardAndEvaluationOnSteps) {
  auto arena = make_tile_arena();
  arena.set_task(std::make_shared<FlatteningTask>());
  Information info = arena.reset(EpisodeConfig{0, false, Mode::Train});
  info = arena.step(arena.no_op());
  auto reward = value_get(info.root, {"reward", "task"});
  ASSERT_TRUE(reward);
  EXPECT_NEAR(reward->scalar(), 61.0 / 64.0, 1e-12);
  auto cov = value_get(info.root, {"evaluation", "coverage"});
  ASSERT_TRUE(cov);
  EXPECT_NEAR(cov->scalar(), 61.0 / 64.0, 1e-12);
}

TEST(Arena, TaskIsSwappableIndependentlyOfDynamics) {
  auto arena = make_tile_arena();
  // default task is the dummy: no metrics, no reward, never succeeds
  arena.reset(EpisodeConfig{0, false, Mode::Train});
  EXPECT_TRUE(arena.evaluate().empty());
  EXPECT_FALSE(arena.success());
  arena.set_task(std::make_shared<FlatteningTask>());
  EXPECT_EQ(arena.evaluate().count("coverage"), 1u);
}

TEST(Arena, UnknownMetricErrorsAndListsAvailable) {
  auto arena = make_tile_arena();
  FlatteningTask task;
  arena.reset(EpisodeConfig{0, false, Mode::Train});
  try {
    task.evaluate(arena, {"bogus"});
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("coverage"), std::string::npos);
  }
  auto picked = task.evaluate(arena, {"coverage"});
  EXPECT_EQ(picked.size(), 1u);
}

TEST(Arena, TaskToolCapabilityErrors) {
  LineWalkerArena line(41, 20);
  line.reset(EpisodeConfig{0, false, Mode::Train});
  FlatteningTask tile_task;
  EXPECT_THROW(tile_task.evaluate(line, {}), CapabilityError);
  PickPlaceTool tool;
  EXPECT_THROW(tool.step(line, tool.no_op()), CapabilityError);
}

TEST(Arena, SampleRandomActionStaysInSpace) {
  auto arena = make_tile_arena();
  arena.set_seed(11);
  for (int i = 0; i < 100; ++i) {
    Action a = arena.sample_random_action();
    EXPECT_TRUE(space_contains(arena.action_space(), action_to_value(a)));
  }
}

TEST(Arena, EpisodeReturnAccumulatesTaskReward) {
  auto arena = make_tile_arena();
  arena.set_task(std::make_shared<FlatteningTask>());
  arena.reset(EpisodeConfig{0, false, Mode::Train});
  arena.step(arena.no_op());
  arena.step(arena.no_op());
  EXPECT_NEAR(arena.episode_return(), 2 * 61.0 / 64.0, 1e-12);
}
