#pragma once

#include "arenakit/agent.hpp"
#include "arenakit/arena.hpp"
#include "arenakit/builtins/agents.hpp"
#include "arenakit/builtins/line_walker.hpp"
#include "arenakit/builtins/tile_world.hpp"
#include "arenakit/builtins/toy_arena.hpp"
#include "arenakit/config.hpp"
#include "arenakit/domain_string.hpp"
#include "arenakit/errors.hpp"
#include "arenakit/logger.hpp"
#include "arenakit/registry.hpp"
#include "arenakit/rng.hpp"
#include "arenakit/runner.hpp"
#include "arenakit/serialize.hpp"
#include "arenakit/space.hpp"
#include "arenakit/trajectory_store.hpp"
#include "arenakit/transform.hpp"
#include "arenakit/types.hpp"
#include "arenakit/value.hpp"
