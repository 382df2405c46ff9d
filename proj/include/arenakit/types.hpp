#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "arenakit/space.hpp"
#include "arenakit/value.hpp"

namespace arenakit {

using ArenaId = int64_t;

/// Phase label reported by an agent per arena ("none", "pick", "place",
/// "done", ...). Non-empty; default "none".
using ActionPhase = std::string;

enum class Mode { Train, Val, Eval };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Train: return "train";
    case Mode::Val: return "val";
    case Mode::Eval: return "eval";
  }
  return "?";
}

inline Mode mode_from_name(const std::string& s) {
  if (s == "train") return Mode::Train;
  if (s == "val") return Mode::Val;
  if (s == "eval") return Mode::Eval;
  throw UsageError("unknown mode '" + s + "'");
}

struct EpisodeConfig {
  std::optional<int64_t> eid;
  bool save_video = false;
  Mode mode = Mode::Train;
};

/// Agent -> arena: named action primitives, each a finite-valued tensor.
struct Action {
  std::map<std::string, Tensor> primitives;

  bool operator==(const Action& o) const { return primitives == o.primitives; }
};

/// An Action viewed as a Value, matching the shape of a Composite space.
inline Value action_to_value(const Action& a) {
  if (a.primitives.size() == 1) {
    // a single primitive also matches a bare Box/Discrete space
  }
  Tree t;
  for (const auto& [k, v] : a.primitives) t[k] = Value(v);
  return Value(std::move(t));
}

inline Action value_to_action(const Value& v) {
  Action a;
  if (v.is_tensor()) {
    a.primitives["action"] = v.tensor();
    return a;
  }
  if (!v.is_tree()) throw UsageError("cannot convert value to action");
  for (const auto& [k, child] : v.tree()) {
    if (!child.is_tensor()) throw UsageError("action primitive '" + k + "' is not a tensor");
    a.primitives[k] = child.tensor();
  }
  return a;
}

/// Arena -> agent: a string-keyed tree carrying at least "observation"
/// and "arena_id" after reset/step. The oracle handle and the attached
/// action space are process-local conveniences and are never serialized.
struct Information {
  Tree root;
  std::optional<ActionSpace> action_space;
  std::string oracle_kind;
  std::shared_ptr<const void> oracle;

  ArenaId arena_id() const {
    auto v = value_get(root, {"arena_id"});
    if (!v || !v->is_tensor()) throw ProtocolError("information is missing arena_id");
    return v->tensor().as<int64_t>()[0];
  }

  int64_t eid() const {
    auto v = value_get(root, {"eid"});
    if (!v || !v->is_tensor()) throw ProtocolError("information is missing eid");
    return v->tensor().as<int64_t>()[0];
  }

  bool done() const {
    auto v = value_get(root, {"done"});
    return v && v->is_flag() && v->flag();
  }
};

}  // namespace arenakit
