#pragma once

#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "arenakit/agent.hpp"
#include "arenakit/arena.hpp"
#include "arenakit/builtins/agents.hpp"
#include "arenakit/builtins/line_walker.hpp"
#include "arenakit/builtins/tile_world.hpp"
#include "arenakit/config.hpp"
#include "arenakit/domain_string.hpp"
#include "arenakit/transform.hpp"

namespace arenakit {

/// String-driven construction of arenas, agents and transforms.
/// Immutable after startup registration; concurrent reads are safe.
class Registry {
 public:
  using ArenaBuilder = std::function<std::unique_ptr<Arena>(const DomainSpec&)>;
  using AgentBuilder = std::function<std::unique_ptr<Agent>(const AgentSpec&, const Config&)>;
  using TransformBuilder = std::function<Transform(const std::string& args)>;

  static Registry& instance() {
    static Registry reg;
    return reg;
  }

  void register_arena(const std::string& base, ArenaBuilder builder) {
    arenas_[base] = std::move(builder);
  }
  void register_agent(const std::string& base, AgentBuilder builder) {
    agents_[base] = std::move(builder);
  }
  void register_transform(const std::string& name, TransformBuilder builder) {
    transforms_[name] = std::move(builder);
  }

  std::unique_ptr<Arena> build_arena(const std::string& s) const {
    DomainSpec spec = parse_domain_string(s);
    auto it = arenas_.find(spec.base);
    if (it == arenas_.end())
      throw RegistryError("unknown arena base '" + spec.base + "'; registered: " +
                          joined_keys(arenas_));
    std::unique_ptr<Arena> arena = it->second(spec);
    if (const std::string* disp = spec.find("disp"))
      arena->set_disp(*disp == "True" || *disp == "true" || *disp == "1");
    return arena;
  }

  std::unique_ptr<Agent> build_agent(const std::string& s, const Config& config) const {
    AgentSpec spec = parse_agent_string(s);
    auto it = agents_.find(spec.base);
    if (it == agents_.end())
      throw RegistryError("unknown agent base '" + spec.base + "'; registered: " +
                          joined_keys(agents_));
    return it->second(spec, config);
  }

  Transform build_transform(const std::string& s) const {
    std::string name = s, args;
    size_t open = s.find('(');
    if (open != std::string::npos) {
      if (s.back() != ')') throw ParseError("malformed transform '" + s + "'");
      name = s.substr(0, open);
      args = s.substr(open + 1, s.size() - open - 2);
    }
    auto it = transforms_.find(name);
    if (it == transforms_.end())
      throw RegistryError("unknown transform '" + name + "'; registered: " +
                          joined_keys(transforms_));
    return it->second(args);
  }

  std::vector<std::string> arena_names() const { return keys(arenas_); }
  std::vector<std::string> agent_names() const { return keys(agents_); }

 private:
  template <typename M>
  static std::vector<std::string> keys(const M& m) {
    std::vector<std::string> out;
    for (const auto& [k, _] : m) out.push_back(k);
    return out;
  }
  template <typename M>
  static std::string joined_keys(const M& m) {
    std::string out;
    for (const auto& [k, _] : m) {
      if (!out.empty()) out += ", ";
      out += k;
    }
    return out.empty() ? "<none>" : out;
  }

  std::map<std::string, ArenaBuilder> arenas_;
  std::map<std::string, AgentBuilder> agents_;
  std::map<std::string, TransformBuilder> transforms_;
};

namespace detail {

inline int parse_pickers(const std::string& action) {
  // "pixel-pick-and-place(1)" -> 1
  size_t open = action.find('(');
  if (open == std::string::npos) return 1;
  if (action.back() != ')') throw ConfigError("malformed action value '" + action + "'");
  return std::stoi(action.substr(open + 1, action.size() - open - 2));
}

inline std::unique_ptr<Arena> build_toy_arena(const DomainSpec& spec) {
  static const std::vector<std::string> known = {"domain", "action",   "task",
                                                 "disp",   "buckets",  "grid",
                                                 "misplaced", "horizon"};
  for (const auto& [k, _] : spec.params)
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw ConfigError("unknown arena parameter '" + k + "' for base 'toy'");

  std::string domain = spec.param_or("domain", "");
  std::string task = spec.param_or("task", "");
  std::unique_ptr<builtins::ToyArena> arena;
  if (domain == "tile-world") {
    std::string action = spec.param_or("action", "pixel-pick-and-place(1)");
    if (action.rfind("pixel-pick-and-place", 0) != 0)
      throw ConfigError("tile-world supports only the pixel-pick-and-place action, got '" +
                        action + "'");
    int grid = std::stoi(spec.param_or("grid", "8"));
    int misplaced = std::stoi(spec.param_or("misplaced", "3"));
    int horizon = std::stoi(spec.param_or("horizon", "3"));
    arena = std::make_unique<builtins::TileWorldArena>(grid, misplaced, parse_pickers(action),
                                                       horizon);
    if (task == "flattening")
      arena->set_task(std::make_shared<builtins::FlatteningTask>());
    else if (!task.empty())
      throw ConfigError("unknown task '" + task + "' for tile-world (available: flattening)");
  } else if (domain == "line-walker") {
    int buckets = std::stoi(spec.param_or("buckets", "41"));
    int horizon = std::stoi(spec.param_or("horizon", "20"));
    arena = std::make_unique<builtins::LineWalkerArena>(buckets, horizon);
    if (task == "reach")
      arena->set_task(std::make_shared<builtins::ReachTask>());
    else if (!task.empty())
      throw ConfigError("unknown task '" + task + "' for line-walker (available: reach)");
  } else {
    throw ConfigError("unknown toy domain '" + domain +
                      "' (available: tile-world, line-walker)");
  }
  return arena;
}

inline std::pair<int64_t, int64_t> parse_hw(const std::string& args) {
  size_t x = args.find('x');
  if (x == std::string::npos) throw ParseError("expected '<h>x<w>', got '" + args + "'");
  return {std::stoll(args.substr(0, x)), std::stoll(args.substr(x + 1))};
}

inline std::pair<double, double> parse_lo_hi(const std::string& args) {
  size_t comma = args.find(',');
  if (comma == std::string::npos) throw ParseError("expected '<lo>,<hi>', got '" + args + "'");
  return {std::stod(args.substr(0, comma)), std::stod(args.substr(comma + 1))};
}

inline void ensure_builtins() {
  static bool done = [] {
    Registry& reg = Registry::instance();
    reg.register_arena("toy", build_toy_arena);
    reg.register_agent("random", [](const AgentSpec&, const Config& c) {
      return std::make_unique<builtins::RandomAgent>(c);
    });
    reg.register_agent("oracle-tile", [](const AgentSpec&, const Config& c) {
      return std::make_unique<builtins::OracleTileAgent>(c);
    });
    reg.register_agent("tabular-q", [](const AgentSpec&, const Config& c) {
      return std::make_unique<builtins::TabularQAgent>(c);
    });
    reg.register_transform("resize", [](const std::string& args) {
      auto [h, w] = parse_hw(args);
      return make_resize_transform(h, w);
    });
    reg.register_transform("to-float",
                           [](const std::string&) { return make_to_float_transform(); });
    reg.register_transform("normalize", [](const std::string& args) {
      auto [lo, hi] = parse_lo_hi(args);
      return make_normalize_transform(lo, hi);
    });
    return true;
  }();
  (void)done;
}

}  // namespace detail

inline std::unique_ptr<Arena> build_arena(const std::string& s) {
  detail::ensure_builtins();
  return Registry::instance().build_arena(s);
}

inline std::unique_ptr<Agent> build_agent(const std::string& s, const Config& config = Config()) {
  detail::ensure_builtins();
  return Registry::instance().build_agent(s, config);
}

inline Transform build_transform(const std::string& s) {
  detail::ensure_builtins();
  return Registry::instance().build_transform(s);
}

/// Root of the config tree: $ARENA_KIT_CONFIG_DIR, else ./configs.
inline std::filesystem::path config_root() {
  if (const char* env = std::getenv("ARENA_KIT_CONFIG_DIR")) return env;
  return "configs";
}

/// Loads configs/<agent_base>/<arena_base>/<config_name>.yaml; an empty
/// config_name yields an empty config. Keyed by base names only since
/// full domain strings contain filesystem-hostile characters.
inline Config retrieve_config(const std::string& agent_name, const std::string& arena_name,
                              const std::string& config_name = "default") {
  if (config_name.empty()) return Config();
  std::string agent_base = parse_agent_string(agent_name).base;
  std::string arena_base = parse_domain_string(arena_name).base;
  std::filesystem::path path = config_root() / agent_base / arena_base / (config_name + ".yaml");
  if (!std::filesystem::exists(path))
    throw ConfigError("config file not found: '" + path.string() + "'");
  return Config::from_yaml_file(path);
}

}  // namespace arenakit
