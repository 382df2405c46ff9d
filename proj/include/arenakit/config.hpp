#pragma once

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "arenakit/value.hpp"

namespace arenakit {

namespace detail {

inline Value yaml_to_value(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Map: {
      Tree t;
      for (const auto& kv : node) t[kv.first.as<std::string>()] = yaml_to_value(kv.second);
      return Value(std::move(t));
    }
    case YAML::NodeType::Sequence: {
      ValueList l;
      for (const auto& c : node) l.push_back(yaml_to_value(c));
      return Value(std::move(l));
    }
    case YAML::NodeType::Scalar: {
      const std::string& s = node.Scalar();
      if (s == "true" || s == "True" || s == "false" || s == "False")
        return Value(s == "true" || s == "True");
      double d;
      if (YAML::convert<double>::decode(node, d)) return Value(d);
      return Value(s);
    }
    default:
      return Value(Tree{});
  }
}

}  // namespace detail

/// Hyper-parameter tree loaded from a YAML document, with dotted-path
/// access and typed defaults. Unknown keys are preserved.
class Config {
 public:
  Config() = default;
  explicit Config(Tree tree) : tree_(std::move(tree)) {}

  static Config from_yaml_string(const std::string& text) {
    YAML::Node node = YAML::Load(text);
    if (node.IsNull() || !node.IsDefined()) return Config();
    Value v = detail::yaml_to_value(node);
    if (!v.is_tree()) throw ConfigError("config document root must be a mapping");
    return Config(v.tree());
  }

  static Config from_yaml_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return from_yaml_string(ss.str());
  }

  bool empty() const { return tree_.empty(); }
  const Tree& tree() const { return tree_; }
  Tree& tree() { return tree_; }

  std::optional<Value> get(const std::string& dotted) const {
    return value_get(tree_, split(dotted));
  }

  double get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    return v && v->is_scalar() ? v->scalar() : fallback;
  }

  int64_t get_int(const std::string& key, int64_t fallback) const {
    auto v = get(key);
    return v && v->is_scalar() ? static_cast<int64_t>(v->scalar()) : fallback;
  }

  std::string get_string(const std::string& key, std::string fallback) const {
    auto v = get(key);
    return v && v->is_text() ? v->text() : fallback;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    if (v->is_flag()) return v->flag();
    if (v->is_scalar()) return v->scalar() != 0.0;
    return fallback;
  }

  void set(const std::string& dotted, Value v) { tree_set(tree_, split(dotted), std::move(v)); }

 private:
  static std::vector<std::string> split(const std::string& dotted) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : dotted) {
      if (c == '.') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    parts.push_back(cur);
    return parts;
  }

  Tree tree_;
};

}  // namespace arenakit
