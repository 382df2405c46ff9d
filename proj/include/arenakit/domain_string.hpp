#pragma once

#include <string>
#include <utility>
#include <vector>

#include "arenakit/errors.hpp"

namespace arenakit {

/// Parsed arena construction string.
///
/// Grammar:  base [ '|' key ':' value ( ',' key ':' value )* ]
/// Values may carry a parenthesized argument, e.g. "pixel-pick-and-place(1)";
/// commas inside parentheses belong to the value. Later duplicate keys
/// override earlier ones (appended overrides like ",disp:False").
struct DomainSpec {
  std::string base;
  std::vector<std::pair<std::string, std::string>> params;  // insertion order, keys unique

  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : params)
      if (k == key) return &v;
    return nullptr;
  }

  std::string param_or(const std::string& key, std::string fallback) const {
    const std::string* v = find(key);
    return v ? *v : std::move(fallback);
  }

  bool operator==(const DomainSpec& o) const { return base == o.base && params == o.params; }
};

/// Parsed agent construction string: base with an optional '|' variant.
struct AgentSpec {
  std::string base;
  std::string variant;

  bool operator==(const AgentSpec& o) const { return base == o.base && variant == o.variant; }
};

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& s, size_t pos, const std::string& what) {
  throw ParseError("domain string parse error at position " + std::to_string(pos) + ": " +
                   what + " (input: \"" + s + "\")");
}

}  // namespace detail

inline DomainSpec parse_domain_string(const std::string& s) {
  if (s.empty()) detail::parse_fail(s, 0, "empty string");
  DomainSpec spec;
  size_t bar = s.find('|');
  spec.base = s.substr(0, bar);
  if (spec.base.empty()) detail::parse_fail(s, 0, "empty base");
  if (bar == std::string::npos) return spec;

  size_t i = bar + 1;
  const size_t n = s.size();
  while (true) {
    size_t colon = s.find(':', i);
    if (colon == std::string::npos) detail::parse_fail(s, i, "expected 'key:value'");
    std::string key = s.substr(i, colon - i);
    if (key.empty()) detail::parse_fail(s, i, "empty key");
    if (key.find(',') != std::string::npos || key.find('(') != std::string::npos)
      detail::parse_fail(s, i, "malformed key '" + key + "'");

    size_t j = colon + 1;
    int depth = 0;
    std::string value;
    while (j < n) {
      char c = s[j];
      if (c == '(') ++depth;
      if (c == ')') {
        if (--depth < 0) detail::parse_fail(s, j, "unbalanced ')'");
      }
      if (c == ',' && depth == 0) break;
      value.push_back(c);
      ++j;
    }
    if (depth != 0) detail::parse_fail(s, j, "unbalanced '('");
    if (value.empty()) detail::parse_fail(s, colon + 1, "empty value for key '" + key + "'");

    bool replaced = false;
    for (auto& [k, v] : spec.params)
      if (k == key) {
        v = value;  // later keys override earlier ones
        replaced = true;
        break;
      }
    if (!replaced) spec.params.emplace_back(std::move(key), std::move(value));

    if (j >= n) break;
    i = j + 1;  // skip ','
    if (i >= n) detail::parse_fail(s, i, "trailing ','");
  }
  return spec;
}

inline std::string unparse_domain_string(const DomainSpec& spec) {
  std::string out = spec.base;
  for (size_t i = 0; i < spec.params.size(); ++i) {
    out += (i == 0 ? '|' : ',');
    out += spec.params[i].first;
    out += ':';
    out += spec.params[i].second;
  }
  return out;
}

inline AgentSpec parse_agent_string(const std::string& s) {
  if (s.empty()) throw ParseError("empty agent string");
  AgentSpec spec;
  size_t bar = s.find('|');
  spec.base = s.substr(0, bar);
  if (spec.base.empty()) throw ParseError("agent string has an empty base: \"" + s + "\"");
  if (bar != std::string::npos) spec.variant = s.substr(bar + 1);
  return spec;
}

}  // namespace arenakit
