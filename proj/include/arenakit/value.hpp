#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "arenakit/errors.hpp"

namespace arenakit {

enum class Dtype { F32, I64, U8 };

inline const char* dtype_name(Dtype d) {
  switch (d) {
    case Dtype::F32: return "f32";
    case Dtype::I64: return "i64";
    case Dtype::U8: return "u8";
  }
  return "?";
}

inline Dtype dtype_from_name(const std::string& s) {
  if (s == "f32") return Dtype::F32;
  if (s == "i64") return Dtype::I64;
  if (s == "u8") return Dtype::U8;
  throw SchemaError("unknown dtype '" + s + "' (expected f32, i64 or u8)");
}

inline size_t dtype_size(Dtype d) {
  switch (d) {
    case Dtype::F32: return 4;
    case Dtype::I64: return 8;
    case Dtype::U8: return 1;
  }
  return 0;
}

/// Dense row-major tensor with explicit dtype. An empty shape denotes
/// a scalar tensor holding exactly one element.
struct Tensor {
  Dtype dtype = Dtype::F32;
  std::vector<int64_t> shape;
  std::variant<std::vector<float>, std::vector<int64_t>, std::vector<uint8_t>> data;

  Tensor() : data(std::vector<float>{}) {}

  static int64_t numel_of(const std::vector<int64_t>& shape) {
    int64_t n = 1;
    for (int64_t d : shape) {
      if (d < 0) throw UsageError("negative tensor dimension");
      n *= d;
    }
    return n;
  }

  int64_t numel() const { return numel_of(shape); }

  template <typename T>
  const std::vector<T>& as() const {
    return std::get<std::vector<T>>(data);
  }
  template <typename T>
  std::vector<T>& as() {
    return std::get<std::vector<T>>(data);
  }

  /// Element as double regardless of dtype.
  double at(int64_t i) const {
    switch (dtype) {
      case Dtype::F32: return as<float>()[i];
      case Dtype::I64: return static_cast<double>(as<int64_t>()[i]);
      case Dtype::U8: return as<uint8_t>()[i];
    }
    return 0.0;
  }

  bool all_finite() const {
    if (dtype != Dtype::F32) return true;
    for (float v : as<float>())
      if (!std::isfinite(v)) return false;
    return true;
  }

  const void* raw_data() const {
    switch (dtype) {
      case Dtype::F32: return as<float>().data();
      case Dtype::I64: return as<int64_t>().data();
      case Dtype::U8: return as<uint8_t>().data();
    }
    return nullptr;
  }

  void* raw_data() {
    return const_cast<void*>(static_cast<const Tensor*>(this)->raw_data());
  }

  size_t byte_size() const { return static_cast<size_t>(numel()) * dtype_size(dtype); }

  bool operator==(const Tensor& o) const {
    return dtype == o.dtype && shape == o.shape && data == o.data;
  }
};

inline Tensor make_tensor_f32(std::vector<int64_t> shape, std::vector<float> data) {
  if (static_cast<int64_t>(data.size()) != Tensor::numel_of(shape))
    throw UsageError("tensor data length does not match shape");
  Tensor t;
  t.dtype = Dtype::F32;
  t.shape = std::move(shape);
  t.data = std::move(data);
  return t;
}

inline Tensor make_tensor_i64(std::vector<int64_t> shape, std::vector<int64_t> data) {
  if (static_cast<int64_t>(data.size()) != Tensor::numel_of(shape))
    throw UsageError("tensor data length does not match shape");
  Tensor t;
  t.dtype = Dtype::I64;
  t.shape = std::move(shape);
  t.data = std::move(data);
  return t;
}

inline Tensor make_tensor_u8(std::vector<int64_t> shape, std::vector<uint8_t> data) {
  if (static_cast<int64_t>(data.size()) != Tensor::numel_of(shape))
    throw UsageError("tensor data length does not match shape");
  Tensor t;
  t.dtype = Dtype::U8;
  t.shape = std::move(shape);
  t.data = std::move(data);
  return t;
}

/// Scalar i64 tensor (empty shape).
inline Tensor scalar_i64(int64_t v) { return make_tensor_i64({}, {v}); }

inline Tensor zeros(Dtype dtype, std::vector<int64_t> shape) {
  size_t n = static_cast<size_t>(Tensor::numel_of(shape));
  Tensor t;
  t.dtype = dtype;
  t.shape = std::move(shape);
  switch (dtype) {
    case Dtype::F32: t.data = std::vector<float>(n, 0.f); break;
    case Dtype::I64: t.data = std::vector<int64_t>(n, 0); break;
    case Dtype::U8: t.data = std::vector<uint8_t>(n, 0); break;
  }
  return t;
}

class Value;
using Tree = std::map<std::string, Value>;
using ValueList = std::vector<Value>;

/// The concrete "anything" flowing between agents and arenas: a tensor,
/// a scalar, text, a flag, a sub-tree or a list.
class Value {
 public:
  using Variant = std::variant<Tensor, double, std::string, bool, Tree, ValueList>;

  Value() : v_(0.0) {}
  Value(Tensor t) : v_(std::move(t)) {}
  Value(double d) : v_(d) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(bool b) : v_(b) {}
  Value(Tree t) : v_(std::move(t)) {}
  Value(ValueList l) : v_(std::move(l)) {}

  bool is_tensor() const { return std::holds_alternative<Tensor>(v_); }
  bool is_scalar() const { return std::holds_alternative<double>(v_); }
  bool is_text() const { return std::holds_alternative<std::string>(v_); }
  bool is_flag() const { return std::holds_alternative<bool>(v_); }
  bool is_tree() const { return std::holds_alternative<Tree>(v_); }
  bool is_list() const { return std::holds_alternative<ValueList>(v_); }

  const Tensor& tensor() const { return std::get<Tensor>(v_); }
  Tensor& tensor() { return std::get<Tensor>(v_); }
  double scalar() const { return std::get<double>(v_); }
  const std::string& text() const { return std::get<std::string>(v_); }
  bool flag() const { return std::get<bool>(v_); }
  const Tree& tree() const { return std::get<Tree>(v_); }
  Tree& tree() { return std::get<Tree>(v_); }
  const ValueList& list() const { return std::get<ValueList>(v_); }
  ValueList& list() { return std::get<ValueList>(v_); }

  const Variant& variant() const { return v_; }

  bool operator==(const Value& o) const { return v_ == o.v_; }

 private:
  Variant v_;
};

/// Nested lookup; absence is a value, not an error.
inline std::optional<Value> value_get(const Tree& root, const std::vector<std::string>& path) {
  if (path.empty()) throw UsageError("value_get: empty path");
  const Tree* cur = &root;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    auto it = cur->find(path[i]);
    if (it == cur->end() || !it->second.is_tree()) return std::nullopt;
    cur = &it->second.tree();
  }
  auto it = cur->find(path.back());
  if (it == cur->end()) return std::nullopt;
  return it->second;
}

inline void tree_set(Tree& root, const std::vector<std::string>& path, Value v) {
  if (path.empty()) throw UsageError("tree_set: empty path");
  Tree* cur = &root;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    Value& slot = (*cur)[path[i]];
    if (!slot.is_tree()) slot = Tree{};
    cur = &slot.tree();
  }
  (*cur)[path.back()] = std::move(v);
}

}  // namespace arenakit
