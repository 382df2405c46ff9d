#pragma once

#include <zlib.h>

#include <string>

#include <json.hpp>

#include "arenakit/types.hpp"
#include "arenakit/value.hpp"

namespace arenakit {

using Json = nlohmann::json;

inline uint32_t crc32_of(const void* data, size_t n) {
  return static_cast<uint32_t>(
      ::crc32(0L, static_cast<const Bytef*>(data), static_cast<uInt>(n)));
}

inline uint32_t crc32_of(const Tensor& t) { return crc32_of(t.raw_data(), t.byte_size()); }

inline Json tensor_to_json(const Tensor& t) {
  Json j;
  j["__tensor__"] = true;
  j["dtype"] = dtype_name(t.dtype);
  j["shape"] = t.shape;
  Json data = Json::array();
  switch (t.dtype) {
    case Dtype::F32:
      for (float v : t.as<float>()) data.push_back(v);
      break;
    case Dtype::I64:
      for (int64_t v : t.as<int64_t>()) data.push_back(v);
      break;
    case Dtype::U8:
      for (uint8_t v : t.as<uint8_t>()) data.push_back(v);
      break;
  }
  j["data"] = std::move(data);
  return j;
}

/// Summary form for bulk tensors: dtype + shape + checksum, no data.
inline Json tensor_to_json_summary(const Tensor& t) {
  Json j;
  j["__tensor__"] = true;
  j["dtype"] = dtype_name(t.dtype);
  j["shape"] = t.shape;
  j["crc32"] = crc32_of(t);
  return j;
}

inline Tensor tensor_from_json(const Json& j) {
  Dtype dtype = dtype_from_name(j.at("dtype").get<std::string>());
  std::vector<int64_t> shape = j.at("shape").get<std::vector<int64_t>>();
  if (!j.contains("data")) throw SchemaError("tensor JSON has no data (summary form?)");
  const Json& data = j.at("data");
  switch (dtype) {
    case Dtype::F32: return make_tensor_f32(std::move(shape), data.get<std::vector<float>>());
    case Dtype::I64: return make_tensor_i64(std::move(shape), data.get<std::vector<int64_t>>());
    case Dtype::U8: return make_tensor_u8(std::move(shape), data.get<std::vector<uint8_t>>());
  }
  throw SchemaError("bad tensor dtype");
}

/// Value -> JSON. Tensors with at least `summary_threshold` elements are
/// stored as summaries (dtype/shape/crc32); pass a huge threshold for
/// full fidelity.
inline Json value_to_json(const Value& v, int64_t summary_threshold = INT64_MAX) {
  if (v.is_tensor()) {
    const Tensor& t = v.tensor();
    return t.numel() < summary_threshold ? tensor_to_json(t) : tensor_to_json_summary(t);
  }
  if (v.is_scalar()) return Json(v.scalar());
  if (v.is_text()) return Json(v.text());
  if (v.is_flag()) return Json(v.flag());
  if (v.is_list()) {
    Json j = Json::array();
    for (const Value& c : v.list()) j.push_back(value_to_json(c, summary_threshold));
    return j;
  }
  Json j = Json::object();
  for (const auto& [k, c] : v.tree()) j[k] = value_to_json(c, summary_threshold);
  return j;
}

inline Value value_from_json(const Json& j) {
  if (j.is_object()) {
    if (j.contains("__tensor__")) return Value(tensor_from_json(j));
    Tree t;
    for (auto it = j.begin(); it != j.end(); ++it) t[it.key()] = value_from_json(it.value());
    return Value(std::move(t));
  }
  if (j.is_array()) {
    ValueList l;
    for (const Json& c : j) l.push_back(value_from_json(c));
    return Value(std::move(l));
  }
  if (j.is_boolean()) return Value(j.get<bool>());
  if (j.is_string()) return Value(j.get<std::string>());
  if (j.is_number()) return Value(j.get<double>());
  throw SchemaError("cannot convert JSON value of this type");
}

inline Json action_to_json(const Action& a, int64_t summary_threshold = INT64_MAX) {
  Json j = Json::object();
  for (const auto& [k, t] : a.primitives)
    j[k] = t.numel() < summary_threshold ? tensor_to_json(t) : tensor_to_json_summary(t);
  return j;
}

inline Action action_from_json(const Json& j) {
  Action a;
  for (auto it = j.begin(); it != j.end(); ++it) a.primitives[it.key()] = tensor_from_json(it.value());
  return a;
}

}  // namespace arenakit
