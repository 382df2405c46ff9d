#pragma once

#include <functional>
#include <string>

#include "arenakit/types.hpp"

namespace arenakit {

/// Pure observation transform: Information -> Information, touching
/// only the "observation" subtree.
using Transform = std::function<Information(Information)>;

/// Nearest-neighbour resize of an (H,W,C) tensor. Deterministic and
/// dtype-preserving.
inline Tensor resize_nearest(const Tensor& t, int64_t out_h, int64_t out_w) {
  if (t.shape.size() != 3) throw UsageError("resize expects an (H,W,C) tensor");
  const int64_t in_h = t.shape[0], in_w = t.shape[1], ch = t.shape[2];
  if (in_h <= 0 || in_w <= 0) throw UsageError("resize: empty input image");
  Tensor out = zeros(t.dtype, {out_h, out_w, ch});
  auto src_index = [&](int64_t y, int64_t x, int64_t c) {
    int64_t sy = std::min(in_h - 1, y * in_h / out_h);
    int64_t sx = std::min(in_w - 1, x * in_w / out_w);
    return (sy * in_w + sx) * ch + c;
  };
  for (int64_t y = 0; y < out_h; ++y)
    for (int64_t x = 0; x < out_w; ++x)
      for (int64_t c = 0; c < ch; ++c) {
        int64_t di = (y * out_w + x) * ch + c;
        int64_t si = src_index(y, x, c);
        switch (t.dtype) {
          case Dtype::U8: out.as<uint8_t>()[di] = t.as<uint8_t>()[si]; break;
          case Dtype::F32: out.as<float>()[di] = t.as<float>()[si]; break;
          case Dtype::I64: out.as<int64_t>()[di] = t.as<int64_t>()[si]; break;
        }
      }
  return out;
}

inline Tensor cast_to_f32(const Tensor& t) {
  if (t.dtype == Dtype::F32) return t;
  Tensor out = zeros(Dtype::F32, t.shape);
  for (int64_t i = 0; i < t.numel(); ++i) out.as<float>()[i] = static_cast<float>(t.at(i));
  return out;
}

namespace detail {

template <typename Fn>
Information map_observation_tensors(Information info, Fn&& fn) {
  auto it = info.root.find("observation");
  if (it == info.root.end() || !it->second.is_tree()) return info;
  for (auto& [k, v] : it->second.tree())
    if (v.is_tensor()) v = Value(fn(v.tensor()));
  return info;
}

}  // namespace detail

inline Transform make_resize_transform(int64_t h, int64_t w) {
  return [h, w](Information info) {
    return detail::map_observation_tensors(std::move(info), [&](const Tensor& t) {
      return t.shape.size() == 3 ? resize_nearest(t, h, w) : t;
    });
  };
}

inline Transform make_to_float_transform() {
  return [](Information info) {
    return detail::map_observation_tensors(std::move(info),
                                           [](const Tensor& t) { return cast_to_f32(t); });
  };
}

/// Linear map from [0,255] to [lo,hi]; expects f32 input (use to-float first).
inline Transform make_normalize_transform(double lo, double hi) {
  return [lo, hi](Information info) {
    return detail::map_observation_tensors(std::move(info), [&](const Tensor& t) {
      if (t.dtype != Dtype::F32) return t;
      Tensor out = t;
      for (float& v : out.as<float>())
        v = static_cast<float>(v / 255.0 * (hi - lo) + lo);
      return out;
    });
  };
}

}  // namespace arenakit
