#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include "arenakit/detail/png.hpp"
#include "arenakit/serialize.hpp"
#include "arenakit/types.hpp"

namespace arenakit {

struct StepRecord {
  int64_t eid = 0;
  int64_t step = 0;
  Tree payload;
};

/// Component logger. Starts as a dummy (accepts everything, writes
/// nothing); set_log_dir upgrades it to a JSON-lines file logger under
/// `<log_dir>/<component>/steps.jsonl`.
class Logger {
 public:
  // Tensors with this many elements or more are summarized, not inlined.
  static constexpr int64_t kInlineTensorLimit = 64;

  explicit Logger(std::string component) : component_(std::move(component)) {}

  bool is_dummy() const { return log_dir_.empty(); }
  const std::filesystem::path& log_dir() const { return log_dir_; }

  void set_log_dir(const std::filesystem::path& path) {
    if (file_.is_open()) file_.close();
    log_dir_ = path;
    std::filesystem::create_directories(log_dir_ / component_);
    file_.open(log_dir_ / component_ / "steps.jsonl", std::ios::app);
    if (!file_) throw IoError("cannot open log file under '" + path.string() + "'");
  }

  void log_step(const StepRecord& rec) {
    if (is_dummy()) return;
    Json j;
    j["eid"] = rec.eid;
    j["step"] = rec.step;
    j["payload"] = value_to_json(Value(rec.payload), kInlineTensorLimit);
    file_ << j.dump() << "\n";
    file_.flush();
  }

  /// Directory for auxiliary files of this component (frames, reports).
  std::filesystem::path component_dir() const { return log_dir_ / component_; }

 private:
  std::string component_;
  std::filesystem::path log_dir_;
  std::ofstream file_;
};

using LoggerHandle = std::shared_ptr<Logger>;

/// u8 tensor of shape (H,W,1) or (H,W,3) -> lossless PNG.
inline void save_image(const std::filesystem::path& path, const Tensor& t) {
  if (t.dtype != Dtype::U8 || t.shape.size() != 3 ||
      (t.shape[2] != 1 && t.shape[2] != 3))
    throw UsageError("save_image expects a u8 (H,W,1|3) tensor");
  detail::write_png_file(path.string(), t.as<uint8_t>().data(),
                         static_cast<int>(t.shape[1]), static_cast<int>(t.shape[0]),
                         static_cast<int>(t.shape[2]), 8);
}

/// u8 tensor of shape (H,W) with 0/1 entries -> black/white PNG.
inline void save_mask(const std::filesystem::path& path, const Tensor& t) {
  if (t.dtype != Dtype::U8 || t.shape.size() != 2)
    throw UsageError("save_mask expects a u8 (H,W) tensor");
  std::vector<uint8_t> px(t.as<uint8_t>().size());
  for (size_t i = 0; i < px.size(); ++i) px[i] = t.as<uint8_t>()[i] ? 255 : 0;
  detail::write_png_file(path.string(), px.data(), static_cast<int>(t.shape[1]),
                         static_cast<int>(t.shape[0]), 1, 8);
}

/// f32 (H,W) depth map -> 16-bit grayscale PNG normalized to the full
/// range, with the min/max recorded in a `<path>.json` sidecar.
inline void save_depth(const std::filesystem::path& path, const Tensor& t) {
  if (t.dtype != Dtype::F32 || t.shape.size() != 2)
    throw UsageError("save_depth expects an f32 (H,W) tensor");
  const auto& d = t.as<float>();
  float lo = d.empty() ? 0.f : d[0], hi = d.empty() ? 0.f : d[0];
  for (float v : d) {
    if (!std::isfinite(v)) throw UsageError("save_depth: non-finite depth value");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const float span = hi > lo ? hi - lo : 1.f;
  std::vector<uint8_t> px(d.size() * 2);
  for (size_t i = 0; i < d.size(); ++i) {
    auto q = static_cast<uint16_t>((d[i] - lo) / span * 65535.f + 0.5f);
    px[2 * i] = static_cast<uint8_t>(q >> 8);  // big-endian per PNG
    px[2 * i + 1] = static_cast<uint8_t>(q);
  }
  detail::write_png_file(path.string(), px.data(), static_cast<int>(t.shape[1]),
                         static_cast<int>(t.shape[0]), 1, 16);
  Json side;
  side["min"] = lo;
  side["max"] = hi;
  std::ofstream f(path.string() + ".json");
  f << side.dump() << "\n";
}

}  // namespace arenakit
