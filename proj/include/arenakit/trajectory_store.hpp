#pragma once

#include <zlib.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <functional>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "arenakit/errors.hpp"
#include "arenakit/rng.hpp"
#include "arenakit/serialize.hpp"
#include "arenakit/value.hpp"

namespace arenakit {

/// One stored array stream: per-step tensors of `shape`/`dtype` saved
/// under `saved_key` and returned under `output_key`.
struct SchemaEntry {
  std::string saved_key;
  std::vector<int64_t> shape;
  Dtype dtype = Dtype::F32;
  std::string output_key;

  bool operator==(const SchemaEntry&) const = default;
};

inline SchemaEntry schema_entry(std::string saved_key, std::vector<int64_t> shape, Dtype dtype,
                                std::string output_key = "") {
  for (int64_t d : shape)
    if (d < 0) throw SchemaError("negative dim in schema for '" + saved_key + "'");
  SchemaEntry e;
  e.output_key = output_key.empty() ? saved_key : std::move(output_key);
  e.saved_key = std::move(saved_key);
  e.shape = std::move(shape);
  e.dtype = dtype;
  return e;
}

enum class Compression { None, Deflate };

struct StoreManifest {
  std::map<std::string, SchemaEntry> obs_config;
  std::map<std::string, SchemaEntry> act_config;
  std::map<std::string, SchemaEntry> goal_config;
  int64_t num_trajectories = 0;
  std::vector<int64_t> lengths;
  std::map<std::string, double> split_ratios = {{"train", 1.0}, {"val", 0.0}, {"eval", 0.0}};
  uint64_t split_seed = 0;
  Compression compression = Compression::None;
  // observations per trajectory: actions + (terminal_observation ? 1 : 0)
  bool terminal_observation = false;
  int format_version = 1;
};

enum class SampleMode { Step, Trajectory, Sequence };
enum class Split { Train, Val, Eval, All };

inline const char* split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Eval: return "eval";
    default: return "all";
  }
}

struct SampleRequest {
  SampleMode mode = SampleMode::Step;
  std::optional<int64_t> sequence_length;
  Split split = Split::All;
  bool cross_trial = false;
};

/// One drawn batch item. `start` is the window offset inside the
/// trajectory (or the concatenated stream for cross-trial windows,
/// where trajectory_index is -1).
struct SampleItem {
  std::map<std::string, Tensor> obs;
  std::map<std::string, Tensor> act;
  std::map<std::string, Tensor> next_obs;
  std::optional<Tensor> is_first;
  int64_t trajectory_index = -1;
  int64_t start = 0;
};

namespace detail {

constexpr char kChunkMagic[4] = {'A', 'K', 'C', '1'};

inline uint8_t dtype_code(Dtype d) { return static_cast<uint8_t>(d); }
inline Dtype dtype_from_code(uint8_t c) {
  if (c > 2) throw IoError("bad dtype code " + std::to_string(c));
  return static_cast<Dtype>(c);
}

template <typename T>
void put_le(std::string& out, T v) {
  for (size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const std::string& in, size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw IoError("chunk header truncated");
  T v = 0;
  for (size_t i = 0; i < sizeof(T); ++i)
    v |= static_cast<T>(static_cast<uint8_t>(in[pos + i])) << (8 * i);
  pos += sizeof(T);
  return v;
}

inline std::string deflate_bytes(const void* data, size_t size) {
  if (size == 0) return {};
  uLongf bound = compressBound(static_cast<uLong>(size));
  std::string out(bound, '\0');
  if (compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                static_cast<const Bytef*>(data), static_cast<uLong>(size),
                Z_DEFAULT_COMPRESSION) != Z_OK)
    throw IoError("deflate failed");
  out.resize(bound);
  return out;
}

inline void inflate_bytes(const std::string& in, void* out, size_t out_size) {
  if (out_size == 0) return;
  uLongf dest = static_cast<uLongf>(out_size);
  if (uncompress(static_cast<Bytef*>(out), &dest,
                 reinterpret_cast<const Bytef*>(in.data()),
                 static_cast<uLong>(in.size())) != Z_OK ||
      dest != out_size)
    throw IoError("inflate failed");
}

inline std::string encode_chunk(const Tensor& t, Compression comp) {
  std::string out;
  out.append(kChunkMagic, 4);
  out.push_back(static_cast<char>(dtype_code(t.dtype)));
  out.push_back(comp == Compression::Deflate ? 1 : 0);
  put_le<uint32_t>(out, static_cast<uint32_t>(t.shape.size()));
  for (int64_t d : t.shape) put_le<uint64_t>(out, static_cast<uint64_t>(d));
  std::string payload;
  if (comp == Compression::Deflate) {
    payload = deflate_bytes(t.raw_data(), t.byte_size());
  } else {
    payload.assign(static_cast<const char*>(t.raw_data()), t.byte_size());
  }
  put_le<uint64_t>(out, static_cast<uint64_t>(t.byte_size()));
  put_le<uint64_t>(out, static_cast<uint64_t>(payload.size()));
  uint32_t crc = crc32(0L, Z_NULL, 0);
  if (t.byte_size() > 0)
    crc = crc32(crc, static_cast<const Bytef*>(t.raw_data()),
                static_cast<uInt>(t.byte_size()));
  put_le<uint32_t>(out, crc);
  out += payload;
  return out;
}

inline Tensor decode_chunk(const std::string& in) {
  if (in.size() < 4 || std::memcmp(in.data(), kChunkMagic, 4) != 0)
    throw IoError("bad chunk magic");
  size_t pos = 4;
  Dtype dtype = dtype_from_code(static_cast<uint8_t>(get_le<uint8_t>(in, pos)));
  uint8_t comp = get_le<uint8_t>(in, pos);
  uint32_t ndims = get_le<uint32_t>(in, pos);
  if (ndims > 16) throw IoError("implausible chunk rank " + std::to_string(ndims));
  std::vector<int64_t> shape;
  for (uint32_t i = 0; i < ndims; ++i)
    shape.push_back(static_cast<int64_t>(get_le<uint64_t>(in, pos)));
  uint64_t raw_size = get_le<uint64_t>(in, pos);
  uint64_t stored_size = get_le<uint64_t>(in, pos);
  uint32_t crc = get_le<uint32_t>(in, pos);
  if (in.size() - pos != stored_size) throw IoError("chunk payload truncated");
  Tensor t = zeros(dtype, shape);
  if (t.byte_size() != raw_size) throw IoError("chunk size disagrees with its shape");
  if (comp == 1) {
    inflate_bytes(in.substr(pos), t.raw_data(), t.byte_size());
  } else {
    if (stored_size != raw_size) throw IoError("uncompressed chunk size mismatch");
    std::memcpy(t.raw_data(), in.data() + pos, t.byte_size());
  }
  uint32_t actual = crc32(0L, Z_NULL, 0);
  if (t.byte_size() > 0)
    actual = crc32(actual, static_cast<const Bytef*>(t.raw_data()),
                   static_cast<uInt>(t.byte_size()));
  if (actual != crc) throw IoError("chunk crc mismatch");
  return t;
}

inline Json schema_to_json(const SchemaEntry& e) {
  return Json{{"saved_key", e.saved_key},
              {"shape", e.shape},
              {"dtype", dtype_name(e.dtype)},
              {"output_key", e.output_key}};
}

inline SchemaEntry schema_from_json(const Json& j) {
  SchemaEntry e;
  e.saved_key = j.at("saved_key").get<std::string>();
  e.shape = j.at("shape").get<std::vector<int64_t>>();
  e.dtype = dtype_from_name(j.at("dtype").get<std::string>());
  e.output_key = j.at("output_key").get<std::string>();
  return e;
}

inline Json config_to_json(const std::map<std::string, SchemaEntry>& c) {
  Json j = Json::object();
  for (const auto& [k, e] : c) j[k] = schema_to_json(e);
  return j;
}

inline std::map<std::string, SchemaEntry> config_from_json(const Json& j) {
  std::map<std::string, SchemaEntry> c;
  for (auto it = j.begin(); it != j.end(); ++it) c[it.key()] = schema_from_json(it.value());
  return c;
}

inline void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + tmp.string() + "'");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace detail

/// On-disk chunked trajectory dataset. Layout: <root>/manifest.json
/// plus obs|act|goal/<saved_key>/t<index>.bin, one chunk per
/// trajectory per key. Single writer, many concurrent readers; each
/// add_trajectory is atomic (chunks land via temp+rename, the
/// manifest is rewritten last).
class TrajectoryStore {
 public:
  enum class IoMode { Read, Write, Append };

  static TrajectoryStore open(const std::filesystem::path& path, IoMode mode,
                              std::optional<StoreManifest> manifest = std::nullopt) {
    TrajectoryStore store;
    store.root_ = path;
    store.mode_ = mode;
    std::filesystem::path manifest_path = path / "manifest.json";
    bool exists = std::filesystem::exists(manifest_path);

    if (mode == IoMode::Read) {
      if (!exists) throw IoError("no trajectory store at '" + path.string() + "'");
      store.manifest_ = store.load_manifest();
      return store;
    }
    if (mode == IoMode::Write || !exists) {
      if (!manifest) throw UsageError("creating a store requires a manifest");
      store.manifest_ = *manifest;
      store.manifest_.num_trajectories = 0;
      store.manifest_.lengths.clear();
      store.validate_manifest(store.manifest_);
      if (store.manifest_.split_seed == 0)
        store.manifest_.split_seed = hash_mix(
            0x5709EULL,
            static_cast<uint64_t>(std::chrono::steady_clock::now().time_since_epoch().count()));
      std::filesystem::create_directories(path);
      store.drop_chunks_from(0);
      store.write_manifest();
      return store;
    }

    // append to an existing store
    store.manifest_ = store.load_manifest();
    if (manifest) store.check_schema_compatible(*manifest);
    store.truncate_trailing_invalid();
    return store;
  }

  const StoreManifest& manifest() const { return manifest_; }
  int64_t num_trajectories() const { return manifest_.num_trajectories; }
  const std::vector<int64_t>& lengths() const { return manifest_.lengths; }
  const std::filesystem::path& root() const { return root_; }

  void add_trajectory(const std::map<std::string, std::vector<Tensor>>& observations,
                      const std::map<std::string, std::vector<Tensor>>& actions,
                      const std::map<std::string, Tensor>& goals = {}) {
    if (mode_ == IoMode::Read) throw UsageError("store is open read-only");

    int64_t t_act = check_group(actions, manifest_.act_config, "act");
    int64_t t_obs = check_group(observations, manifest_.obs_config, "obs");
    int64_t expected_obs = t_act + (manifest_.terminal_observation ? 1 : 0);
    if (!manifest_.obs_config.empty() && t_obs != expected_obs)
      throw SchemaError("expected " + std::to_string(expected_obs) + " observations for " +
                        std::to_string(t_act) + " actions, got " + std::to_string(t_obs));
    for (const auto& [key, entry] : manifest_.goal_config) {
      auto it = goals.find(key);
      if (it == goals.end()) throw SchemaError("missing goal key '" + key + "'");
      check_step_tensor(it->second, entry, key);
    }
    for (const auto& [key, _] : goals)
      if (!manifest_.goal_config.count(key))
        throw SchemaError("goal key '" + key + "' not in schema");

    int64_t index = manifest_.num_trajectories;
    for (const auto& [key, entry] : manifest_.obs_config)
      write_chunk("obs", key, index, stack(observations.at(key), entry));
    for (const auto& [key, entry] : manifest_.act_config)
      write_chunk("act", key, index, stack(actions.at(key), entry));
    for (const auto& [key, _] : manifest_.goal_config)
      write_chunk("goal", key, index, goals.at(key));

    manifest_.lengths.push_back(t_act);
    manifest_.num_trajectories = index + 1;
    write_manifest();
  }

  /// Arrays keyed by output_key: obs/act stacked to [T(,+1), *shape],
  /// goals kept per-trial.
  std::map<std::string, Tensor> get_trajectory(int64_t index) const {
    check_index(index);
    std::map<std::string, Tensor> out;
    for (const auto& [key, entry] : manifest_.obs_config)
      out[entry.output_key] = read_chunk("obs", key, index);
    for (const auto& [key, entry] : manifest_.act_config)
      out[entry.output_key] = read_chunk("act", key, index);
    for (const auto& [key, entry] : manifest_.goal_config)
      out[entry.output_key] = read_chunk("goal", key, index);
    return out;
  }

  void assign_split(const std::map<std::string, double>& ratios) {
    if (mode_ == IoMode::Read) throw UsageError("store is open read-only");
    StoreManifest m = manifest_;
    m.split_ratios = ratios;
    validate_manifest(m);
    manifest_ = m;
    write_manifest();
  }

  std::vector<int64_t> split_indices(Split split) const {
    std::vector<int64_t> order(static_cast<size_t>(manifest_.num_trajectories));
    std::iota(order.begin(), order.end(), 0);
    if (split == Split::All) return order;
    std::sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
      uint64_t ha = hash_mix(manifest_.split_seed, static_cast<uint64_t>(a));
      uint64_t hb = hash_mix(manifest_.split_seed, static_cast<uint64_t>(b));
      return ha != hb ? ha < hb : a < b;
    });
    auto [n_train, n_val, n_eval] = split_sizes();
    size_t begin = 0, count = 0;
    switch (split) {
      case Split::Train: begin = 0; count = n_train; break;
      case Split::Val: begin = n_train; count = n_val; break;
      default: begin = n_train + n_val; count = n_eval; break;
    }
    std::vector<int64_t> out(order.begin() + begin, order.begin() + begin + count);
    std::sort(out.begin(), out.end());
    return out;
  }

  SampleItem sample(const SampleRequest& request, SplitMix64& rng) const {
    std::vector<int64_t> indices = split_indices(request.split);
    if (indices.empty()) throw UsageError("split '" + std::string(split_name(request.split)) +
                                          "' is empty");
    switch (request.mode) {
      case SampleMode::Trajectory: {
        int64_t idx = indices[rng.next_below(indices.size())];
        SampleItem item;
        item.trajectory_index = idx;
        fill_full(item, idx);
        return item;
      }
      case SampleMode::Step: return sample_step(indices, rng);
      case SampleMode::Sequence: break;
    }
    if (!request.sequence_length || *request.sequence_length < 1)
      throw UsageError("sequence mode requires sequence_length >= 1");
    return request.cross_trial ? sample_cross(indices, *request.sequence_length, rng)
                               : sample_window(indices, *request.sequence_length, rng);
  }

  /// Full integrity check; returns an error description naming the
  /// first bad trajectory, or nullopt when the store is sound.
  std::optional<std::string> validate() const {
    if (static_cast<int64_t>(manifest_.lengths.size()) != manifest_.num_trajectories)
      return "manifest lengths disagree with num_trajectories";
    for (int64_t i = 0; i < manifest_.num_trajectories; ++i)
      if (auto err = check_trajectory(i)) return "trajectory " + std::to_string(i) + ": " + *err;
    return std::nullopt;
  }

 private:
  TrajectoryStore() = default;

  static void validate_manifest(const StoreManifest& m) {
    if (m.format_version != 1)
      throw IoError("unsupported format_version " + std::to_string(m.format_version));
    double sum = 0.0;
    for (const char* k : {"train", "val", "eval"}) {
      auto it = m.split_ratios.find(k);
      if (it == m.split_ratios.end() || it->second < 0.0)
        throw ConfigError("split_ratios needs non-negative train/val/eval entries");
      sum += it->second;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ConfigError("split ratios sum to " + std::to_string(sum) + ", expected 1");
    for (int64_t len : m.lengths)
      if (len < 0) throw IoError("negative trajectory length in manifest");
  }

  void check_schema_compatible(const StoreManifest& incoming) const {
    auto check = [](const std::map<std::string, SchemaEntry>& stored,
                    const std::map<std::string, SchemaEntry>& fresh, const char* group) {
      if (stored != fresh)
        throw SchemaError(std::string("schema mismatch in ") + group +
                          " config between store and append request");
    };
    check(manifest_.obs_config, incoming.obs_config, "obs");
    check(manifest_.act_config, incoming.act_config, "act");
    check(manifest_.goal_config, incoming.goal_config, "goal");
    if (manifest_.terminal_observation != incoming.terminal_observation)
      throw SchemaError("observation length convention differs from the stored one");
    if (manifest_.compression != incoming.compression)
      throw SchemaError("compression setting differs from the stored one");
  }

  int64_t check_group(const std::map<std::string, std::vector<Tensor>>& data,
                      const std::map<std::string, SchemaEntry>& config,
                      const char* group) const {
    std::optional<int64_t> t;
    for (const auto& [key, entry] : config) {
      auto it = data.find(key);
      if (it == data.end())
        throw SchemaError(std::string("missing ") + group + " key '" + key + "'");
      int64_t len = static_cast<int64_t>(it->second.size());
      if (t && *t != len)
        throw SchemaError(std::string(group) + " lists have unequal lengths");
      t = len;
      for (const Tensor& step : it->second) check_step_tensor(step, entry, key);
    }
    for (const auto& [key, _] : data)
      if (!config.count(key))
        throw SchemaError(std::string(group) + " key '" + key + "' not in schema");
    return t.value_or(0);
  }

  static void check_step_tensor(const Tensor& t, const SchemaEntry& entry,
                                const std::string& key) {
    if (t.dtype != entry.dtype || t.shape != entry.shape) {
      std::string want, got;
      for (int64_t d : entry.shape) want += (want.empty() ? "" : "x") + std::to_string(d);
      for (int64_t d : t.shape) got += (got.empty() ? "" : "x") + std::to_string(d);
      throw SchemaError("tensor for key '" + key + "' has shape " + got + " " +
                        dtype_name(t.dtype) + ", schema expects " + want + " " +
                        dtype_name(entry.dtype));
    }
  }

  static Tensor stack(const std::vector<Tensor>& steps, const SchemaEntry& entry) {
    std::vector<int64_t> shape = {static_cast<int64_t>(steps.size())};
    shape.insert(shape.end(), entry.shape.begin(), entry.shape.end());
    Tensor out = zeros(entry.dtype, shape);
    size_t step_bytes = static_cast<size_t>(Tensor::numel_of(entry.shape)) *
                        dtype_size(entry.dtype);
    auto* dst = static_cast<char*>(out.raw_data());
    for (size_t i = 0; i < steps.size(); ++i)
      std::memcpy(dst + i * step_bytes, steps[i].raw_data(), step_bytes);
    return out;
  }

  std::filesystem::path chunk_path(const std::string& group, const std::string& key,
                                   int64_t index) const {
    return root_ / group / key / ("t" + std::to_string(index) + ".bin");
  }

  void write_chunk(const std::string& group, const std::string& key, int64_t index,
                   const Tensor& t) {
    std::filesystem::path path = chunk_path(group, key, index);
    std::filesystem::create_directories(path.parent_path());
    detail::atomic_write(path, detail::encode_chunk(t, manifest_.compression));
  }

  Tensor read_chunk(const std::string& group, const std::string& key, int64_t index) const {
    return detail::decode_chunk(detail::read_file_bytes(chunk_path(group, key, index)));
  }

  void for_each_key(const std::function<void(const std::string&, const std::string&,
                                             const SchemaEntry&)>& fn) const {
    for (const auto& [k, e] : manifest_.obs_config) fn("obs", k, e);
    for (const auto& [k, e] : manifest_.act_config) fn("act", k, e);
    for (const auto& [k, e] : manifest_.goal_config) fn("goal", k, e);
  }

  std::optional<std::string> check_trajectory(int64_t index) const {
    std::optional<std::string> err;
    for_each_key([&](const std::string& group, const std::string& key, const SchemaEntry&) {
      if (err) return;
      try {
        (void)read_chunk(group, key, index);
      } catch (const Error& e) {
        err = group + "/" + key + ": " + e.what();
      }
    });
    return err;
  }

  void drop_trajectory_files(int64_t index) {
    for_each_key([&](const std::string& group, const std::string& key, const SchemaEntry&) {
      std::error_code ec;
      std::filesystem::remove(chunk_path(group, key, index), ec);
    });
  }

  /// Removes chunk files at or beyond `first` (leftovers of an
  /// interrupted add that never reached the manifest).
  void drop_chunks_from(int64_t first) {
    for (int64_t i = first;; ++i) {
      bool any = false;
      for_each_key([&](const std::string& group, const std::string& key, const SchemaEntry&) {
        std::error_code ec;
        if (std::filesystem::remove(chunk_path(group, key, i), ec)) any = true;
      });
      if (!any) break;
    }
  }

  void truncate_trailing_invalid() {
    drop_chunks_from(manifest_.num_trajectories);
    bool changed = false;
    while (manifest_.num_trajectories > 0 &&
           check_trajectory(manifest_.num_trajectories - 1)) {
      drop_trajectory_files(manifest_.num_trajectories - 1);
      manifest_.lengths.pop_back();
      --manifest_.num_trajectories;
      changed = true;
    }
    if (changed) write_manifest();
  }

  void check_index(int64_t index) const {
    if (index < 0 || index >= manifest_.num_trajectories)
      throw UsageError("trajectory index " + std::to_string(index) + " out of range [0, " +
                       std::to_string(manifest_.num_trajectories) + ")");
  }

  std::tuple<size_t, size_t, size_t> split_sizes() const {
    const int64_t n = manifest_.num_trajectories;
    double rt = manifest_.split_ratios.at("train");
    double rv = manifest_.split_ratios.at("val");
    double re = manifest_.split_ratios.at("eval");
    int64_t ft = static_cast<int64_t>(rt * n), fv = static_cast<int64_t>(rv * n),
            fe = static_cast<int64_t>(re * n);
    int64_t rest = n - ft - fv - fe;
    // largest fractional remainder takes the leftover slots, ties to train first
    std::array<std::pair<double, int>, 3> rem = {
        std::pair{rt * n - ft, 0}, std::pair{rv * n - fv, 1}, std::pair{re * n - fe, 2}};
    std::stable_sort(rem.begin(), rem.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    int64_t extra[3] = {0, 0, 0};
    for (int i = 0; rest > 0; ++i, --rest) ++extra[rem[static_cast<size_t>(i % 3)].second];
    return {static_cast<size_t>(ft + extra[0]), static_cast<size_t>(fv + extra[1]),
            static_cast<size_t>(fe + extra[2])};
  }

  void fill_full(SampleItem& item, int64_t index) const {
    for (const auto& [key, entry] : manifest_.obs_config)
      item.obs[entry.output_key] = read_chunk("obs", key, index);
    for (const auto& [key, entry] : manifest_.act_config)
      item.act[entry.output_key] = read_chunk("act", key, index);
  }

  static Tensor slice_rows(const Tensor& stacked, int64_t start, int64_t count) {
    std::vector<int64_t> shape = stacked.shape;
    shape[0] = count;
    Tensor out = zeros(stacked.dtype, shape);
    size_t row_bytes = stacked.shape[0] == 0
                           ? 0
                           : stacked.byte_size() / static_cast<size_t>(stacked.shape[0]);
    std::memcpy(out.raw_data(),
                static_cast<const char*>(stacked.raw_data()) +
                    static_cast<size_t>(start) * row_bytes,
                static_cast<size_t>(count) * row_bytes);
    return out;
  }

  int64_t obs_len(int64_t index) const {
    return manifest_.lengths[static_cast<size_t>(index)] +
           (manifest_.terminal_observation ? 1 : 0);
  }

  SampleItem sample_step(const std::vector<int64_t>& indices, SplitMix64& rng) const {
    // a transition needs o_{t+1}; without a stored terminal
    // observation the last action of a trial has none
    int64_t shift = manifest_.terminal_observation ? 0 : 1;
    std::vector<int64_t> counts;
    int64_t total = 0;
    for (int64_t idx : indices) {
      int64_t c = std::max<int64_t>(0, manifest_.lengths[static_cast<size_t>(idx)] - shift);
      counts.push_back(c);
      total += c;
    }
    if (total == 0) throw UsageError("no transitions available in this split");
    int64_t pick = static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(total)));
    size_t which = 0;
    while (pick >= counts[which]) pick -= counts[which++];
    int64_t idx = indices[which];

    SampleItem item;
    item.trajectory_index = idx;
    item.start = pick;
    for (const auto& [key, entry] : manifest_.obs_config) {
      Tensor full = read_chunk("obs", key, idx);
      item.obs[entry.output_key] = slice_rows(full, pick, 1);
      item.next_obs[entry.output_key] = slice_rows(full, pick + 1, 1);
    }
    for (const auto& [key, entry] : manifest_.act_config)
      item.act[entry.output_key] = slice_rows(read_chunk("act", key, idx), pick, 1);
    return item;
  }

  SampleItem sample_window(const std::vector<int64_t>& indices, int64_t len,
                           SplitMix64& rng) const {
    std::vector<int64_t> counts;
    int64_t total = 0;
    for (int64_t idx : indices) {
      int64_t c = std::max<int64_t>(0, obs_len(idx) - len + 1);
      counts.push_back(c);
      total += c;
    }
    if (total == 0)
      throw UsageError("sequence_length " + std::to_string(len) +
                       " exceeds every trajectory in this split");
    int64_t pick = static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(total)));
    size_t which = 0;
    while (pick >= counts[which]) pick -= counts[which++];
    int64_t idx = indices[which];

    SampleItem item;
    item.trajectory_index = idx;
    item.start = pick;
    for (const auto& [key, entry] : manifest_.obs_config)
      item.obs[entry.output_key] = slice_rows(read_chunk("obs", key, idx), pick, len);
    for (const auto& [key, entry] : manifest_.act_config) {
      Tensor full = read_chunk("act", key, idx);
      int64_t take = std::min(len, full.shape[0] - pick);
      item.act[entry.output_key] = slice_rows(full, pick, std::max<int64_t>(0, take));
    }
    return item;
  }

  SampleItem sample_cross(const std::vector<int64_t>& indices, int64_t len,
                          SplitMix64& rng) const {
    std::vector<int64_t> starts;  // concat offset where each trial begins
    int64_t total = 0;
    for (int64_t idx : indices) {
      starts.push_back(total);
      total += obs_len(idx);
    }
    if (total < len)
      throw UsageError("sequence_length " + std::to_string(len) +
                       " exceeds the concatenated split length " + std::to_string(total));
    int64_t pick = static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(total - len + 1)));

    SampleItem item;
    item.trajectory_index = -1;
    item.start = pick;
    Tensor is_first = zeros(Dtype::U8, {len});
    for (size_t i = 0; i < indices.size(); ++i)
      if (starts[i] >= pick && starts[i] < pick + len)
        is_first.as<uint8_t>()[static_cast<size_t>(starts[i] - pick)] = 1;
    item.is_first = std::move(is_first);

    auto gather = [&](const std::string& group,
                      const std::map<std::string, SchemaEntry>& config, bool obs_lengths,
                      std::map<std::string, Tensor>& out) {
      for (const auto& [key, entry] : config) {
        std::vector<int64_t> shape = {len};
        shape.insert(shape.end(), entry.shape.begin(), entry.shape.end());
        Tensor window = zeros(entry.dtype, shape);
        size_t row_bytes = static_cast<size_t>(Tensor::numel_of(entry.shape)) *
                           dtype_size(entry.dtype);
        auto* dst = static_cast<char*>(window.raw_data());
        int64_t filled = 0;
        for (size_t i = 0; i < indices.size() && filled < len; ++i) {
          int64_t trial_len =
              obs_lengths ? obs_len(indices[i])
                          : manifest_.lengths[static_cast<size_t>(indices[i])];
          int64_t concat_len = obs_len(indices[i]);
          int64_t lo = std::max<int64_t>(pick, starts[i]);
          int64_t hi = std::min<int64_t>(pick + len, starts[i] + concat_len);
          if (lo >= hi) continue;
          Tensor full = read_chunk(group, key, indices[i]);
          for (int64_t p = lo; p < hi; ++p) {
            int64_t local = p - starts[i];
            // action streams are one shorter than obs streams under the
            // T-obs convention; the gap row stays zero
            if (local < trial_len)
              std::memcpy(dst + static_cast<size_t>(p - pick) * row_bytes,
                          static_cast<const char*>(full.raw_data()) +
                              static_cast<size_t>(local) * row_bytes,
                          row_bytes);
            ++filled;
          }
        }
        out[entry.output_key] = std::move(window);
      }
    };
    gather("obs", manifest_.obs_config, true, item.obs);
    gather("act", manifest_.act_config, false, item.act);
    return item;
  }

  StoreManifest load_manifest() const {
    Json j;
    try {
      j = Json::parse(detail::read_file_bytes(root_ / "manifest.json"));
    } catch (const Json::parse_error& e) {
      throw IoError("corrupt manifest at '" + root_.string() + "': " + e.what());
    }
    StoreManifest m;
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != 1)
      throw IoError("unsupported format_version " + std::to_string(m.format_version));
    m.obs_config = detail::config_from_json(j.at("obs_config"));
    m.act_config = detail::config_from_json(j.at("act_config"));
    m.goal_config = detail::config_from_json(j.at("goal_config"));
    m.num_trajectories = j.at("num_trajectories").get<int64_t>();
    m.lengths = j.at("lengths").get<std::vector<int64_t>>();
    m.split_ratios = j.at("split_ratios").get<std::map<std::string, double>>();
    m.split_seed = j.at("split_seed").get<uint64_t>();
    m.compression = j.at("compression").get<std::string>() == "deflate" ? Compression::Deflate
                                                                        : Compression::None;
    m.terminal_observation = j.at("terminal_observation").get<bool>();
    validate_manifest(m);
    if (static_cast<int64_t>(m.lengths.size()) != m.num_trajectories)
      throw IoError("manifest lengths disagree with num_trajectories");
    return m;
  }

  void write_manifest() const {
    Json j;
    j["format_version"] = manifest_.format_version;
    j["obs_config"] = detail::config_to_json(manifest_.obs_config);
    j["act_config"] = detail::config_to_json(manifest_.act_config);
    j["goal_config"] = detail::config_to_json(manifest_.goal_config);
    j["num_trajectories"] = manifest_.num_trajectories;
    j["lengths"] = manifest_.lengths;
    j["split_ratios"] = manifest_.split_ratios;
    j["split_seed"] = manifest_.split_seed;
    j["compression"] = manifest_.compression == Compression::Deflate ? "deflate" : "none";
    j["terminal_observation"] = manifest_.terminal_observation;
    detail::atomic_write(root_ / "manifest.json", j.dump(2) + "\n");
  }

  std::filesystem::path root_;
  IoMode mode_ = IoMode::Read;
  StoreManifest manifest_;
};

}  // namespace arenakit
