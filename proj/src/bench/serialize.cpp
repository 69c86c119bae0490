#include "sdv/bench/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <sodium/utils.h>

#include "json.hpp"
#include "sdv/core/errors.hpp"

namespace sdv {

namespace {

using Json = nlohmann::ordered_json;

// ---- base64 ----------------------------------------------------------------

std::string base64_encode(const std::vector<std::uint8_t>& in) {
  std::string out(sodium_base64_encoded_len(in.size(), sodium_base64_VARIANT_ORIGINAL), '\0');
  sodium_bin2base64(out.data(), out.size(), in.data(), in.size(), sodium_base64_VARIANT_ORIGINAL);
  out.pop_back();  // terminating NUL
  return out;
}

// Returns false on any malformed input.
bool base64_decode(std::string_view in, std::vector<std::uint8_t>& out) {
  out.resize(in.size() / 4 * 3 + 3);
  std::size_t length = 0;
  const char* end = nullptr;
  if (sodium_base642bin(out.data(), out.size(), in.data(), in.size(), nullptr, &length, &end,
                        sodium_base64_VARIANT_ORIGINAL) != 0 ||
      end != in.data() + in.size())
    return false;
  out.resize(length);
  return true;
}

std::vector<std::uint8_t> to_bytes(const std::vector<double>& values) {
  std::vector<std::uint8_t> out(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) out[i * 8 + static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  return out;
}

std::vector<double> from_bytes(const std::vector<std::uint8_t>& bytes) {
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= std::uint64_t{bytes[i * 8 + static_cast<std::size_t>(b)]} << (8 * b);
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

// ---- byte offsets of JSON pointers -----------------------------------------

// Walks already-validated JSON text to the value a pointer names.
class Locator {
 public:
  explicit Locator(std::string_view text) : s_(text) {}

  std::size_t offset(const std::string& pointer) {
    i_ = 0;
    ws();
    std::size_t start = 0;
    while (start < pointer.size()) {
      std::size_t end = pointer.find('/', start + 1);
      if (end == std::string::npos) end = pointer.size();
      std::string token = pointer.substr(start + 1, end - start - 1);
      for (std::size_t p; (p = token.find("~1")) != std::string::npos;) token.replace(p, 2, "/");
      for (std::size_t p; (p = token.find("~0")) != std::string::npos;) token.replace(p, 2, "~");
      if (!step(token)) break;
      start = end;
    }
    return i_;
  }

 private:
  void ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\n' || s_[i_] == '\r' || s_[i_] == '\t')) ++i_;
  }
  std::string string() {
    std::string out;
    ++i_;
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\') {
        ++i_;
        if (i_ < s_.size()) out += s_[i_] == 'n' ? '\n' : s_[i_];
      } else {
        out += s_[i_];
      }
      ++i_;
    }
    ++i_;
    return out;
  }
  void skip() {
    ws();
    if (i_ >= s_.size()) return;
    const char c = s_[i_];
    if (c == '"') {
      string();
    } else if (c == '{' || c == '[') {
      const char close = c == '{' ? '}' : ']';
      ++i_;
      ws();
      while (i_ < s_.size() && s_[i_] != close) {
        if (c == '{') {
          string();
          ws();
          ++i_;  // ':'
        }
        skip();
        ws();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
        ws();
      }
      ++i_;
    } else {
      while (i_ < s_.size() && std::strchr(",]} \n\r\t", s_[i_]) == nullptr) ++i_;
    }
  }
  bool step(const std::string& token) {
    if (i_ >= s_.size()) return false;
    if (s_[i_] == '{') {
      ++i_;
      ws();
      while (i_ < s_.size() && s_[i_] != '}') {
        const std::size_t key_at = i_;
        const std::string key = string();
        ws();
        ++i_;
        ws();
        if (key == token) return true;
        (void)key_at;
        skip();
        ws();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
        ws();
      }
      return false;
    }
    if (s_[i_] == '[') {
      std::size_t n = 0;
      try {
        n = std::stoul(token);
      } catch (...) {
        return false;
      }
      ++i_;
      ws();
      for (std::size_t k = 0; k < n && i_ < s_.size() && s_[i_] != ']'; ++k) {
        skip();
        ws();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
        ws();
      }
      return i_ < s_.size() && s_[i_] != ']';
    }
    return false;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

// ---- reading ---------------------------------------------------------------

struct Context {
  std::string_view text;
  const BlobOptions& blobs;
};

class Reader {
 public:
  Reader(const Json& j, std::string path, const Context& ctx) : j_(j), path_(std::move(path)), ctx_(ctx) {}

  [[noreturn]] void fail(const std::string& what) const { fail_at(path_, what); }

  [[noreturn]] void fail_at(const std::string& path, const std::string& what) const {
    throw ParseError(what, Locator(ctx_.text).offset(path), path.empty() ? "/" : path);
  }

  const std::string& path() const noexcept { return path_; }

  // Exactly these fields, no more and no fewer.
  void fields(std::initializer_list<std::string_view> names) const {
    if (!j_.is_object()) fail("expected an object");
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool known = false;
      for (std::string_view n : names) known = known || it.key() == n;
      if (!known) fail_at(child_path(it.key()), "unknown field '" + it.key() + "'");
    }
    for (std::string_view n : names)
      if (!j_.contains(n)) fail("missing field '" + std::string(n) + "'");
  }

  Reader operator[](std::string_view key) const {
    if (!j_.is_object() || !j_.contains(key)) fail("missing field '" + std::string(key) + "'");
    return Reader(j_.at(std::string(key)), child_path(std::string(key)), ctx_);
  }

  Reader operator[](std::size_t index) const {
    return Reader(j_.at(index), path_ + "/" + std::to_string(index), ctx_);
  }

  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  std::size_t size(std::size_t expected) const {
    if (size() != expected) fail("expected " + std::to_string(expected) + " elements");
    return expected;
  }

  bool is_null() const noexcept { return j_.is_null(); }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }
  std::uint64_t u64() const {
    if (!j_.is_number_unsigned()) fail("expected a non-negative integer");
    return j_.get<std::uint64_t>();
  }
  std::size_t size_value() const { return static_cast<std::size_t>(u64()); }
  int integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    const auto v = j_.get<std::int64_t>();
    if (v < INT32_MIN || v > INT32_MAX) fail("integer out of range");
    return static_cast<int>(v);
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail("expected a boolean");
    return j_.get<bool>();
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  std::vector<std::uint8_t> bytes() const {
    const std::string s = string();
    std::vector<std::uint8_t> out;
    if (s.rfind("b64:", 0) == 0) {
      if (!base64_decode(std::string_view(s).substr(4), out)) fail("malformed base64 blob");
      return out;
    }
    if (s.rfind("sidecar:", 0) == 0) {
      const std::string name = s.substr(8);
      if (name.empty() || name.find('/') != std::string::npos || name.find("..") != std::string::npos)
        fail("bad sidecar name");
      if (ctx_.blobs.sidecar_dir.empty()) fail("sidecar blob without a base directory");
      std::ifstream in(ctx_.blobs.sidecar_dir / name, std::ios::binary);
      if (!in) fail("cannot open sidecar '" + name + "'");
      out.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
      return out;
    }
    fail("expected a b64: or sidecar: blob");
  }

  std::vector<double> doubles() const {
    const auto b = bytes();
    if (b.size() % 8 != 0) fail("blob length is not a multiple of 8");
    return from_bytes(b);
  }

  template <class Fn>
  auto guard(Fn&& fn) const {
    try {
      return fn();
    } catch (const ParseError&) {
      throw;
    } catch (const InvariantError& e) {
      throw InvariantError(std::string(e.what()) + " (field " + (path_.empty() ? "/" : path_) + ")");
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " (field " + (path_.empty() ? "/" : path_) + ")");
    } catch (const Error& e) {
      fail(e.what());
    }
  }

 private:
  std::string child_path(const std::string& key) const {
    std::string k = key;
    for (std::size_t p = 0; (p = k.find('~', p)) != std::string::npos; p += 2) k.replace(p, 1, "~0");
    for (std::size_t p = 0; (p = k.find('/', p)) != std::string::npos; p += 2) k.replace(p, 1, "~1");
    return path_ + "/" + k;
  }

  const Json& j_;
  std::string path_;
  const Context& ctx_;
};

// ---- writing ---------------------------------------------------------------

class Writer {
 public:
  explicit Writer(const BlobOptions& blobs) : blobs_(blobs) {}

  Json blob(const std::vector<std::uint8_t>& bytes) {
    if (!blobs_.sidecar_dir.empty() && bytes.size() > blobs_.threshold) {
      const std::string name = blobs_.sidecar_stem + "." + std::to_string(count_++) + ".bin";
      std::ofstream out(blobs_.sidecar_dir / name, std::ios::binary | std::ios::trunc);
      out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
      if (!out) throw Error("cannot write sidecar '" + name + "'");
      return "sidecar:" + name;
    }
    return "b64:" + base64_encode(bytes);
  }
  Json doubles(const std::vector<double>& v) { return blob(to_bytes(v)); }

 private:
  const BlobOptions& blobs_;
  int count_ = 0;
};

// ---- per-type codecs -------------------------------------------------------

Json vec(const Vec2& v) { return Json::array({v.x(), v.y()}); }
Json vec(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }
Vec2 vec2(const Reader& r) {
  r.size(2);
  return {r[std::size_t{0}].number(), r[1].number()};
}
Vec3 vec3(const Reader& r) {
  r.size(3);
  return {r[std::size_t{0}].number(), r[1].number(), r[2].number()};
}

template <class T>
Json number_array(const std::vector<T>& v) {
  Json out = Json::array();
  for (const T& x : v) out.push_back(x);
  return out;
}
std::vector<double> doubles_list(const Reader& r) {
  std::vector<double> out;
  for (std::size_t i = 0, n = r.size(); i < n; ++i) out.push_back(r[i].number());
  return out;
}
std::vector<std::uint64_t> u64_list(const Reader& r) {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0, n = r.size(); i < n; ++i) out.push_back(r[i].u64());
  return out;
}
std::vector<std::string> string_list(const Reader& r) {
  std::vector<std::string> out;
  for (std::size_t i = 0, n = r.size(); i < n; ++i) out.push_back(r[i].string());
  return out;
}

Json encode(const OrientedBox& b) {
  return {{"center", vec(b.center)}, {"length", b.length}, {"width", b.width}, {"height", b.height}, {"yaw", b.yaw}};
}
OrientedBox decode_box(const Reader& r) {
  r.fields({"center", "length", "width", "height", "yaw"});
  OrientedBox b;
  b.center = vec3(r["center"]);
  b.length = r["length"].number();
  b.width = r["width"].number();
  b.height = r["height"].number();
  b.yaw = r["yaw"].number();
  r.guard([&] { b.validate(); return 0; });
  return b;
}

Json encode(const LaneLayout& l) {
  return {{"lane_count", l.lane_count}, {"lane_width", l.lane_width}, {"ego_lane", l.ego_lane},
          {"x_min", l.x_min}, {"x_max", l.x_max}};
}
LaneLayout decode_lanes(const Reader& r) {
  r.fields({"lane_count", "lane_width", "ego_lane", "x_min", "x_max"});
  LaneLayout l;
  l.lane_count = r["lane_count"].integer();
  l.lane_width = r["lane_width"].number();
  l.ego_lane = r["ego_lane"].integer();
  l.x_min = r["x_min"].number();
  l.x_max = r["x_max"].number();
  r.guard([&] { l.validate(); return 0; });
  return l;
}

Json encode(const Obstacle& o) {
  return {{"box", encode(o.box)}, {"is_moving", o.is_moving}, {"velocity", vec(o.velocity)}};
}
Obstacle decode_obstacle(const Reader& r) {
  r.fields({"box", "is_moving", "velocity"});
  return {decode_box(r["box"]), r["is_moving"].boolean(), vec2(r["velocity"])};
}
Json encode_obstacles(const std::vector<Obstacle>& v) {
  Json out = Json::array();
  for (const auto& o : v) out.push_back(encode(o));
  return out;
}
std::vector<Obstacle> decode_obstacles(const Reader& r) {
  std::vector<Obstacle> out;
  for (std::size_t i = 0, n = r.size(); i < n; ++i) out.push_back(decode_obstacle(r[i]));
  return out;
}

RoadType decode_road(const Reader& r) {
  return r.guard([&] { return parse_road_type(r.string()); });
}

Json encode(const RigidTransform& t) {
  Json rot = Json::array();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) rot.push_back(t.rotation()(i, k));
  return {{"rotation", rot}, {"translation", vec(t.translation())}};
}
RigidTransform decode_transform(const Reader& r) {
  r.fields({"rotation", "translation"});
  const Reader rot = r["rotation"];
  rot.size(9);
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) m(i, k) = rot[static_cast<std::size_t>(3 * i + k)].number();
  const Vec3 t = vec3(r["translation"]);
  return r.guard([&] { return RigidTransform(m, t); });
}

Json encode(const LidarConfig& l) {
  return {{"pose", encode(l.pose)},
          {"azimuth_min", l.azimuth_min},
          {"azimuth_step", l.azimuth_step},
          {"azimuth_count", l.azimuth_count},
          {"elevation_min", l.elevation_min},
          {"elevation_step", l.elevation_step},
          {"elevation_count", l.elevation_count},
          {"max_range", l.max_range},
          {"range_noise", l.range_noise}};
}
LidarConfig decode_lidar(const Reader& r) {
  r.fields({"pose", "azimuth_min", "azimuth_step", "azimuth_count", "elevation_min", "elevation_step",
            "elevation_count", "max_range", "range_noise"});
  LidarConfig l;
  l.pose = decode_transform(r["pose"]);
  l.azimuth_min = r["azimuth_min"].number();
  l.azimuth_step = r["azimuth_step"].number();
  l.azimuth_count = r["azimuth_count"].integer();
  l.elevation_min = r["elevation_min"].number();
  l.elevation_step = r["elevation_step"].number();
  l.elevation_count = r["elevation_count"].integer();
  l.max_range = r["max_range"].number();
  l.range_noise = r["range_noise"].number();
  r.guard([&] { l.validate(); return 0; });
  return l;
}

Json encode(const CameraModel& c) {
  return {{"focal_length", c.focal_length}, {"image_width", c.image_width}, {"image_height", c.image_height},
          {"cx", c.cx}, {"cy", c.cy}, {"rig_offset", c.rig_offset}};
}
CameraModel decode_camera(const Reader& r) {
  r.fields({"focal_length", "image_width", "image_height", "cx", "cy", "rig_offset"});
  CameraModel c;
  c.focal_length = r["focal_length"].number();
  c.image_width = r["image_width"].integer();
  c.image_height = r["image_height"].integer();
  c.cx = r["cx"].number();
  c.cy = r["cy"].number();
  c.rig_offset = r["rig_offset"].number();
  r.guard([&] { c.validate(); return 0; });
  return c;
}

Json encode(const SensorRig& rig) {
  Json cams = Json::array();
  for (const auto& c : rig.cameras) cams.push_back(encode(c));
  return {{"lidar", rig.lidar ? encode(*rig.lidar) : Json(nullptr)}, {"cameras", cams},
          {"camera_height", rig.camera_height}, {"camera_x", rig.camera_x}};
}
SensorRig decode_rig(const Reader& r) {
  r.fields({"lidar", "cameras", "camera_height", "camera_x"});
  SensorRig rig;
  if (!r["lidar"].is_null()) rig.lidar = decode_lidar(r["lidar"]);
  const Reader cams = r["cameras"];
  for (std::size_t i = 0, n = cams.size(); i < n; ++i) rig.cameras.push_back(decode_camera(cams[i]));
  rig.camera_height = r["camera_height"].number();
  rig.camera_x = r["camera_x"].number();
  r.guard([&] { rig.validate(); return 0; });
  return rig;
}

Json encode(const DisparityMap& m, Writer& w) {
  return {{"width", m.width()}, {"height", m.height()}, {"values", w.doubles(m.values())}, {"mask", w.blob(m.mask())}};
}
DisparityMap decode_map(const Reader& r) {
  r.fields({"width", "height", "values", "mask"});
  const int width = r["width"].integer(), height = r["height"].integer();
  auto values = r["values"].doubles();
  auto mask = r["mask"].bytes();
  return r.guard([&] { return DisparityMap::from_buffers(width, height, std::move(values), std::move(mask)); });
}

Json encode(const SensorFrame& f, Writer& w) {
  std::vector<double> cloud;
  for (const Vec3& p : f.lidar_cloud) cloud.insert(cloud.end(), {p.x(), p.y(), p.z()});
  Json maps = Json::array();
  for (const StereoMap& m : f.stereo_maps)
    maps.push_back({{"source", m.source}, {"reference", m.reference}, {"estimated", encode(m.estimated, w)},
                    {"ground_truth", encode(m.ground_truth, w)}});
  Json truth = Json::array();
  for (bool b : f.attack_truth.bits()) truth.push_back(b);
  return {{"frame_id", f.frame_id}, {"rig", encode(f.rig)}, {"lidar_cloud", w.doubles(cloud)},
          {"stereo_maps", maps}, {"attack_truth", truth}};
}
SensorFrame decode_frame(const Reader& r) {
  r.fields({"frame_id", "rig", "lidar_cloud", "stereo_maps", "attack_truth"});
  SensorFrame f;
  f.frame_id = r["frame_id"].u64();
  f.rig = decode_rig(r["rig"]);
  const auto cloud = r["lidar_cloud"].doubles();
  if (cloud.size() % 3 != 0) r["lidar_cloud"].fail("point cloud length is not a multiple of 3");
  for (std::size_t i = 0; i < cloud.size(); i += 3) f.lidar_cloud.emplace_back(cloud[i], cloud[i + 1], cloud[i + 2]);
  const Reader maps = r["stereo_maps"];
  for (std::size_t i = 0, n = maps.size(); i < n; ++i) {
    const Reader m = maps[i];
    m.fields({"source", "reference", "estimated", "ground_truth"});
    f.stereo_maps.push_back({m["source"].size_value(), m["reference"].size_value(), decode_map(m["estimated"]),
                             decode_map(m["ground_truth"])});
  }
  const Reader truth = r["attack_truth"];
  std::vector<bool> bits;
  for (std::size_t i = 0, n = truth.size(); i < n; ++i) bits.push_back(truth[i].boolean());
  f.attack_truth = SensorStateVector(std::move(bits));
  r.guard([&] { f.validate(); return 0; });
  return f;
}

Json encode(const Scene& s) {
  return {{"lanes", encode(s.lanes)}, {"obstacles", encode_obstacles(s.obstacles)},
          {"road_type", std::string(to_string(s.road_type))}, {"rng_seed", s.rng_seed}};
}
Scene decode_scene(const Reader& r) {
  r.fields({"lanes", "obstacles", "road_type", "rng_seed"});
  Scene s;
  s.lanes = decode_lanes(r["lanes"]);
  s.obstacles = decode_obstacles(r["obstacles"]);
  s.road_type = decode_road(r["road_type"]);
  s.rng_seed = r["rng_seed"].u64();
  r.guard([&] { s.validate(); return 0; });
  return s;
}

Json encode(const ThresholdTable& t) {
  Json entries = Json::array();
  for (const auto& [triple, e] : t.entries())
    entries.push_back({{"triple", Json::array({triple.i, triple.j, triple.k})}, {"theta", e.theta}, {"samples", e.samples}});
  return {{"r", t.r()}, {"entries", entries}};
}
ThresholdTable decode_table(const Reader& r) {
  r.fields({"r", "entries"});
  ThresholdTable t(r["r"].number());
  const Reader entries = r["entries"];
  for (std::size_t i = 0, n = entries.size(); i < n; ++i) {
    const Reader e = entries[i];
    e.fields({"triple", "theta", "samples"});
    const Reader tr = e["triple"];
    tr.size(3);
    const Triple triple{tr[std::size_t{0}].size_value(), tr[1].size_value(), tr[2].size_value()};
    if (t.contains(triple)) e.fail("duplicate triple " + triple.to_string());
    const double theta = e["theta"].number();
    const std::size_t samples = e["samples"].size_value();
    e["theta"].guard([&] { t.set(triple, theta, samples); return 0; });
  }
  r.guard([&] { t.validate(); return 0; });
  return t;
}

Json encode(const FleetCalibration& c) {
  return {{"epsilon", c.epsilon}, {"theta", c.theta}, {"r", c.r}, {"ground_samples", c.ground_samples},
          {"region_samples", c.region_samples}};
}
FleetCalibration decode_fleet_calibration(const Reader& r) {
  r.fields({"epsilon", "theta", "r", "ground_samples", "region_samples"});
  FleetCalibration c;
  c.epsilon = r["epsilon"].number();
  c.theta = r["theta"].number();
  c.r = r["r"].number();
  c.ground_samples = r["ground_samples"].size_value();
  c.region_samples = r["region_samples"].size_value();
  r.guard([&] { c.validate(); return 0; });
  return c;
}

Json encode(const HeightGrid& g, Writer& w) {
  return {{"origin", vec(g.origin())}, {"yaw", g.yaw()}, {"resolution", g.resolution()}, {"cols", g.cols()},
          {"rows", g.rows()}, {"heights", w.doubles(g.heights())}, {"occupancy", w.blob(g.occupancy())}};
}
HeightGrid decode_grid(const Reader& r) {
  r.fields({"origin", "yaw", "resolution", "cols", "rows", "heights", "occupancy"});
  const Vec2 origin = vec2(r["origin"]);
  const double yaw = r["yaw"].number(), res = r["resolution"].number();
  const int cols = r["cols"].integer(), rows = r["rows"].integer();
  auto heights = r["heights"].doubles();
  auto occ = r["occupancy"].bytes();
  return r.guard([&] { return HeightGrid::from_buffers(origin, yaw, res, cols, rows, std::move(heights), std::move(occ)); });
}

Json encode(const RegionSet& regions) {
  Json out = Json::array();
  for (const auto& reg : regions) out.push_back({{"region_id", reg.region_id}, {"footprint", encode(reg.footprint)}});
  return out;
}
RegionSet decode_regions(const Reader& r) {
  RegionSet out;
  for (std::size_t i = 0, n = r.size(); i < n; ++i) {
    const Reader e = r[i];
    e.fields({"region_id", "footprint"});
    out.push_back({e["region_id"].size_value(), decode_box(e["footprint"])});
  }
  return out;
}

Json encode(const VehicleState& s) {
  return {{"position", vec(s.position)}, {"speed", s.speed}, {"heading", s.heading}, {"steering", s.steering}};
}
VehicleState decode_state(const Reader& r) {
  r.fields({"position", "speed", "heading", "steering"});
  return {vec2(r["position"]), r["speed"].number(), r["heading"].number(), r["steering"].number()};
}

Json encode(const Dynamics& d) {
  return {{"wheelbase", d.wheelbase}, {"step", d.step}, {"max_acceleration", d.max_acceleration},
          {"max_steering", d.max_steering}, {"ego_length", d.ego_length}, {"ego_width", d.ego_width}};
}
Dynamics decode_dynamics(const Reader& r) {
  r.fields({"wheelbase", "step", "max_acceleration", "max_steering", "ego_length", "ego_width"});
  Dynamics d;
  d.wheelbase = r["wheelbase"].number();
  d.step = r["step"].number();
  d.max_acceleration = r["max_acceleration"].number();
  d.max_steering = r["max_steering"].number();
  d.ego_length = r["ego_length"].number();
  d.ego_width = r["ego_width"].number();
  if (!(d.wheelbase > 0 && d.step > 0 && d.ego_length > 0 && d.ego_width > 0 && d.max_acceleration >= 0 &&
        d.max_steering >= 0))
    throw InvariantError("dynamics bounds must be positive (field " + r.path() + ")");
  return d;
}

Json encode(const PlanningScenario& s) {
  return {{"start", encode(s.start)},
          {"goal", encode(s.goal)},
          {"intention", std::string(to_string(s.intention))},
          {"obstacles", encode_obstacles(s.obstacles)},
          {"road_type", std::string(to_string(s.road_type))},
          {"speed", {{"min", s.speed.min}, {"max", s.speed.max}}},
          {"dynamics", encode(s.dynamics)},
          {"lanes", encode(s.lanes)}};
}
PlanningScenario decode_scenario(const Reader& r) {
  r.fields({"start", "goal", "intention", "obstacles", "road_type", "speed", "dynamics", "lanes"});
  PlanningScenario s;
  s.start = decode_state(r["start"]);
  s.goal = decode_box(r["goal"]);
  s.intention = r["intention"].guard([&] { return parse_intention(r["intention"].string()); });
  s.obstacles = decode_obstacles(r["obstacles"]);
  s.road_type = decode_road(r["road_type"]);
  const Reader speed = r["speed"];
  speed.fields({"min", "max"});
  s.speed = {speed["min"].number(), speed["max"].number()};
  s.dynamics = decode_dynamics(r["dynamics"]);
  s.lanes = decode_lanes(r["lanes"]);
  r.guard([&] { s.validate(); return 0; });
  return s;
}

Json encode(const PlanningCorpus& corpus) {
  Json out = Json::array();
  for (const auto& s : corpus) out.push_back(encode(s));
  return out;
}
PlanningCorpus decode_corpus(const Reader& r) {
  PlanningCorpus out;
  for (std::size_t i = 0, n = r.size(); i < n; ++i) out.push_back(decode_scenario(r[i]));
  return out;
}

Json encode(const SafetyReport& s) {
  return {{"k_dts", s.k_dts}, {"k_trj", s.k_trj}, {"k_cls", s.k_cls},
          {"m_suc", s.m_suc}, {"m_cls", s.m_cls}, {"m_saf", s.m_saf}};
}
SafetyReport decode_safety(const Reader& r) {
  r.fields({"k_dts", "k_trj", "k_cls", "m_suc", "m_cls", "m_saf"});
  SafetyReport s;
  s.k_dts = r["k_dts"].size_value();
  s.k_trj = r["k_trj"].size_value();
  s.k_cls = r["k_cls"].size_value();
  s.m_suc = r["m_suc"].number();
  s.m_cls = r["m_cls"].number();
  s.m_saf = r["m_saf"].number();
  r.guard([&] { s.validate(); return 0; });
  return s;
}

Json encode(const ReportBundle& b, Writer& w) {
  Json rows = Json::array();
  for (const ReportRow& row : b.rows)
    rows.push_back({{"table", row.table}, {"case", row.case_name}, {"param", row.param}, {"x", row.x},
                    {"metric", row.metric}, {"value", row.value}, {"seed", row.seed}});
  Json samples = Json::array();
  for (const SampleSeries& s : b.samples) samples.push_back({{"name", s.name}, {"values", w.doubles(s.values)}});
  const Provenance& p = b.provenance;
  return {{"rows", rows},
          {"samples", samples},
          {"provenance",
           {{"config_hash", p.config_hash}, {"seed", p.seed}, {"version", p.version},
            {"calibration_ids", number_array(p.calibration_ids)}, {"heldout_ids", number_array(p.heldout_ids)},
            {"evaluation_ids", number_array(p.evaluation_ids)}}}};
}
ReportBundle decode_bundle(const Reader& r) {
  r.fields({"rows", "samples", "provenance"});
  ReportBundle b;
  const Reader rows = r["rows"];
  for (std::size_t i = 0, n = rows.size(); i < n; ++i) {
    const Reader e = rows[i];
    e.fields({"table", "case", "param", "x", "metric", "value", "seed"});
    b.rows.push_back({e["table"].string(), e["case"].string(), e["param"].string(), e["x"].number(),
                      e["metric"].string(), e["value"].number(), e["seed"].u64()});
  }
  const Reader samples = r["samples"];
  for (std::size_t i = 0, n = samples.size(); i < n; ++i) {
    const Reader e = samples[i];
    e.fields({"name", "values"});
    b.samples.push_back({e["name"].string(), e["values"].doubles()});
  }
  const Reader p = r["provenance"];
  p.fields({"config_hash", "seed", "version", "calibration_ids", "heldout_ids", "evaluation_ids"});
  b.provenance = {p["config_hash"].string(), p["seed"].u64(), p["version"].string(),
                  u64_list(p["calibration_ids"]), u64_list(p["heldout_ids"]), u64_list(p["evaluation_ids"])};
  r.guard([&] { b.validate(); return 0; });
  return b;
}

Json encode(const ExperimentConfig& c) {
  Json rigs = Json::array(), perturbations = Json::array();
  for (const auto& s : c.rigs) rigs.push_back(s);
  for (const auto& s : c.perturbations) perturbations.push_back(s);
  return {{"pipeline", std::string(to_string(c.pipeline))},
          {"seed", c.seed},
          {"corpus_size", c.corpus_size},
          {"calibration_size", c.calibration_size},
          {"heldout_size", c.heldout_size},
          {"r_values", number_array(c.r_values)},
          {"noise_sigma", c.noise_sigma},
          {"rigs", rigs},
          {"bogus_widths", number_array(c.bogus_widths)},
          {"facula_radii", number_array(c.facula_radii)},
          {"perturbations", perturbations},
          {"output_dir", c.output_dir}};
}
ExperimentConfig decode_config(const Reader& r) {
  r.fields({"pipeline", "seed", "corpus_size", "calibration_size", "heldout_size", "r_values", "noise_sigma",
            "rigs", "bogus_widths", "facula_radii", "perturbations", "output_dir"});
  ExperimentConfig c;
  c.pipeline = r["pipeline"].guard([&] { return parse_pipeline(r["pipeline"].string()); });
  c.seed = r["seed"].u64();
  c.corpus_size = r["corpus_size"].integer();
  c.calibration_size = r["calibration_size"].integer();
  c.heldout_size = r["heldout_size"].integer();
  c.r_values = doubles_list(r["r_values"]);
  c.noise_sigma = r["noise_sigma"].number();
  c.rigs = string_list(r["rigs"]);
  c.bogus_widths = doubles_list(r["bogus_widths"]);
  c.facula_radii = doubles_list(r["facula_radii"]);
  c.perturbations = string_list(r["perturbations"]);
  c.output_dir = r["output_dir"].string();
  r.guard([&] { c.validate(); return 0; });
  return c;
}

template <class T>
struct Codec;

#define SDV_CODEC(Type, Kind, Encode, Decode)                                   \
  template <>                                                                   \
  struct Codec<Type> {                                                          \
    static constexpr std::string_view kind = Kind;                              \
    static Json encode(const Type& v, [[maybe_unused]] Writer& w) { return Encode; } \
    static Type decode(const Reader& r) { return Decode(r); }                   \
  };

SDV_CODEC(Scene, "scene", sdv::encode(v), decode_scene)
SDV_CODEC(SensorFrame, "frame", sdv::encode(v, w), decode_frame)
SDV_CODEC(ThresholdTable, "calibration", sdv::encode(v), decode_table)
SDV_CODEC(FleetCalibration, "fleet-calibration", sdv::encode(v), decode_fleet_calibration)
SDV_CODEC(HeightGrid, "height-grid", sdv::encode(v, w), decode_grid)
SDV_CODEC(RegionSet, "regions", sdv::encode(v), decode_regions)
SDV_CODEC(PlanningCorpus, "planning-corpus", sdv::encode(v), decode_corpus)
SDV_CODEC(SafetyReport, "safety-report", sdv::encode(v), decode_safety)
SDV_CODEC(ReportBundle, "report", sdv::encode(v, w), decode_bundle)
SDV_CODEC(ExperimentConfig, "config", sdv::encode(v), decode_config)

#undef SDV_CODEC

}  // namespace

template <class T>
std::string_view artifact_kind() {
  return Codec<T>::kind;
}

template <class T>
std::string serialize(const T& value, const BlobOptions& blobs) {
  Writer w(blobs);
  Json doc;
  doc["format"] = "sdvbench";
  doc["version"] = kFormatVersion;
  doc["kind"] = std::string(Codec<T>::kind);
  doc["data"] = Codec<T>::encode(value, w);
  return doc.dump(1) + "\n";
}

template <class T>
T parse(std::string_view text, const BlobOptions& blobs) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(e.what(), e.byte == 0 ? 0 : e.byte - 1, "");
  }
  const Context ctx{text, blobs};
  const Reader root(doc, "", ctx);
  root.fields({"format", "version", "kind", "data"});
  if (root["format"].string() != "sdvbench") root["format"].fail("not an sdvbench artifact");
  if (root["version"].integer() != kFormatVersion)
    root["version"].fail("unsupported format version " + std::to_string(root["version"].integer()));
  if (root["kind"].string() != Codec<T>::kind)
    root["kind"].fail("expected kind '" + std::string(Codec<T>::kind) + "', found '" + root["kind"].string() + "'");
  return Codec<T>::decode(root["data"]);
}

template <class T>
void write_artifact(const std::filesystem::path& path, const T& value, std::size_t sidecar_threshold) {
  BlobOptions blobs;
  blobs.sidecar_dir = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
  blobs.sidecar_stem = path.stem().string();
  blobs.threshold = sidecar_threshold;
  const std::string text = serialize(value, blobs);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

template <class T>
T read_artifact(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  BlobOptions blobs;
  blobs.sidecar_dir = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
  return parse<T>(buf.str(), blobs);
}

#define SDV_INSTANTIATE(Type)                                                         \
  template std::string_view artifact_kind<Type>();                                    \
  template std::string serialize<Type>(const Type&, const BlobOptions&);             \
  template Type parse<Type>(std::string_view, const BlobOptions&);                   \
  template void write_artifact<Type>(const std::filesystem::path&, const Type&, std::size_t); \
  template Type read_artifact<Type>(const std::filesystem::path&);

SDV_INSTANTIATE(Scene)
SDV_INSTANTIATE(SensorFrame)
SDV_INSTANTIATE(ThresholdTable)
SDV_INSTANTIATE(FleetCalibration)
SDV_INSTANTIATE(HeightGrid)
SDV_INSTANTIATE(RegionSet)
SDV_INSTANTIATE(PlanningCorpus)
SDV_INSTANTIATE(SafetyReport)
SDV_INSTANTIATE(ReportBundle)
SDV_INSTANTIATE(ExperimentConfig)

#undef SDV_INSTANTIATE

}  // namespace sdv
