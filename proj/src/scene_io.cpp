#include "shadowlab/scene_io.hpp"

#include "shadowlab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace shadowlab {

using nlohmann::json;

namespace {

json vec_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat_json(const Mat& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
  return a;
}

json transform_json(const Transform& t) {
  return {{"translation", vec_json(t.translation_vector())},
          {"homothety_center", vec_json(t.homothety_center())},
          {"ratio", t.ratio()}};
}

class Reader {
 public:
  Reader(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {}

  void expect_object(std::initializer_list<const char*> required, std::initializer_list<const char*> optional = {}) const {
    if (!doc_.is_object()) fail("expected an object");
    std::set<std::string> known;
    for (const char* k : required) {
      known.insert(k);
      if (!doc_.contains(k)) fail(std::string("missing field '") + k + "'");
    }
    for (const char* k : optional) known.insert(k);
    for (auto it = doc_.begin(); it != doc_.end(); ++it)
      if (!known.count(it.key())) throw InputError(path_ + "/" + it.key() + ": unknown field");
  }

  Reader at(const std::string& key) const { return Reader(doc_.at(key), path_ + "/" + key); }
  Reader at(std::size_t i) const { return Reader(doc_.at(i), path_ + "/" + std::to_string(i)); }
  bool has(const std::string& key) const { return doc_.contains(key); }
  const json& raw() const { return doc_; }
  const std::string& path() const { return path_; }

  double number() const {
    if (!doc_.is_number()) fail("expected a number");
    double v = doc_.get<double>();
    if (!std::isfinite(v)) fail("non-finite number");
    return v;
  }
  std::string string() const {
    if (!doc_.is_string()) fail("expected a string");
    return doc_.get<std::string>();
  }
  std::uint64_t unsigned_integer() const {
    if (!doc_.is_number_unsigned() && !(doc_.is_number_integer() && doc_.get<std::int64_t>() >= 0))
      fail("expected a non-negative integer");
    return doc_.get<std::uint64_t>();
  }
  int integer() const {
    if (!doc_.is_number_integer()) fail("expected an integer");
    return doc_.get<int>();
  }
  Vec vec(int dim = -1) const {
    if (!doc_.is_array()) fail("expected an array of numbers");
    if (dim >= 0 && static_cast<int>(doc_.size()) != dim)
      fail("expected " + std::to_string(dim) + " entries, got " + std::to_string(doc_.size()));
    Vec v(static_cast<Eigen::Index>(doc_.size()));
    for (std::size_t i = 0; i < doc_.size(); ++i) v[static_cast<Eigen::Index>(i)] = at(i).number();
    return v;
  }
  Mat mat(int cols) const {
    if (!doc_.is_array() || doc_.empty()) fail("expected a non-empty array of rows");
    Mat m(static_cast<Eigen::Index>(doc_.size()), cols);
    for (std::size_t i = 0; i < doc_.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = at(i).vec(cols).transpose();
    return m;
  }

  [[noreturn]] void fail(const std::string& what) const { throw InputError((path_.empty() ? "/" : path_) + ": " + what); }

 private:
  const json& doc_;
  std::string path_;
};

// Rewraps constructor errors with the JSON path.
template <class F>
auto guarded(const Reader& r, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw InputError(r.path() + ": " + e.what());
  }
}

Body body_from_json(const Reader& r, int dim) {
  const std::string type = [&] {
    if (!r.raw().is_object() || !r.has("type")) r.fail("missing field 'type'");
    return r.at("type").string();
  }();
  Shape shape = [&]() -> Shape {
    if (type == "ball") {
      r.expect_object({"type", "center", "radius"}, {"transform"});
      return guarded(r, [&] { return Ball(r.at("center").vec(dim), r.at("radius").number()); });
    }
    if (type == "ellipsoid") {
      r.expect_object({"type", "center", "semi_axes"}, {"orientation", "transform"});
      Vec c = r.at("center").vec(dim), a = r.at("semi_axes").vec(dim);
      Mat q = r.has("orientation") ? r.at("orientation").mat(dim) : Mat(Mat::Identity(dim, dim));
      if (q.rows() != dim) r.fail("orientation must be square");
      return guarded(r, [&] { return Ellipsoid(c, a, q); });
    }
    if (type == "hpolytope") {
      r.expect_object({"type", "normals", "offsets"}, {"transform"});
      Mat n = r.at("normals").mat(dim);
      Vec b = r.at("offsets").vec(static_cast<int>(n.rows()));
      return guarded(r, [&] { return HPolytope(n, b); });
    }
    r.at("type").fail("unknown body type '" + type + "'");
  }();
  Transform t = Transform::identity(dim);
  if (r.has("transform")) {
    Reader tr = r.at("transform");
    tr.expect_object({"translation", "homothety_center", "ratio"});
    t = guarded(tr, [&] {
      return Transform(tr.at("translation").vec(dim), tr.at("homothety_center").vec(dim), tr.at("ratio").number());
    });
  }
  return guarded(r, [&] { return Body(shape, t); });
}

}  // namespace

json scene_to_json(const Scene& s) {
  json bodies = json::array();
  for (const auto& b : s.bodies) {
    json j = std::visit(
        [](const auto& shape) -> json {
          using T = std::decay_t<decltype(shape)>;
          if constexpr (std::is_same_v<T, Ball>) {
            return {{"type", "ball"}, {"center", vec_json(shape.center())}, {"radius", shape.radius()}};
          } else if constexpr (std::is_same_v<T, Ellipsoid>) {
            return {{"type", "ellipsoid"}, {"center", vec_json(shape.center())},
                    {"semi_axes", vec_json(shape.semi_axes())}, {"orientation", mat_json(shape.orientation())}};
          } else {
            return {{"type", "hpolytope"}, {"normals", mat_json(shape.normals())}, {"offsets", vec_json(shape.offsets())}};
          }
        },
        b.shape());
    if (!b.transform().is_identity()) j["transform"] = transform_json(b.transform());
    bodies.push_back(std::move(j));
  }
  json doc = {{"schema_version", kSchemaVersion},
              {"space", {{"kind", to_string(s.field)}, {"dim", s.dim}}},
              {"point", vec_json(s.point)},
              {"mode", to_string(s.mode)},
              {"bodies", std::move(bodies)},
              {"metadata", {{"name", s.name}, {"seed", s.seed}, {"params", s.params}}}};
  if (s.sphere) doc["sphere"] = {{"center", vec_json(s.sphere->center)}, {"radius", s.sphere->radius}};
  return doc;
}

Scene scene_from_json(const json& doc) {
  Reader r(doc, "");
  r.expect_object({"schema_version", "space", "point", "mode", "bodies"}, {"sphere", "metadata"});
  if (r.at("schema_version").string() != kSchemaVersion)
    r.at("schema_version").fail("unsupported schema version");
  Scene s;
  Reader space = r.at("space");
  space.expect_object({"kind", "dim"});
  s.field = guarded(space.at("kind"), [&] { return field_kind_from_string(space.at("kind").string()); });
  s.dim = space.at("dim").integer();
  if (s.dim < 2) space.at("dim").fail("dimension must be at least 2");
  s.point = r.at("point").vec(s.dim);
  s.mode = guarded(r.at("mode"), [&] { return mode_from_string(r.at("mode").string()); });
  Reader bodies = r.at("bodies");
  if (!bodies.raw().is_array()) bodies.fail("expected an array");
  for (std::size_t i = 0; i < bodies.raw().size(); ++i) s.bodies.push_back(body_from_json(bodies.at(i), s.dim));
  if (r.has("sphere")) {
    Reader sp = r.at("sphere");
    sp.expect_object({"center", "radius"});
    s.sphere = SphereInfo{sp.at("center").vec(s.dim), sp.at("radius").number()};
    if (!(s.sphere->radius > 0)) sp.at("radius").fail("radius must be positive");
  }
  if (r.has("metadata")) {
    Reader m = r.at("metadata");
    m.expect_object({}, {"name", "seed", "params"});
    if (m.has("name")) s.name = m.at("name").string();
    if (m.has("seed")) s.seed = m.at("seed").unsigned_integer();
    if (m.has("params")) {
      if (!m.at("params").raw().is_object()) m.at("params").fail("expected an object");
      s.params = m.at("params").raw();
    }
  }
  try {
    validate_scene(s);
  } catch (const Error& e) {
    throw InputError(std::string("scene: ") + e.what());
  }
  return s;
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

void save_json(const json& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << dump_json(doc);
}

Scene load_scene(const std::string& path) {
  json doc = load_json(path);
  try {
    return scene_from_json(doc);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void save_scene(const Scene& scene, const std::string& path) { save_json(scene_to_json(scene), path); }

std::string scene_digest(const Scene& scene) {
  const std::string text = scene_to_json(scene).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double parse_angle(const std::string& text) {
  std::string t = text;
  bool deg = false;
  if (t.size() > 3 && t.compare(t.size() - 3, 3, "deg") == 0) {
    deg = true;
    t.resize(t.size() - 3);
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (...) {
    throw InputError("not an angle: '" + text + "'");
  }
  if (used != t.size() || !std::isfinite(v)) throw InputError("not an angle: '" + text + "'");
  return deg ? v * kPi / 180.0 : v;
}

double parse_angle(const json& value, const std::string& where) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    try {
      return parse_angle(value.get<std::string>());
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  throw InputError(where + ": expected an angle");
}

#ifndef SHADOWLAB_DEFAULT_DATA_DIR
#define SHADOWLAB_DEFAULT_DATA_DIR "data/configs"
#endif

std::string config_data_dir() {
  if (const char* env = std::getenv("SHADOWLAB_DATA_DIR"); env && *env) return env;
  return SHADOWLAB_DEFAULT_DATA_DIR;
}

std::string config_data_path(int dim, int count) {
  return config_data_dir() + "/m" + std::to_string(dim) + "_k" + std::to_string(count) + ".json";
}

Scene load_config_data(int dim, int count) {
  const std::string path = config_data_path(dim, count);
  if (!std::ifstream(path)) {
    throw Error(ErrorKind::dependency, "no certified configuration with " + std::to_string(count) +
                                           " balls in R^" + std::to_string(dim) + " (" + path + ")");
  }
  return load_scene(path);
}

json report_to_json(const Report& r) {
  json doc = {{"schema_version", kSchemaVersion}, {"verdict", verdict_name(r.verdict)}};
  if (const auto* c = std::get_if<Covered>(&r.verdict)) {
    doc["slack"] = std::isinf(c->slack) ? json("inf") : json(c->slack);
  } else if (const auto* u = std::get_if<Uncovered>(&r.verdict)) {
    doc["miss_margin"] = u->miss_margin;
    doc["witness"] = vec_json(u->witness);
  } else {
    doc["finest_delta"] = std::get<Inconclusive>(r.verdict).finest_delta;
  }
  doc["delta_used"] = r.delta_used;
  doc["method"] = r.method;
  doc["timings_ms"] = {{"total", r.timing_ms}};
  doc["seed"] = r.seed;
  doc["tool_version"] = kToolVersion;
  doc["scene_digest"] = r.scene_digest;
  if (!r.extra.empty()) doc["details"] = r.extra;
  return doc;
}

}  // namespace shadowlab
