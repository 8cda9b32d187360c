#pragma once

#include "shadowlab/coverage.hpp"
#include "shadowlab/scene.hpp"

#include <json.hpp>

#include <string>

namespace shadowlab {

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kToolVersion = "shadowlab 1.0.0";

nlohmann::json scene_to_json(const Scene& scene);
/// Strict parser: unknown or missing fields raise InputError naming the JSON path.
Scene scene_from_json(const nlohmann::json& doc);

std::string dump_json(const nlohmann::json& doc);
Scene load_scene(const std::string& path);
void save_scene(const Scene& scene, const std::string& path);
nlohmann::json load_json(const std::string& path);
void save_json(const nlohmann::json& doc, const std::string& path);

/// FNV-1a 64-bit hash of the canonical scene text, as 16 hex digits.
std::string scene_digest(const Scene& scene);

/// Number, or a string with a "deg" suffix converted to radians.
double parse_angle(const nlohmann::json& value, const std::string& where);
double parse_angle(const std::string& text);

/// Shipped certified configurations: <dir>/m<dim>_k<count>.json. The directory
/// is SHADOWLAB_DATA_DIR when set, otherwise the one configured at build time.
std::string config_data_dir();
std::string config_data_path(int dim, int count);
/// Throws Error(dependency) when no file exists for (dim, count).
Scene load_config_data(int dim, int count);

struct Report {
  Verdict verdict;
  double delta_used = 0.0;
  std::string method;
  double timing_ms = 0.0;
  std::uint64_t seed = 0;
  std::string scene_digest;
  nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json report_to_json(const Report& report);

}  // namespace shadowlab
