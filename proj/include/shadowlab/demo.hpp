#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace shadowlab {

struct DemoRow {
  std::string name;
  std::string summary;   // e.g. "bodies=3 covered slack=0.2373"
  std::string expected;  // what the row had to show
  bool met = false;
  double runtime_ms = 0.0;
};

struct DemoOptions {
  std::string out_dir;  // empty: no artifacts written
  std::uint64_t seed = 0;
};

/// Runs every fixture of the demo suite, writing <name>.scene.json, <name>.report.json and
/// <name>.svg per case plus summary.json. Reports differ between runs only in
/// their timings_ms fields.
std::vector<DemoRow> run_demo_suite(const DemoOptions& options);

std::string format_demo_table(const std::vector<DemoRow>& rows);

}  // namespace shadowlab
