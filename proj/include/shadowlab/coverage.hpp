#pragma once

#include "shadowlab/directions.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace shadowlab {

struct CoverageProblem {
  DirectionSpace space;
  std::vector<HitRegion> regions;
};

struct Covered {
  double slack = 0.0;
};

struct Uncovered {
  Vec witness;
  double miss_margin = 0.0;
};

struct Inconclusive {
  double finest_delta = 0.0;
};

using Verdict = std::variant<Covered, Uncovered, Inconclusive>;

const char* verdict_name(const Verdict& v);

struct SearchBudget {
  int sample_count = 10000;
  int descent_steps = 200;
  double step_shrink = 0.5;
  double min_delta = 1e-7;
  std::uint64_t seed = 0;
  int restarts = 50;
  double initial_step = 0.1;
};

struct CertifyOptions {
  std::size_t max_cells = kDefaultNetBudget;
  SearchBudget descent;  // used to sharpen an uncovered net point into a witness
};

/// Margins below this are treated as numerically zero when deciding "uncovered".
inline constexpr double kMissTolerance = 1e-12;

/// max over regions of the normalized region margin (each region margin divided
/// by its Lipschitz bound, so the result is 1-Lipschitz in the angle of u).
double coverage_margin(const CoverageProblem& problem, const Vec& u);

/// Exact arc sweep on S^1.
Verdict cover_circle_exact(const CoverageProblem& problem);

/// Adaptive certified net refinement between delta_start and delta_min.
Verdict cover_certify(const CoverageProblem& problem, double delta_start, double delta_min,
                      const CertifyOptions& options = {});

struct Witness {
  Vec direction;
  double miss_margin = 0.0;
};

std::optional<Witness> falsify(const CoverageProblem& problem, const SearchBudget& budget = {});

struct MarginEstimate {
  double value = 0.0;
  Vec argmin;
};

MarginEstimate min_margin_estimate(const CoverageProblem& problem, const SearchBudget& budget = {});

/// Default refinement floor for a space: 1e-3 up to S^2, 0.02 beyond.
double default_delta_min(const DirectionSpace& space);

/// Complex and quaternionic line spaces are certified on the real subsphere
/// {v : v_1 real}, which meets every field line; maps its points to ambient vectors.
int certification_dim(const DirectionSpace& space);
Vec embed_certification_point(const DirectionSpace& space, const Vec& w);

}  // namespace shadowlab
