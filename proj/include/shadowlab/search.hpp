#pragma once

#include "shadowlab/errors.hpp"
#include "shadowlab/scene.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace shadowlab {

/// Parameters of the ball-configuration search on the unit sphere S^{m-1}.
struct ConfigSearchParams {
  int dim = 3;    // m
  int count = 4;  // K
  Mode mode = Mode::line;
  double t0 = 0.05;          // initial move scale (radians / radius units)
  double cooling = 0.9995;   // per-step temperature factor
  int steps = 4000;          // annealing steps per chain
  int chains = 4;
  int refine_steps = 400;    // coordinate-descent sweeps
  std::uint64_t seed = 0;
  double gap_floor = 1e-4;   // minimal accepted gap and 1 - max radius
  double hardness = 50.0;    // soft-min hardness of the annealing objective
  int probes = 0;            // <= 0: chosen from the dimension
  double delta_min = 1e-2;   // certification floor
};

struct Configuration {
  std::vector<Vec> centers;  // unit vectors
  std::vector<double> radii;
};

/// Raw objective terms of a configuration.
struct ConfigScore {
  double coverage = 0.0;  // estimated min coverage margin at the center
  double gap = 0.0;       // min pairwise gap
  double headroom = 0.0;  // 1 - max radius
  double value() const { return std::min(coverage, std::min(gap, headroom)); }
};

struct SearchResult {
  Scene scene;
  ConfigScore score;
  VerifyResult verification;
};

class SearchFailedError : public Error {
 public:
  SearchFailedError(const std::string& what, Scene best, ConfigScore score)
      : Error(ErrorKind::search_failed, what), best_(std::move(best)), score_(score) {}
  const Scene& best() const noexcept { return best_; }
  const ConfigScore& score() const noexcept { return score_; }

 private:
  Scene best_;
  ConfigScore score_;
};

/// Scene of balls on the unit sphere with the query at its center.
Scene configuration_scene(const Configuration& config, Mode mode);
Configuration scene_configuration(const Scene& scene);

/// Seeds used by the chains: the regular simplex, a pole ball over a ring of
/// K - 1 balls below the equator, and random configurations.
Configuration simplex_seed(int dim, int count, double radius_fraction = 0.98);
Configuration pole_ring_seed(int dim, int count, double pole_radius, double ring_latitude, double ring_radius);

/// Annealing + coordinate descent per chain, then certification (exact sweep on
/// S^1) of the chains in order of estimated score. Throws SearchFailedError,
/// carrying the best-scoring candidate, when none certifies.
SearchResult search_config(const ConfigSearchParams& params);

}  // namespace shadowlab
