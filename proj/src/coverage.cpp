#include "shadowlab/coverage.hpp"

#include "shadowlab/errors.hpp"
#include "shadowlab/margins.hpp"
#include "shadowlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace shadowlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool has_all_directions(const CoverageProblem& p) {
  return std::any_of(p.regions.begin(), p.regions.end(), is_all_directions);
}

double wrap(double a) {
  a = std::fmod(a, 2 * kPi);
  return a < 0 ? a + 2 * kPi : a;
}

double circ_dist(double a, double b) {
  double d = std::abs(wrap(a - b));
  return std::min(d, 2 * kPi - d);
}

Vec rotate2(const Vec& u, double t) {
  return make_vec({std::cos(t) * u[0] - std::sin(t) * u[1], std::sin(t) * u[0] + std::cos(t) * u[1]});
}

struct Tent {
  double center;
  double half_width;
};

// Boundary angle of a contiguous hit arc starting at u0, walking in direction `side`.
double arc_extent(const MarginField& f, const Vec& u0, int side) {
  auto hit = [&](double t) {
    Vec u = rotate2(u0, side * t);
    double m = f.mode == Mode::ray ? ray_margin(f.x, u, *f.body) : line_margin(f.x, u, *f.body);
    return m <= 0.0;
  };
  double lo = 0.0, hi = kPi;
  for (int i = 0; i < 80 && hi - lo > 1e-15; ++i) {
    double mid = 0.5 * (lo + hi);
    (hit(mid) ? lo : hi) = mid;
  }
  return lo;
}

std::vector<Tent> tents_of(const HitRegion& region) {
  std::vector<Tent> out;
  if (const auto* c = std::get_if<Cap>(&region)) {
    if (c->axis.size() != 2) throw InputError("exact sweep needs planar regions");
    double phi = std::atan2(c->axis[1], c->axis[0]);
    out.push_back({phi, c->half_angle});
    if (c->antipodal) out.push_back({phi + kPi, c->half_angle});
  } else if (const auto* b = std::get_if<Band>(&region)) {
    double phi = std::atan2(b->axis[1], b->axis[0]);
    double w = std::asin(b->cos_threshold);
    out.push_back({phi + kPi / 2, w});
    out.push_back({phi - kPi / 2, w});
  } else if (const auto* f = std::get_if<MarginField>(&region)) {
    Vec toward = inscribed_ball(*f->body).center() - f->x;
    Vec u0 = unit(toward);
    double plus = arc_extent(*f, u0, 1), minus = arc_extent(*f, u0, -1);
    double phi = std::atan2(u0[1], u0[0]) + 0.5 * (plus - minus);
    double w = 0.5 * (plus + minus);
    out.push_back({phi, w});
    if (f->mode == Mode::line) out.push_back({phi + kPi, w});
  } else if (std::holds_alternative<FSCap>(region)) {
    throw InputError("exact sweep does not support complex regions");
  }
  return out;
}

double envelope(const std::vector<Tent>& tents, double t) {
  double e = -kInf;
  for (const auto& tent : tents) e = std::max(e, tent.half_width - circ_dist(t, tent.center));
  return e;
}

// Local descent on the ambient sphere minimizing the coverage margin.
Witness descend(const CoverageProblem& problem, Vec p, const SearchBudget& budget, Rng& rng) {
  double mp = coverage_margin(problem, p);
  double step = budget.initial_step;
  int fails = 0;
  const int patience = 2 * problem.space.ambient_dim;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < budget.descent_steps; ++s) {
    Vec t(p.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = normal(rng);
    t -= t.dot(p) * p;
    double tn = t.norm();
    if (tn < 1e-12) continue;
    Vec q = unit(std::cos(step) * p + std::sin(step) * (t / tn));
    double mq = coverage_margin(problem, q);
    if (mq < mp) {
      p = q;
      mp = mq;
      fails = 0;
    } else if (++fails >= patience) {
      step *= budget.step_shrink;
      fails = 0;
      if (step < budget.min_delta) break;
    }
  }
  return {p, mp};
}

struct Sampled {
  std::vector<Vec> points;
  std::vector<double> margins;
};

Sampled sample_margins(const CoverageProblem& problem, const SearchBudget& budget) {
  const std::size_t n = static_cast<std::size_t>(std::max(budget.sample_count, 1));
  constexpr std::size_t kChunk = 1024;
  Sampled s;
  s.points.resize(n);
  s.margins.resize(n);
  parallel_chunks(n, kChunk, [&](std::size_t begin, std::size_t end) {
    Rng rng(derive_seed(budget.seed, begin / kChunk));
    for (std::size_t i = begin; i < end; ++i) {
      s.points[i] = sample_direction(problem.space, rng);
      s.margins[i] = coverage_margin(problem, s.points[i]);
    }
  });
  return s;
}

// Best descents from the lowest samples; ties broken by sample index.
Witness sharpen(const CoverageProblem& problem, const Sampled& s, const SearchBudget& budget) {
  std::vector<std::size_t> order(s.points.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t k = std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(budget.restarts, 1)));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return s.margins[a] != s.margins[b] ? s.margins[a] < s.margins[b] : a < b;
                    });
  std::vector<Witness> results(k);
  parallel_chunks(k, 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng(derive_seed(budget.seed ^ 0x5bd1e995ULL, i));
      results[i] = descend(problem, s.points[order[i]], budget, rng);
    }
  });
  Witness best = results.front();
  for (const auto& w : results)
    if (w.miss_margin < best.miss_margin) best = w;
  return best;
}

}  // namespace

const char* verdict_name(const Verdict& v) {
  if (std::holds_alternative<Covered>(v)) return "covered";
  if (std::holds_alternative<Uncovered>(v)) return "uncovered";
  return "inconclusive";
}

double coverage_margin(const CoverageProblem& problem, const Vec& u) {
  double best = -kInf;
  for (const auto& r : problem.regions) best = std::max(best, normalized_margin(r, u));
  return best;
}

double default_delta_min(const DirectionSpace& space) {
  return certification_dim(space) <= 3 ? 1e-3 : 0.02;
}

int certification_dim(const DirectionSpace& space) {
  switch (space.kind) {
    case FieldKind::real: return space.ambient_dim;
    case FieldKind::complex: return space.ambient_dim - 1;
    case FieldKind::quaternion: return space.ambient_dim - 3;
  }
  return space.ambient_dim;
}

Vec embed_certification_point(const DirectionSpace& space, const Vec& w) {
  const int extra = space.ambient_dim - certification_dim(space);
  if (extra == 0) return w;
  Vec v = Vec::Zero(space.ambient_dim);
  v[0] = w[0];
  v.tail(space.ambient_dim - 1 - extra) = w.tail(w.size() - 1);
  return v;
}

Verdict cover_circle_exact(const CoverageProblem& problem) {
  if (problem.space.ambient_dim != 2 || problem.space.kind != FieldKind::real)
    throw InputError("exact sweep needs the circle of directions in the plane");
  if (has_all_directions(problem)) return Covered{kInf};
  std::vector<Tent> tents;
  for (const auto& r : problem.regions) {
    auto t = tents_of(r);
    tents.insert(tents.end(), t.begin(), t.end());
  }
  if (tents.empty()) return Uncovered{make_vec({1.0, 0.0}), problem.space.diameter()};
  for (const auto& t : tents)
    if (t.half_width >= kPi) return Covered{kInf};

  // Arc sweep in coordinates starting at the first arc's left end.
  constexpr double kTangency = 1e-12;
  const double origin = tents.front().center - tents.front().half_width;
  std::vector<std::pair<double, double>> arcs;
  for (const auto& t : tents) {
    double a = wrap(t.center - t.half_width - origin);
    if (a > 2 * kPi - kTangency) a = 0.0;
    double b = a + 2 * t.half_width;
    if (b > 2 * kPi) {
      arcs.emplace_back(a, 2 * kPi);
      arcs.emplace_back(0.0, b - 2 * kPi);
    } else {
      arcs.emplace_back(a, b);
    }
  }
  std::sort(arcs.begin(), arcs.end());
  double reach = 0.0, gap_lo = 0.0, gap_hi = 0.0;
  for (const auto& [a, b] : arcs) {
    if (a > reach + kTangency && a - reach > gap_hi - gap_lo) {
      gap_lo = reach;
      gap_hi = a;
    }
    reach = std::max(reach, b);
  }
  if (2 * kPi - reach > kTangency && 2 * kPi - reach > gap_hi - gap_lo) {
    gap_lo = reach;
    gap_hi = 2 * kPi;
  }
  if (gap_hi - gap_lo > kTangency) {
    double t = origin + 0.5 * (gap_lo + gap_hi);
    return Uncovered{make_vec({std::cos(t), std::sin(t)}), -envelope(tents, t)};
  }

  // Minimum of the tent envelope: valleys sit where a falling tent meets a
  // rising one, or at the far point of a single tent.
  double slack = kInf;
  for (const auto& ti : tents) {
    slack = std::min(slack, envelope(tents, ti.center + kPi));
    for (const auto& tj : tents) {
      double gap = wrap(tj.center - ti.center);
      double d = 0.5 * (gap + ti.half_width - tj.half_width);
      double e = gap - d;
      if (d >= 0 && d <= kPi && e >= 0 && e <= kPi) slack = std::min(slack, envelope(tents, ti.center + d));
    }
  }
  return Covered{std::max(slack, 0.0)};
}

Verdict cover_certify(const CoverageProblem& problem, double delta_start, double delta_min,
                      const CertifyOptions& options) {
  if (!(delta_min > 0) || !(delta_start >= delta_min))
    throw InputError("need delta_start >= delta_min > 0");
  if (has_all_directions(problem)) return Covered{kInf};
  const DirectionSpace& space = problem.space;
  if (problem.regions.empty()) {
    Vec w = Vec::Zero(space.ambient_dim);
    w[0] = 1.0;
    return Uncovered{w, space.diameter()};
  }
  const int dim = certification_dim(space);
  const int base = std::max(1, static_cast<int>(std::ceil(kPi * std::sqrt(dim - 1.0) / (4 * delta_start) - 1e-9)));
  detail::CubeSphere grid(dim, base);
  std::vector<detail::SphereCell> pending = grid.base_cells(space.antipodal_quotient);
  if (pending.size() > options.max_cells)
    throw ResourceError("certification grid exceeds the cell budget", delta_start, static_cast<double>(pending.size()));

  double slack = kInf;
  for (int level = 0;; ++level) {
    const double nominal = delta_start * std::ldexp(1.0, -level);
    const std::size_t n = pending.size();
    std::vector<double> margin(n), radius(n);
    std::vector<Vec> centers(n);
    parallel_chunks(n, 256, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        centers[i] = embed_certification_point(space, grid.center(pending[i]));
        margin[i] = coverage_margin(problem, centers[i]);
        radius[i] = grid.radius(pending[i]);
      }
    });
    std::size_t worst = n;
    double finest = 0.0;
    std::vector<detail::SphereCell> refine;
    for (std::size_t i = 0; i < n; ++i) {
      finest = std::max(finest, radius[i]);
      if (margin[i] < -kMissTolerance && (worst == n || margin[i] < margin[worst])) worst = i;
      if (margin[i] >= radius[i]) {
        slack = std::min(slack, margin[i] - radius[i]);
      } else {
        refine.push_back(pending[i]);
      }
    }
    if (worst != n) {
      Rng rng(derive_seed(options.descent.seed, 0xc0ffeeULL));
      Witness w = descend(problem, centers[worst], options.descent, rng);
      return Uncovered{w.direction, -w.miss_margin};
    }
    if (refine.empty()) return Covered{slack};
    if (nominal * 0.5 < delta_min) return Inconclusive{finest};
    const double children = static_cast<double>(refine.size()) * std::ldexp(1.0, dim - 1);
    if (children > static_cast<double>(options.max_cells))
      throw ResourceError("certification grid exceeds the cell budget", nominal * 0.5, children);
    pending.clear();
    pending.reserve(static_cast<std::size_t>(children));
    for (const auto& c : refine) {
      auto kids = grid.children(c);
      pending.insert(pending.end(), std::make_move_iterator(kids.begin()), std::make_move_iterator(kids.end()));
    }
  }
}

std::optional<Witness> falsify(const CoverageProblem& problem, const SearchBudget& budget) {
  if (has_all_directions(problem)) return std::nullopt;
  if (problem.regions.empty()) {
    Rng rng(derive_seed(budget.seed, 0));
    return Witness{sample_direction(problem.space, rng), problem.space.diameter()};
  }
  Sampled s = sample_margins(problem, budget);
  Witness best = sharpen(problem, s, budget);
  double m = coverage_margin(problem, best.direction);
  if (m < -kMissTolerance) return Witness{best.direction, -m};
  return std::nullopt;
}

MarginEstimate min_margin_estimate(const CoverageProblem& problem, const SearchBudget& budget) {
  if (has_all_directions(problem)) return {kInf, Vec::Zero(problem.space.ambient_dim)};
  if (problem.regions.empty()) {
    Rng rng(derive_seed(budget.seed, 0));
    return {-problem.space.diameter(), sample_direction(problem.space, rng)};
  }
  Sampled s = sample_margins(problem, budget);
  Witness best = sharpen(problem, s, budget);
  return {best.miss_margin, best.direction};
}

}  // namespace shadowlab
