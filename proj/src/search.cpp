#include "shadowlab/search.hpp"

#include "shadowlab/errors.hpp"
#include "shadowlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace shadowlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxRadius = 0.999;
constexpr double kMinRadius = 0.01;

int default_probe_count(int dim) {
  switch (dim) {
    case 2: return 2000;
    case 3: return 6000;
    case 4: return 20000;
    default: return 40000;
  }
}

// Probe directions with cached per-ball margins.
class Evaluator {
 public:
  Evaluator(const ConfigSearchParams& p, Rng& rng) : mode_(p.mode), hardness_(p.hardness) {
    const int n = p.probes > 0 ? p.probes : default_probe_count(p.dim);
    probes_ = Mat(n, p.dim);
    if (p.dim == 2) {
      for (int i = 0; i < n; ++i) {
        double t = 2 * kPi * (i + 0.5) / n;
        probes_(i, 0) = std::cos(t);
        probes_(i, 1) = std::sin(t);
      }
    } else {
      DirectionSpace s = DirectionSpace::real_sphere(p.dim, false);
      for (int i = 0; i < n; ++i) probes_.row(i) = sample_direction(s, rng).transpose();
    }
  }

  int size() const { return static_cast<int>(probes_.rows()); }

  double margin(const Vec& u, const Vec& c, double r) const {
    double d = u.dot(c);
    switch (mode_) {
      case Mode::ray: return std::asin(r) - std::acos(std::clamp(d, -1.0, 1.0));
      case Mode::hyperplane: return std::asin(r) - std::asin(std::min(1.0, std::abs(d)));
      default: return std::asin(r) - std::acos(std::min(1.0, std::abs(d)));
    }
  }

  Vec column(const Vec& c, double r) const {
    Vec out(probes_.rows());
    for (Eigen::Index i = 0; i < probes_.rows(); ++i) out[i] = margin(probes_.row(i).transpose(), c, r);
    return out;
  }

  Mat table(const Configuration& cfg) const {
    Mat m(probes_.rows(), static_cast<Eigen::Index>(cfg.centers.size()));
    for (std::size_t k = 0; k < cfg.centers.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = column(cfg.centers[k], cfg.radii[k]);
    return m;
  }

  ConfigScore hard(const Configuration& cfg, const Mat& table) const {
    ConfigScore s;
    s.coverage = table.rowwise().maxCoeff().minCoeff();
    s.gap = gap(cfg);
    s.headroom = 1.0 - *std::max_element(cfg.radii.begin(), cfg.radii.end());
    return s;
  }

  // Soft-min of all terms, with a quadratic penalty on overlaps.
  double soft(const Configuration& cfg, const Mat& table, double hardness) const {
    Vec cover = table.rowwise().maxCoeff();
    std::vector<double> terms(cover.data(), cover.data() + cover.size());
    double penalty = 0.0;
    for (std::size_t i = 0; i < cfg.centers.size(); ++i)
      for (std::size_t j = i + 1; j < cfg.centers.size(); ++j) {
        double g = (cfg.centers[i] - cfg.centers[j]).norm() - cfg.radii[i] - cfg.radii[j];
        terms.push_back(g);
        if (g < 0) penalty += 10.0 * g * g;
      }
    terms.push_back(1.0 - *std::max_element(cfg.radii.begin(), cfg.radii.end()));
    double lo = *std::min_element(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += std::exp(-hardness * (t - lo));
    return lo - std::log(sum) / hardness - penalty;
  }

  double soft(const Configuration& cfg, const Mat& table) const { return soft(cfg, table, hardness_); }

  static double gap(const Configuration& cfg) {
    double g = kInf;
    for (std::size_t i = 0; i < cfg.centers.size(); ++i)
      for (std::size_t j = i + 1; j < cfg.centers.size(); ++j)
        g = std::min(g, (cfg.centers[i] - cfg.centers[j]).norm() - cfg.radii[i] - cfg.radii[j]);
    return g;
  }

  // Adds probes at local minima of the coverage margin near the worst probes.
  void sharpen(const Configuration& cfg, const Mat& table, Rng& rng, int count) {
    Vec cover = table.rowwise().maxCoeff();
    std::vector<int> idx(static_cast<std::size_t>(cover.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    count = std::min<int>(count, static_cast<int>(idx.size()));
    std::partial_sort(idx.begin(), idx.begin() + count, idx.end(), [&](int a, int b) {
      return cover[a] != cover[b] ? cover[a] < cover[b] : a < b;
    });
    auto cov = [&](const Vec& u) {
      double best = -kInf;
      for (std::size_t k = 0; k < cfg.centers.size(); ++k) best = std::max(best, margin(u, cfg.centers[k], cfg.radii[k]));
      return best;
    };
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vec> extra;
    for (int j = 0; j < count; ++j) {
      Vec p = probes_.row(idx[j]).transpose();
      double mp = cov(p), step = 0.05;
      for (int s = 0; s < 200 && step > 1e-6; ++s) {
        Vec t(p.size());
        for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = normal(rng);
        t -= t.dot(p) * p;
        if (t.norm() < 1e-12) continue;
        Vec q = unit(std::cos(step) * p + std::sin(step) * unit(t));
        double mq = cov(q);
        if (mq < mp) {
          p = q;
          mp = mq;
        } else if (s % 8 == 7) {
          step *= 0.6;
        }
      }
      extra.push_back(p);
    }
    Mat grown(probes_.rows() + static_cast<Eigen::Index>(extra.size()), probes_.cols());
    grown.topRows(probes_.rows()) = probes_;
    for (std::size_t j = 0; j < extra.size(); ++j) grown.row(probes_.rows() + static_cast<Eigen::Index>(j)) = extra[j].transpose();
    probes_ = std::move(grown);
  }

 private:
  Mode mode_;
  double hardness_;
  Mat probes_;
};

Vec tangent_step(const Vec& c, double scale, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec t(c.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = normal(rng);
  t -= t.dot(c) * c;
  return unit(c + scale * t);
}

Configuration random_seed(int dim, int count, Rng& rng) {
  Configuration cfg;
  DirectionSpace s = DirectionSpace::real_sphere(dim, false);
  std::uniform_real_distribution<double> radius(0.3, 0.9);
  for (int k = 0; k < count; ++k) {
    cfg.centers.push_back(sample_direction(s, rng));
    cfg.radii.push_back(radius(rng));
  }
  return cfg;
}

struct ChainResult {
  Configuration best;
  ConfigScore score;
};

ChainResult anneal(const ConfigSearchParams& p, Configuration cfg, std::uint64_t seed) {
  Rng rng(seed);
  Evaluator ev(p, rng);
  Mat table = ev.table(cfg);
  double f = ev.soft(cfg, table);
  ChainResult out{cfg, ev.hard(cfg, table)};
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, p.count - 1);
  double temp = p.t0;
  const int sharpen_every = std::max(1, p.steps / 8);
  for (int step = 0; step < p.steps; ++step, temp = std::max(temp * p.cooling, 1e-5)) {
    if (step > 0 && step % sharpen_every == 0) {
      ev.sharpen(cfg, table, rng, 32);
      table = ev.table(cfg);
      f = ev.soft(cfg, table);
      out.score = ev.hard(out.best, ev.table(out.best));
    }
    const int k = pick(rng);
    Configuration next = cfg;
    if (unif(rng) < 0.6) {
      next.centers[k] = tangent_step(cfg.centers[k], temp * std::abs(normal(rng)) + 1e-9, rng);
    } else {
      next.radii[k] = std::clamp(cfg.radii[k] + 0.5 * temp * normal(rng), kMinRadius, kMaxRadius);
    }
    Mat nt = table;
    nt.col(k) = ev.column(next.centers[k], next.radii[k]);
    double nf = ev.soft(next, nt);
    if (nf >= f || unif(rng) < std::exp((nf - f) / (0.2 * temp))) {
      cfg = std::move(next);
      table = std::move(nt);
      f = nf;
      ConfigScore s = ev.hard(cfg, table);
      if (s.value() > out.score.value()) {
        out.best = cfg;
        out.score = s;
      }
    }
  }

  // Pattern-search polish on the soft objective with growing hardness.
  // Each stage first adds probes at local minima, so the estimate cannot hide a dip between probes.
  cfg = out.best;
  for (double h : {p.hardness * 4, p.hardness * 20, p.hardness * 100}) {
    ev.sharpen(cfg, ev.table(cfg), rng, 128);
    table = ev.table(cfg);
    f = ev.soft(cfg, table, h);
    double step = 0.01;
    for (int sweep = 0; sweep < p.refine_steps && step > 1e-7; ++sweep) {
      bool improved = false;
      for (int k = 0; k < p.count; ++k) {
        for (int trial = 0; trial < 2 * p.dim; ++trial) {
          Configuration next = cfg;
          if (trial < 2) {
            next.radii[k] = std::clamp(cfg.radii[k] + (trial == 0 ? step : -step), kMinRadius, kMaxRadius);
          } else {
            next.centers[k] = tangent_step(cfg.centers[k], step, rng);
          }
          Mat nt = table;
          nt.col(k) = ev.column(next.centers[k], next.radii[k]);
          double nf = ev.soft(next, nt, h);
          if (nf > f) {
            cfg = std::move(next);
            table = std::move(nt);
            f = nf;
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
  }
  ConfigScore polished = ev.hard(cfg, ev.table(cfg));
  Mat best_table = ev.table(out.best);
  out.score = ev.hard(out.best, best_table);
  if (polished.value() > out.score.value()) {
    out.best = cfg;
    out.score = polished;
  }
  return out;
}

}  // namespace

Scene configuration_scene(const Configuration& config, Mode mode) {
  if (config.centers.empty()) throw InputError("empty configuration");
  Scene s;
  s.dim = static_cast<int>(config.centers.front().size());
  s.mode = mode;
  s.point = Vec::Zero(s.dim);
  s.sphere = SphereInfo{Vec::Zero(s.dim), 1.0};
  s.name = "search";
  for (std::size_t k = 0; k < config.centers.size(); ++k) s.bodies.emplace_back(Ball(config.centers[k], config.radii[k]));
  return s;
}

Configuration scene_configuration(const Scene& scene) {
  Configuration cfg;
  Vec center = scene.sphere ? scene.sphere->center : scene.point;
  double radius = scene.sphere ? scene.sphere->radius : 1.0;
  for (const auto& b : scene.bodies) {
    const Ball* ball = b.as_ball();
    if (!ball) throw InputError("configuration scenes contain balls only");
    cfg.centers.push_back((ball->center() - center) / radius);
    cfg.radii.push_back(ball->radius() / radius);
  }
  return cfg;
}

Configuration simplex_seed(int dim, int count, double radius_fraction) {
  Configuration cfg;
  Mat v = regular_simplex_vertices(dim);
  double half_edge = 0.5 * (v.row(0) - v.row(1)).norm();
  for (int k = 0; k < count; ++k) {
    cfg.centers.push_back(v.row(k % (dim + 1)).transpose());
    cfg.radii.push_back(std::min(kMaxRadius, radius_fraction * half_edge));
  }
  return cfg;
}

Configuration pole_ring_seed(int dim, int count, double pole_radius, double ring_latitude, double ring_radius) {
  if (dim < 2 || count < 1) throw InputError("pole-ring seed needs dim >= 2 and count >= 1");
  Configuration cfg;
  Vec pole = basis_vector(dim, dim - 1);
  cfg.centers.push_back(pole);
  cfg.radii.push_back(pole_radius);
  const int ring = count - 1;
  const int sub = dim - 1;
  std::vector<Vec> dirs;
  if (sub == 1) {
    for (int j = 0; j < ring; ++j) dirs.push_back(make_vec({j % 2 == 0 ? 1.0 : -1.0}));
  } else if (sub == 2) {
    for (int j = 0; j < ring; ++j) {
      double t = 2 * kPi * j / ring;
      dirs.push_back(make_vec({std::cos(t), std::sin(t)}));
    }
  } else {
    Mat v = regular_simplex_vertices(sub);
    for (int j = 0; j < ring; ++j) {
      Vec w = v.row(j % (sub + 1)).transpose();
      if (j > sub) w = -w;
      dirs.push_back(w);
    }
  }
  for (const Vec& w : dirs) {
    Vec c(dim);
    c.head(sub) = std::cos(ring_latitude) * w;
    c[dim - 1] = -std::sin(ring_latitude);
    cfg.centers.push_back(c);
    cfg.radii.push_back(ring_radius);
  }
  return cfg;
}

SearchResult search_config(const ConfigSearchParams& p) {
  if (p.dim < 2) throw InputError("search dimension must be at least 2");
  if (p.count < 1) throw InputError("search needs at least one ball");
  if (!(p.gap_floor > 0)) throw InputError("gap floor must be positive");
  if (p.mode == Mode::cline) throw InputError("search runs on real spheres");
  if (p.steps < 0 || p.chains < 1) throw InputError("invalid annealing schedule");

  std::vector<Configuration> seeds;
  for (int c = 0; c < p.chains; ++c) {
    Rng rng(derive_seed(p.seed, 1000 + static_cast<std::uint64_t>(c)));
    if (c == 0 && p.count >= 2) {
      seeds.push_back(pole_ring_seed(p.dim, p.count, 0.98, kPi / 6, 0.7));
    } else if (c == 1 && p.count <= p.dim + 1) {
      seeds.push_back(simplex_seed(p.dim, p.count));
    } else {
      seeds.push_back(random_seed(p.dim, p.count, rng));
    }
  }
  std::vector<ChainResult> results(seeds.size());
  parallel_chunks(seeds.size(), 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) results[c] = anneal(p, seeds[c], derive_seed(p.seed, c));
  });
  // Chains in order of estimated score; the first one that certifies wins.
  std::vector<std::size_t> order(results.size());
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return results[a].score.value() > results[b].score.value();
  });

  VerifyOptions vo;
  vo.delta_min = p.delta_min;
  vo.certify.descent.seed = p.seed;
  SearchResult out;
  std::ostringstream why;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::size_t c = order[rank];
    SearchResult candidate;
    candidate.scene = configuration_scene(results[c].best, p.mode);
    candidate.scene.seed = p.seed;
    candidate.score = results[c].score;
    candidate.scene.params = {{"dim", p.dim}, {"count", p.count}, {"chain", static_cast<int>(c)},
                              {"estimated_margin", candidate.score.coverage}, {"gap", candidate.score.gap},
                              {"headroom", candidate.score.headroom}};
    if (rank == 0) out = candidate;
    if (candidate.score.gap < p.gap_floor || candidate.score.headroom < p.gap_floor || candidate.score.coverage <= 0)
      continue;
    candidate.verification = verify_scene(candidate.scene, vo);
    if (std::holds_alternative<Covered>(candidate.verification.verdict)) {
      out = std::move(candidate);
      out.scene.params["certified_slack"] = std::get<Covered>(out.verification.verdict).slack;
      return out;
    }
    if (rank == 0) out = std::move(candidate);
  }
  if (out.score.gap < p.gap_floor || out.score.headroom < p.gap_floor) {
    why << "best candidate violates the gap floor (gap " << out.score.gap << ", headroom " << out.score.headroom << ")";
  } else if (out.score.coverage <= 0) {
    why << "best candidate leaves directions uncovered (estimated margin " << out.score.coverage << ")";
  } else {
    why << "no candidate certified; best (" << verdict_name(out.verification.verdict) << ", estimated margin "
        << out.score.coverage << ", gap " << out.score.gap << ", headroom " << out.score.headroom << ")";
  }
  throw SearchFailedError(why.str(), out.scene, out.score);
}

}  // namespace shadowlab
