#include "shadowlab/demo.hpp"

#include "shadowlab/constructions.hpp"
#include "shadowlab/errors.hpp"
#include "shadowlab/margins.hpp"
#include "shadowlab/render.hpp"
#include "shadowlab/scene_io.hpp"
#include "shadowlab/search.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

namespace shadowlab {

using nlohmann::json;

namespace {

std::string num(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string verdict_text(const Verdict& v) {
  if (const auto* c = std::get_if<Covered>(&v)) return std::string("covered slack=") + num(c->slack);
  if (const auto* u = std::get_if<Uncovered>(&v)) return std::string("uncovered miss=") + num(u->miss_margin);
  return std::string("inconclusive delta=") + num(std::get<Inconclusive>(v).finest_delta);
}

double slack_of(const Verdict& v) {
  if (const auto* c = std::get_if<Covered>(&v)) return c->slack;
  return -1.0;
}

Vec uniform_in_ball(const Vec& center, double radius, Rng& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u;
  Vec d(center.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = g(rng);
  d.normalize();
  return center + radius * std::pow(u(rng), 1.0 / static_cast<double>(center.size())) * d;
}

Scene without_body(const Scene& s, std::size_t skip) {
  Scene out = s;
  out.bodies.erase(out.bodies.begin() + static_cast<std::ptrdiff_t>(skip));
  return out;
}

class Runner {
 public:
  explicit Runner(const DemoOptions& o) : opt_(o) {
    if (!opt_.out_dir.empty()) std::filesystem::create_directories(opt_.out_dir);
  }

  void run(const std::string& name, const std::string& expected, const std::function<bool(DemoRow&)>& body) {
    DemoRow row{name, "", expected, false, 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      row.met = body(row);
    } catch (const Error& e) {
      row.summary = std::string(to_string(e.kind())) + " error: " + e.what();
      row.met = false;
    }
    row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    last_ms_ = row.runtime_ms;
    flush_pending(row.runtime_ms);
    rows_.push_back(row);
  }

  // Artifacts are buffered so the runtime of the whole case lands in the report.
  void emit(const std::string& name, const Scene& scene, Report report, std::optional<Vec> witness = {}) {
    report.scene_digest = scene_digest(scene);
    report.seed = opt_.seed;
    if (!witness)
      if (const auto* u = std::get_if<Uncovered>(&report.verdict)) witness = u->witness;
    pending_.push_back({name, scene, std::move(report), witness});
  }

  std::uint64_t seed(std::uint64_t stream) const { return derive_seed(opt_.seed, stream); }
  std::vector<DemoRow> rows() && { return std::move(rows_); }

  void write_summary() const {
    if (opt_.out_dir.empty()) return;
    json rows = json::array();
    for (const auto& r : rows_)
      rows.push_back({{"name", r.name}, {"summary", r.summary}, {"expected", r.expected}, {"met", r.met},
                      {"timings_ms", {{"total", r.runtime_ms}}}});
    save_json({{"schema_version", kSchemaVersion}, {"seed", opt_.seed}, {"tool_version", kToolVersion},
               {"rows", rows}},
              opt_.out_dir + "/summary.json");
  }

 private:
  struct Pending {
    std::string name;
    Scene scene;
    Report report;
    std::optional<Vec> witness;
  };

  void flush_pending(double ms) {
    for (auto& p : pending_) {
      if (opt_.out_dir.empty()) continue;
      p.report.timing_ms = ms;
      const std::string base = opt_.out_dir + "/" + p.name;
      save_scene(p.scene, base + ".scene.json");
      save_json(report_to_json(p.report), base + ".report.json");
      RenderOptions ro;
      ro.witness = p.witness;
      if (ro.witness && ro.witness->size() != p.scene.dim) ro.witness.reset();
      std::ofstream(base + ".svg", std::ios::binary) << render_svg(p.scene, ro);
    }
    pending_.clear();
  }

  DemoOptions opt_;
  std::vector<DemoRow> rows_;
  std::vector<Pending> pending_;
  double last_ms_ = 0.0;
};

Report report_of(const VerifyResult& v, json extra = json::object()) {
  Report r;
  r.verdict = v.verdict;
  r.delta_used = v.delta_used;
  r.method = v.method;
  r.extra = std::move(extra);
  return r;
}

Report witness_report(const std::optional<Witness>& w, const char* method, json extra = json::object()) {
  Report r;
  if (w) r.verdict = Uncovered{w->direction, w->miss_margin};
  else r.verdict = Inconclusive{0.0};
  r.method = method;
  r.extra = std::move(extra);
  return r;
}

json trace_json(const ConstructionTrace& t, const Scene& s) {
  return {{"bodies", s.bodies.size()}, {"min_gap", check_scene(s).min_gap}, {"r1", t.r1}, {"r2", t.r2},
          {"coefficients", t.coefficients}, {"eta", t.eta}, {"iterations", t.iterations}};
}

struct FamilyCase {
  std::string tag;
  Body body;
  int dim;
  std::size_t expected_count;
};

std::vector<FamilyCase> theorem1_cases() {
  return {
      {"r2_disk", Body(Ball(Vec::Zero(2), 1.0)), 2, 2},
      {"r3_ball", Body(Ball(Vec::Zero(3), 1.0)), 3, 3},
      {"r3_ellipsoid", Body(Ellipsoid::axis_aligned(Vec::Zero(3), make_vec({2, 1, 1}))), 3, 3},
      {"r3_cube", Body(HPolytope::box(Vec::Constant(3, -1), Vec::Constant(3, 1))), 3, 3},
  };
}

std::vector<FamilyCase> theorem3_cases() {
  return {
      {"r2_disk", Body(Ball(Vec::Zero(2), 1.0)), 2, 4},
      {"r2_square", Body(HPolytope::box(Vec::Constant(2, -1), Vec::Constant(2, 1))), 2, 4},
      {"r2_triangle", Body(HPolytope::regular_simplex(Vec::Zero(2), 1.0)), 2, 3},
      {"r3_ball", Body(Ball(Vec::Zero(3), 1.0)), 3, 6},
      {"r3_ellipsoid", Body(Ellipsoid::axis_aligned(Vec::Zero(3), make_vec({2, 1, 1}))), 3, 6},
      {"r3_cube", Body(HPolytope::box(Vec::Constant(3, -1), Vec::Constant(3, 1))), 3, 6},
      {"r3_simplex", Body(HPolytope::regular_simplex(Vec::Zero(3), 1.0)), 3, 4},
  };
}

/// Random disjoint balls on the unit sphere with a query point outside all of them.
Scene random_sphere_family(int dim, int max_count, Rng& rng) {
  std::uniform_int_distribution<int> count_dist(1, max_count);
  std::uniform_real_distribution<double> radius_dist(0.05, 0.6);
  const int count = count_dist(rng);
  const DirectionSpace sphere = DirectionSpace::real_sphere(dim, false);
  Configuration cfg;
  for (int attempt = 0; static_cast<int>(cfg.radii.size()) < count && attempt < 10000; ++attempt) {
    Vec c = sample_direction(sphere, rng);
    double r = radius_dist(rng);
    bool ok = true;
    for (std::size_t j = 0; j < cfg.radii.size() && ok; ++j) ok = (c - cfg.centers[j]).norm() > r + cfg.radii[j] + 1e-3;
    if (ok) {
      cfg.centers.push_back(c);
      cfg.radii.push_back(r);
    }
  }
  Scene s = configuration_scene(cfg, Mode::ray);
  for (;;) {
    Vec x = uniform_in_ball(Vec::Zero(dim), 0.95, rng);
    bool outside = true;
    for (std::size_t j = 0; j < cfg.radii.size() && outside; ++j) outside = (x - cfg.centers[j]).norm() > cfg.radii[j] + 1e-3;
    if (outside) {
      s.point = x;
      break;
    }
  }
  return s;
}

}  // namespace

std::vector<DemoRow> run_demo_suite(const DemoOptions& options) {
  Runner run(options);
  VerifyOptions certified;
  certified.delta_min = 1e-2;

  run.run("theorem2", "circumcenter and 200 interior points covered by the exact sweep, gaps >= 1e-3",
          [&](DemoRow& row) {
            Scene s = construct_theorem2(0.05);
            VerifyResult center = verify_scene(s);
            Rng rng(run.seed(1));
            double min_slack = slack_of(center.verdict);
            bool all_exact = center.method == "exact-sweep";
            for (int i = 0; i < 200; ++i) {
              VerifyResult v = verify_at(s, uniform_in_ball(s.sphere->center, s.sphere->radius, rng));
              min_slack = std::min(min_slack, slack_of(v.verdict));
              all_exact = all_exact && v.method == "exact-sweep";
            }
            const double gap = check_scene(s).min_gap;
            run.emit("theorem2", s,
                     report_of(center, {{"interior_points", 200}, {"min_interior_slack", min_slack}, {"min_gap", gap}}));
            row.summary = "bodies=3 " + verdict_text(center.verdict) + " interior min slack=" + num(min_slack) +
                          " gap=" + num(gap);
            return min_slack > 0 && all_exact && gap >= 1e-3;
          });

  for (const auto& c : theorem1_cases()) {
    const std::string name = "theorem1_" + c.tag;
    std::optional<FamilyResult> family;
    run.run(name, "n bodies, disjoint, line shadow at O certified at delta 1e-2", [&](DemoRow& row) {
      FamilyOptions fo;
      fo.verify = certified;
      family = construct_theorem1(c.body, Vec::Zero(c.dim), fo);
      const SceneCheck check = check_scene(family->scene);
      run.emit(name, family->scene, report_of(family->verification, trace_json(family->trace, family->scene)));
      row.summary = "bodies=" + std::to_string(family->scene.bodies.size()) + " " +
                    verdict_text(family->verification.verdict) + " gap=" + num(check.min_gap);
      return family->scene.bodies.size() == c.expected_count && check.disjoint && check.min_gap > 0 &&
             slack_of(family->verification.verdict) > 0;
    });
    if (!family) continue;
    run.run(name + "_necessity", "every (n-1)-subfamily falsified with miss > 1e-4", [&](DemoRow& row) {
      double worst = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < family->scene.bodies.size(); ++i) {
        Scene sub = without_body(family->scene, i);
        SearchBudget budget;
        budget.sample_count = 100000;
        budget.seed = run.seed(100 + i);
        auto w = falsify(coverage_problem(sub), budget);
        run.emit(name + "_minus" + std::to_string(i), sub, witness_report(w, "falsifier"));
        worst = std::min(worst, w ? w->miss_margin : 0.0);
      }
      row.summary = "subfamilies=" + std::to_string(family->scene.bodies.size()) + " min miss=" + num(worst);
      return worst > 1e-4;
    });
  }

  for (const auto& c : theorem3_cases()) {
    const std::string name = "theorem3_" + c.tag;
    run.run(name, "ray shadow at O covered with " + std::to_string(c.expected_count) + " bodies", [&](DemoRow& row) {
      FamilyOptions fo;
      fo.verify = certified;
      FamilyResult f = construct_theorem3(c.body, Vec::Zero(c.dim), fo);
      const SceneCheck check = check_scene(f.scene);
      run.emit(name, f.scene, report_of(f.verification, trace_json(f.trace, f.scene)));
      row.summary = "bodies=" + std::to_string(f.scene.bodies.size()) + " " + verdict_text(f.verification.verdict);
      return f.scene.bodies.size() == c.expected_count && check.disjoint && slack_of(f.verification.verdict) > 0;
    });
  }

  run.run("remark1", "a line through the edge midpoint misses all four balls, miss >= 1e-3", [&](DemoRow& row) {
    Scene s = construct_remark1(1e-3);
    SearchBudget budget;
    budget.sample_count = 100000;
    budget.seed = run.seed(2);
    auto w = falsify(coverage_problem(s), budget);
    run.emit("remark1", s, witness_report(w, "falsifier", {{"radius", std::get<Ball>(s.bodies[0].shape()).radius()}}));
    row.summary = w ? "uncovered witness found miss=" + num(w->miss_margin) : "no witness";
    return w && w->miss_margin >= 1e-3;
  });

  run.run("remark3", "gap 0.2997, hyperplane shadow at center and 50 interior points, hull contains sphere",
          [&](DemoRow& row) {
            Scene s = construct_remark3(3);
            const double gap = check_scene(s).min_gap;
            VerifyResult center = verify_scene(s, certified);
            Rng rng(run.seed(3));
            double min_slack = slack_of(center.verdict);
            for (int i = 0; i < 50; ++i) {
              VerifyResult v = verify_at(s, uniform_in_ball(Vec::Zero(3), 1.0, rng), certified);
              min_slack = std::min(min_slack, slack_of(v.verdict));
            }
            double support_min = std::numeric_limits<double>::infinity();
            const DirectionSpace sphere = DirectionSpace::real_sphere(3, false);
            for (int i = 0; i < 1000; ++i) {
              Vec u = sample_direction(sphere, rng);
              double best = -std::numeric_limits<double>::infinity();
              for (const auto& b : s.bodies) best = std::max(best, support_value(b.world(), u));
              support_min = std::min(support_min, best);
            }
            run.emit("remark3", s,
                     report_of(center, {{"min_gap", gap}, {"interior_points", 50}, {"min_interior_slack", min_slack},
                                        {"min_support", support_min}}));
            row.summary = "gap=" + num(gap, 7) + " " + verdict_text(center.verdict) +
                          " interior min slack=" + num(min_slack) + " min support=" + num(support_min, 7);
            return std::abs(gap - (std::sqrt(8.0 / 3.0) - 4.0 / 3.0)) <= 1e-6 && min_slack > 0 &&
                   support_min >= 1.0 - 1e-9;
          });

  run.run("remark4", "escaping ray found and re-verified for 10 random families", [&](DemoRow& row) {
    int found = 0;
    int recipe = 0;
    for (int t = 0; t < 10; ++t) {
      Rng rng(run.seed(200 + t));
      Scene s = random_sphere_family(3, 8, rng);
      SearchBudget budget;
      budget.seed = run.seed(300 + t);
      EscapeResult e = construct_remark4_escape(s, s.point, budget);
      double worst = std::numeric_limits<double>::infinity();
      for (const auto& b : s.bodies) worst = std::min(worst, ray_margin(s.point, e.direction, b));
      if (worst > 0) ++found;
      if (e.from_recipe) ++recipe;
      Report r;
      r.verdict = Uncovered{e.direction, worst};
      r.method = e.from_recipe ? "closest-pair recipe" : "falsifier";
      r.extra = {{"margins", e.margins}};
      run.emit("remark4_" + std::to_string(t), s, r, e.direction);
    }
    row.summary = "escaping rays=" + std::to_string(found) + "/10 recipe=" + std::to_string(recipe);
    return found == 10;
  });

  run.run("search_m2_k2", "certified 2-disk center shadow", [&](DemoRow& row) {
    ConfigSearchParams p;
    p.dim = 2;
    p.count = 2;
    p.steps = 4000;
    p.chains = 2;
    p.seed = run.seed(4);
    SearchResult r = search_config(p);
    run.emit("search_m2_k2", r.scene, report_of(r.verification));
    row.summary = verdict_text(r.verification.verdict);
    return slack_of(r.verification.verdict) > 0;
  });

  auto necessity = [&](const std::string& name, int dim, int count, int steps) {
    run.run(name, "search fails and its best candidate is falsified", [&](DemoRow& row) {
      ConfigSearchParams p;
      p.dim = dim;
      p.count = count;
      p.steps = steps;
      p.chains = 2;
      p.seed = run.seed(5 + static_cast<std::uint64_t>(dim));
      try {
        SearchResult r = search_config(p);
        run.emit(name, r.scene, report_of(r.verification));
        row.summary = "unexpectedly certified";
        return false;
      } catch (const SearchFailedError& e) {
        SearchBudget budget;
        budget.seed = p.seed;
        auto w = falsify(coverage_problem(e.best()), budget);
        run.emit(name, e.best(), witness_report(w, "falsifier", {{"estimated_margin", e.score().value()}}));
        row.summary = "search failed, " + (w ? "witness miss=" + num(w->miss_margin) : std::string("no witness"));
        return w.has_value();
      }
    });
  };
  necessity("search_m2_k1", 2, 1, 2000);

  run.run("config_m3_k4", "shipped 4-ball configuration certified at delta 1e-2", [&](DemoRow& row) {
    Scene s = load_config_data(3, 4);
    VerifyResult v = verify_scene(s, certified);
    run.emit("config_m3_k4", s, report_of(v, {{"min_gap", check_scene(s).min_gap}}));
    row.summary = "bodies=4 " + verdict_text(v.verdict);
    return slack_of(v.verdict) > 0 && check_scene(s).disjoint;
  });
  necessity("search_m3_k3", 3, 3, 4000);

  struct Theorem4Case {
    int n;
    FieldKind field;
    bool certify;
  };
  for (const auto& c : {Theorem4Case{2, FieldKind::complex, true}, Theorem4Case{3, FieldKind::complex, true},
                        Theorem4Case{3, FieldKind::quaternion, false}}) {
    const std::string name = std::string("theorem4_") + to_string(c.field) + "_n" + std::to_string(c.n);
    run.run(name, c.certify ? "complex lines covered: no sampled miss and certified" : "no sampled miss",
            [&](DemoRow& row) {
              const int m = theorem4_real_dim(c.n, c.field);
              Scene s = construct_theorem4(c.n, c.field, load_config_data(m, m + 1));
              SearchBudget budget;
              budget.sample_count = 100000;
              budget.seed = run.seed(400 + static_cast<std::uint64_t>(m));
              MarginEstimate est = min_margin_estimate(coverage_problem(s), budget);
              json extra = {{"sampled_lines", budget.sample_count}, {"sampled_min_margin", est.value}};
              bool ok = est.value > 0;
              if (c.certify) {
                VerifyOptions vo;
                vo.delta_min = 0.02;
                VerifyResult v = verify_scene(s, vo);
                run.emit(name, s, report_of(v, extra));
                row.summary = verdict_text(v.verdict) + " sampled min margin=" + num(est.value);
                ok = ok && slack_of(v.verdict) > 0;
              } else {
                Report r;
                r.verdict = Inconclusive{0.0};
                r.method = "sampling only";
                extra["note"] = "certification on this direction space exceeds desk-scale budgets";
                r.extra = extra;
                run.emit(name, s, r);
                row.summary = "sampling only, min margin=" + num(est.value);
              }
              return ok;
            });
  }

  run.write_summary();
  return std::move(run).rows();
}

std::string format_demo_table(const std::vector<DemoRow>& rows) {
  std::size_t w = 4;
  for (const auto& r : rows) w = std::max(w, r.name.size());
  std::ostringstream out;
  for (const auto& r : rows) {
    char ms[32];
    std::snprintf(ms, sizeof ms, "%9.1f ms", r.runtime_ms);
    out << (r.met ? "ok   " : "FAIL ") << r.name << std::string(w + 2 - r.name.size(), ' ') << ms << "  "
        << r.summary << '\n';
    if (!r.met) out << "     expected: " << r.expected << '\n';
  }
  return out.str();
}

}  // namespace shadowlab
