#include "shadowlab/constructions.hpp"
#include "shadowlab/demo.hpp"
#include "shadowlab/errors.hpp"
#include "shadowlab/render.hpp"
#include "shadowlab/scene_io.hpp"
#include "shadowlab/search.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace shadowlab;
using nlohmann::json;

namespace {

enum Exit : int {
  kOk = 0,
  kUncovered = 1,
  kInconclusive = 2,
  kInput = 3,
  kConstruction = 4,
  kResource = 5,
};

int exit_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input:
    case ErrorKind::degenerate_body: return kInput;
    case ErrorKind::resource: return kResource;
    case ErrorKind::inconclusive_distance:
    case ErrorKind::escape_not_found: return kInconclusive;
    default: return kConstruction;
  }
}

int exit_for(const Verdict& v) {
  if (std::holds_alternative<Covered>(v)) return kOk;
  if (std::holds_alternative<Uncovered>(v)) return kUncovered;
  return kInconclusive;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SHADOWLAB_SEED"); env && *env) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw InputError("SHADOWLAB_SEED must be a non-negative integer");
    return v;
  }
  return 0;
}

Vec parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("not a number list: '" + text + "'");
    }
  }
  if (values.empty()) throw InputError("empty number list");
  Vec v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

Body make_body(const std::string& kind, int dim, const std::string& semi_axes) {
  const Vec zero = Vec::Zero(dim);
  if (kind == "ball" || kind == "disk") return Body(Ball(zero, 1.0));
  if (kind == "ellipsoid") {
    Vec a = semi_axes.empty() ? Vec(Vec::Ones(dim)) : parse_vector(semi_axes);
    if (a.size() != dim) throw InputError("--semi-axes needs " + std::to_string(dim) + " entries");
    return Body(Ellipsoid::axis_aligned(zero, a));
  }
  if (kind == "cube" || kind == "square") return Body(HPolytope::box(Vec::Constant(dim, -1), Vec::Constant(dim, 1)));
  if (kind == "simplex" || kind == "triangle") return Body(HPolytope::regular_simplex(zero, 1.0));
  throw InputError("unknown body '" + kind + "' (ball, ellipsoid, cube, simplex)");
}

json trace_to_json(const ConstructionTrace& t) {
  auto vecs = [](const std::vector<Vec>& vs) {
    json a = json::array();
    for (const auto& v : vs) a.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    return a;
  };
  return {{"facet_points", vecs(t.facet_points)},
          {"boundary_points", vecs(t.boundary_points)},
          {"offset_points", vecs(t.offset_points)},
          {"ray_directions", vecs(t.ray_directions)},
          {"r1", t.r1},
          {"r2", t.r2},
          {"coefficients", t.coefficients},
          {"eta", t.eta},
          {"iterations", t.iterations},
          {"recentering", std::vector<double>(t.recentering.data(), t.recentering.data() + t.recentering.size())}};
}

void print_scene_summary(const Scene& s) {
  const SceneCheck c = check_scene(s);
  std::cerr << s.name << ": bodies=" << s.bodies.size() << " min_gap=" << c.min_gap
            << (c.disjoint ? "" : " (overlapping)") << '\n';
}

Report make_report(const Scene& scene, const Verdict& v, double delta, std::string method, double ms,
                   std::uint64_t seed) {
  Report r;
  r.verdict = v;
  r.delta_used = delta;
  r.method = std::move(method);
  r.timing_ms = ms;
  r.seed = seed;
  r.scene_digest = scene_digest(scene);
  return r;
}

struct SearchFlags {
  int dim = 3;
  int count = 4;
  std::string mode = "line";
  int steps = ConfigSearchParams{}.steps;
  int chains = ConfigSearchParams{}.chains;
  double delta_min = ConfigSearchParams{}.delta_min;

  void attach(CLI::App* cmd) {
    cmd->add_option("--dim", dim, "sphere dimension m (balls on S^{m-1} in R^m)");
    cmd->add_option("--count", count, "number of balls K");
    cmd->add_option("--mode", mode, "line, ray or hyperplane");
    cmd->add_option("--steps", steps, "annealing steps per chain");
    cmd->add_option("--chains", chains, "independent annealing chains");
    cmd->add_option("--delta-min", delta_min, "certification floor");
  }

  ConfigSearchParams params(std::uint64_t seed) const {
    ConfigSearchParams p;
    p.dim = dim;
    p.count = count;
    p.mode = mode_from_string(mode);
    p.steps = steps;
    p.chains = chains;
    p.delta_min = delta_min;
    p.seed = seed;
    return p;
  }
};

int run_search(const SearchFlags& flags, std::uint64_t seed, const std::string& out) {
  try {
    SearchResult r = search_config(flags.params(seed));
    print_scene_summary(r.scene);
    std::cerr << "certified slack " << std::get<Covered>(r.verification.verdict).slack << '\n';
    write_text(out, dump_json(scene_to_json(r.scene)));
    return kOk;
  } catch (const SearchFailedError& e) {
    std::cerr << "search failed: " << e.what() << '\n';
    if (!out.empty() && out != "-") write_text(out + ".best.json", dump_json(scene_to_json(e.best())));
    return kConstruction;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shadow problem toolkit: constructions, coverage verification and witnesses"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed_flag;
  app.add_option("--seed", seed_flag, "random seed (overrides SHADOWLAB_SEED, default 0)");
  app.fallthrough();
  std::string out;

  // construct
  auto* construct = app.add_subcommand("construct", "build a scene from one of the constructions");
  std::string which;
  double eps = 0.05, shrink = 1e-3;
  int n = 3, dim = 3;
  std::string field = "complex", body_kind = "ball", semi_axes, trace_path;
  bool exact = false;
  SearchFlags cflags;
  construct->add_option("name", which, "theorem1|theorem2|theorem3|theorem4|remark1|remark3|search")->required();
  construct->add_option("-o,--out", out, "scene file (default stdout)");
  construct->add_option("--eps", eps, "theorem2 radius perturbation");
  construct->add_option("--shrink", shrink, "theorem2/remark1 radius shrink");
  construct->add_flag("--exact", exact, "remark1 with radius exactly half the edge");
  construct->add_option("--n", n, "dimension for remark3, field dimension for theorem4");
  construct->add_option("--field", field, "theorem4 field: complex or quaternion");
  construct->add_option("--body", body_kind, "theorem1/3 body: ball, ellipsoid, cube, simplex");
  construct->add_option("--semi-axes", semi_axes, "ellipsoid semi-axes, comma separated");
  construct->add_option("--trace", trace_path, "theorem1/3 trace file (default <out>.trace.json)");
  construct->add_option("--body-dim", dim, "theorem1/3 ambient dimension");
  cflags.attach(construct);

  // verify
  auto* verify = app.add_subcommand("verify", "decide coverage at the scene's query point");
  std::string scene_path, point_text;
  VerifyOptions vopt;
  verify->add_option("scene", scene_path)->required();
  verify->add_option("-o,--out", out, "report file (default stdout)");
  verify->add_option("--delta-min", vopt.delta_min, "finest certification resolution (0: default)");
  verify->add_option("--delta-start", vopt.delta_start, "coarsest certification resolution");
  verify->add_option("--point", point_text, "query point override, comma separated");
  verify->add_option("--max-cells", vopt.certify.max_cells, "cell budget of the certified engine");

  // falsify / escape
  SearchBudget budget;
  auto add_budget = [&](CLI::App* cmd) {
    cmd->add_option("scene", scene_path)->required();
    cmd->add_option("-o,--out", out, "report file (default stdout)");
    cmd->add_option("--samples", budget.sample_count, "random directions sampled");
    cmd->add_option("--descent-steps", budget.descent_steps, "local descent steps per restart");
    cmd->add_option("--restarts", budget.restarts, "descents started from the best samples");
  };
  auto* falsify_cmd = app.add_subcommand("falsify", "search for a flat through the point missing every body");
  add_budget(falsify_cmd);
  auto* escape_cmd = app.add_subcommand("escape", "find a ray from the point missing every ball");
  add_budget(escape_cmd);

  // search
  auto* search_cmd = app.add_subcommand("search", "search for a certified ball configuration");
  SearchFlags sflags;
  sflags.attach(search_cmd);
  search_cmd->add_option("-o,--out", out, "scene file (default stdout)");

  // render
  auto* render_cmd = app.add_subcommand("render", "draw a scene as SVG");
  std::string projection = "0,1", report_path;
  render_cmd->add_option("scene", scene_path)->required();
  render_cmd->add_option("-o,--out", out, "SVG file (default stdout)");
  render_cmd->add_option("--projection", projection, "coordinate plane 'i,j' for scenes above two dimensions");
  render_cmd->add_option("--report", report_path, "report whose witness is drawn");

  // demo
  auto* demo_cmd = app.add_subcommand("demo", "run the fixture suite and write all artifacts");
  std::string suite = "paper", out_dir = "demo_out";
  demo_cmd->add_option("--suite", suite, "fixture suite (only 'paper')");
  demo_cmd->add_option("--out", out_dir, "artifact directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    const std::uint64_t seed = resolve_seed(seed_flag);
    const auto t0 = std::chrono::steady_clock::now();

    if (*construct) {
      Scene scene;
      std::optional<ConstructionTrace> trace;
      if (which == "theorem1" || which == "theorem3") {
        FamilyOptions fo;
        fo.verify.certify.descent.seed = seed;
        FamilyResult r = which == "theorem1" ? construct_theorem1(make_body(body_kind, dim, semi_axes), Vec::Zero(dim), fo)
                                             : construct_theorem3(make_body(body_kind, dim, semi_axes), Vec::Zero(dim), fo);
        scene = std::move(r.scene);
        trace = std::move(r.trace);
      } else if (which == "theorem2") {
        scene = construct_theorem2(eps, shrink);
      } else if (which == "theorem4") {
        const FieldKind f = field_kind_from_string(field);
        const int m = theorem4_real_dim(n, f);
        scene = construct_theorem4(n, f, load_config_data(m, m + 1));
      } else if (which == "remark1") {
        scene = construct_remark1(exact ? 0.0 : shrink);
      } else if (which == "remark3") {
        scene = construct_remark3(n);
      } else if (which == "search") {
        return run_search(cflags, seed, out);
      } else {
        throw InputError("unknown construction '" + which + "'");
      }
      scene.seed = seed;
      print_scene_summary(scene);
      write_text(out, dump_json(scene_to_json(scene)));
      if (trace) {
        std::string tp = !trace_path.empty() ? trace_path : (out.empty() || out == "-" ? "" : out + ".trace.json");
        if (!tp.empty()) save_json(trace_to_json(*trace), tp);
      }
      return kOk;
    }

    if (*verify) {
      Scene scene = load_scene(scene_path);
      vopt.certify.descent.seed = seed;
      VerifyResult v = point_text.empty() ? verify_scene(scene, vopt) : verify_at(scene, parse_vector(point_text), vopt);
      Report r = make_report(scene, v.verdict, v.delta_used, v.method, elapsed_ms(t0), seed);
      write_text(out, dump_json(report_to_json(r)));
      return exit_for(v.verdict);
    }

    if (*falsify_cmd) {
      Scene scene = load_scene(scene_path);
      budget.seed = seed;
      CoverageProblem problem = coverage_problem(scene);
      auto w = falsify(problem, budget);
      // Re-check the witness against the exact margins before reporting it.
      if (w && !(coverage_margin(problem, w->direction) < 0)) w.reset();
      Verdict v = w ? Verdict(Uncovered{w->direction, w->miss_margin}) : Verdict(Inconclusive{0.0});
      Report r = make_report(scene, v, 0.0, "falsifier", elapsed_ms(t0), seed);
      r.extra = {{"samples", budget.sample_count}};
      write_text(out, dump_json(report_to_json(r)));
      return w ? kOk : kInconclusive;
    }

    if (*escape_cmd) {
      Scene scene = load_scene(scene_path);
      budget.seed = seed;
      EscapeResult e = construct_remark4_escape(scene, scene.point, budget);
      double worst = *std::min_element(e.margins.begin(), e.margins.end());
      Report r = make_report(scene, Uncovered{e.direction, worst}, 0.0,
                             e.from_recipe ? "closest-pair recipe" : "falsifier", elapsed_ms(t0), seed);
      r.extra = {{"margins", e.margins}};
      write_text(out, dump_json(report_to_json(r)));
      return kOk;
    }

    if (*search_cmd) return run_search(sflags, seed, out);

    if (*render_cmd) {
      Scene scene = load_scene(scene_path);
      RenderOptions ro;
      ro.projection = parse_projection(projection, scene.dim);
      if (!report_path.empty()) {
        json rep = load_json(report_path);
        if (rep.contains("witness")) {
          Vec w(static_cast<Eigen::Index>(rep["witness"].size()));
          for (std::size_t i = 0; i < rep["witness"].size(); ++i) w[static_cast<Eigen::Index>(i)] = rep["witness"][i].get<double>();
          if (w.size() == scene.dim) ro.witness = w;
        }
      }
      write_text(out, render_svg(scene, ro));
      return kOk;
    }

    if (*demo_cmd) {
      if (suite != "paper") throw InputError("unknown suite '" + suite + "'");
      DemoOptions o;
      o.out_dir = out_dir;
      o.seed = seed;
      auto rows = run_demo_suite(o);
      std::cout << format_demo_table(rows);
      bool all = std::all_of(rows.begin(), rows.end(), [](const DemoRow& r) { return r.met; });
      return all ? kOk : kUncovered;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error (input): " << e.what() << '\n';
    return kInput;
  }
  return kOk;
}
