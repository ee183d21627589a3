#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "juliaflow/error.hpp"
#include "juliaflow/harmonic_measure.hpp"
#include "juliaflow/plane_sampling.hpp"
#include "juliaflow/plane_tree.hpp"
#include "juliaflow/tree_io.hpp"
#include "juliaflow/tree_walk.hpp"

namespace jf = juliaflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitConnected = 2;
constexpr int kExitResolution = 3;
constexpr int kExitMalformed = 4;
constexpr int kExitUsage = 64;

struct RunConfig {
  std::string poly;
  std::string tree_in;
  std::string tree_out;
  std::string out;
  std::uint64_t seed = 1;
  int max_level = 4;
  int grid = 1024;
  int level = 3;
  std::string mode = "loop_erased";
  std::uint64_t samples = 100000;
  std::uint64_t angles = 10000;
  std::uint64_t runs = 2000;
  std::optional<double> entry_potential;
  int width = 800;
};

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty() || cfg.out == "-") {
    std::cout << text;
  } else {
    jf::write_text_file(cfg.out, text);
  }
}

jf::BuildOptions build_options(const RunConfig& cfg, int max_level) {
  jf::BuildOptions o;
  o.max_level = max_level;
  o.grid_resolution = cfg.grid;
  return o;
}

// Polynomial from --poly, else from the input document.
std::string resolve_poly(const RunConfig& cfg, const std::optional<jf::TreeDocument>& doc) {
  if (!cfg.poly.empty()) return cfg.poly;
  if (doc && doc->poly) return *doc->poly;
  throw jf::InvalidArgument("a polynomial is required (--poly, or a tree document that records one)");
}

std::optional<jf::TreeDocument> maybe_read(const RunConfig& cfg) {
  if (cfg.tree_in.empty()) return std::nullopt;
  return jf::read_tree_file(cfg.tree_in);
}

// Plane data rebuilt from the polynomial; an input document must describe the same tree.
jf::PlaneTree plane_for(const RunConfig& cfg, const std::optional<jf::TreeDocument>& doc, int min_level) {
  const jf::Polynomial p = jf::Polynomial::parse(resolve_poly(cfg, doc));
  const int depth = doc ? std::max(doc->tree.max_level, min_level) : std::max(cfg.max_level, min_level);
  jf::PlaneTree plane = jf::build_plane_tree(p, build_options(cfg, depth));
  if (doc && doc->tree.max_level == depth &&
      jf::serialize_tree(doc->tree) != jf::serialize_tree(plane.tree)) {
    throw jf::InvalidArgument("the tree document does not match the tree rebuilt from its polynomial");
  }
  return plane;
}

jf::TreeDocument tree_for(const RunConfig& cfg) {
  if (auto doc = maybe_read(cfg)) return *doc;
  const jf::Polynomial p = jf::Polynomial::parse(resolve_poly(cfg, std::nullopt));
  jf::TreeDocument doc;
  doc.tree = jf::build_tree(p, build_options(cfg, cfg.max_level));
  doc.poly = p.to_string();
  return doc;
}

jf::MeasureAssignment measure_of(const jf::TreeDocument& doc) {
  return doc.omega ? *doc.omega : jf::compute_omega(doc.tree);
}

int cmd_build(const RunConfig& cfg) {
  if (cfg.max_level < 1) throw jf::InvalidArgument("--max-level must be at least 1");
  const auto t0 = std::chrono::steady_clock::now();
  const jf::Polynomial p = jf::Polynomial::parse(cfg.poly);
  const jf::PlaneTree plane = jf::build_plane_tree(p, build_options(cfg, cfg.max_level));
  const jf::MeasureAssignment m = jf::compute_omega(plane.tree);
  const std::string text = jf::serialize_tree(plane.tree, &m, p.to_string());
  if (cfg.tree_out.empty() || cfg.tree_out == "-") {
    std::cout << text;
  } else {
    jf::write_text_file(cfg.tree_out, text);
  }
  std::size_t positive = 0;
  for (int l = 0; l <= plane.tree.max_level; ++l) positive += plane.tree.level(l).size();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "built " << positive << " vertices at levels 0.." << plane.tree.max_level << " plus "
            << -plane.tree.min_level << " extended-root levels; H = " << plane.tree.H << "; " << std::fixed
            << std::setprecision(2) << secs << " s\n";
  return kExitOk;
}

int cmd_check(const RunConfig& cfg) {
  const jf::TreeDocument doc = jf::read_tree_file(cfg.tree_in);
  bool ok = true;
  const jf::ValidationReport axioms = jf::verify_axioms(doc.tree);
  std::cout << "# axioms\n" << axioms.to_string();
  ok = ok && axioms.all_passed();
  if (!axioms.all_passed()) {
    std::cout << "# measure checks skipped: the tree violates the axioms\n";
    return kExitFailed;
  }
  const jf::MeasureAssignment exact = jf::compute_omega(doc.tree);
  if (doc.omega) {
    bool same = true;
    for (const auto& [l, row] : doc.tree.levels) {
      for (const jf::Vertex& v : row) same = same && doc.omega->at(v.id) == exact.at(v.id);
    }
    std::cout << (same ? "PASS" : "FAIL") << " omega_matches_degrees\n";
    ok = ok && same;
  }
  const jf::MeasureAssignment& m = doc.omega ? *doc.omega : exact;
  const jf::ValidationReport flow = jf::verify_flow(doc.tree, m);
  const jf::ValidationReport inv = jf::verify_f_invariance(doc.tree, m);
  std::cout << "# measure\n" << flow.to_string() << inv.to_string();
  ok = ok && flow.all_passed() && inv.all_passed();
  if (doc.poly) {
    const jf::Polynomial p = jf::Polynomial::parse(*doc.poly);
    const jf::DecayReport decay = jf::decay_bound(doc.tree, m, jf::critical_points(p));
    std::cout << "# decay\n"
              << (decay.all_ok ? "PASS" : "FAIL") << " decay_bound D=" << decay.bound.D << " c0=" << decay.bound.c0
              << '\n'
              << (decay.chained_ok ? "PASS" : "FAIL") << " chained_decay_bound\n";
    ok = ok && decay.all_ok && decay.chained_ok;
  }
  std::cout << (ok ? "OK" : "FAILED") << '\n';
  return ok ? kExitOk : kExitFailed;
}

int cmd_measure(const RunConfig& cfg) {
  jf::TreeDocument doc = tree_for(cfg);
  const jf::MeasureAssignment m = jf::compute_omega(doc.tree);
  std::optional<jf::DecayReport> decay;
  if (doc.poly) decay = jf::decay_bound(doc.tree, m, jf::critical_points(jf::Polynomial::parse(*doc.poly)));
  if (!decay) decay = jf::decay_bound(doc.tree, m, 1, 1, 1);
  emit(cfg, jf::measure_csv(doc.tree, m, *decay));
  if (!cfg.tree_out.empty()) jf::write_text_file(cfg.tree_out, jf::serialize_tree(doc.tree, &m, doc.poly.value_or("")));
  return kExitOk;
}

int cmd_walk(const RunConfig& cfg) {
  const jf::TreeDocument doc = tree_for(cfg);
  const jf::MeasureAssignment m = measure_of(doc);
  jf::WalkConfig wc;
  wc.seed = cfg.seed;
  wc.mode = jf::parse_walk_mode(cfg.mode);
  wc.target_level = cfg.level;
  const jf::SampleReport r = jf::empirical_cone_measure(doc.tree, m, wc, cfg.samples);
  emit(cfg, jf::sample_csv(r));
  std::cerr << "walk mode=" << jf::to_string(wc.mode) << " seed=" << r.seed << " samples=" << r.n_samples
            << " abandoned=" << r.abandoned << " flagged=" << (r.any_flag() ? "yes" : "no") << '\n';
  return kExitOk;
}

int cmd_rays(const RunConfig& cfg) {
  const auto doc = maybe_read(cfg);
  const jf::PlaneTree plane = plane_for(cfg, doc, cfg.level);
  const jf::MeasureAssignment m = jf::compute_omega(plane.tree);
  const jf::RayEstimate est = jf::estimate_omega_rays(plane, m, cfg.angles, cfg.seed, cfg.level);
  emit(cfg, jf::sample_csv(est.report));
  std::cerr << "rays seed=" << cfg.seed << " angles=" << cfg.angles << " non_smooth=" << est.non_smooth
            << " nesting=" << (est.nesting_ok ? "ok" : "broken")
            << " flagged=" << (est.report.any_flag() ? "yes" : "no") << '\n';
  return kExitOk;
}

int cmd_brownian(const RunConfig& cfg) {
  const auto doc = maybe_read(cfg);
  const jf::PlaneTree plane = plane_for(cfg, doc, cfg.level);
  const jf::MeasureAssignment m = jf::compute_omega(plane.tree);
  const jf::BrownianEstimate est =
      jf::estimate_omega_brownian(plane, m, cfg.runs, cfg.seed, cfg.level, cfg.entry_potential);
  std::ostringstream out;
  out << jf::sample_csv(est.report);
  out << "\n# summary\n";
  out << "seed," << cfg.seed << '\n';
  out << "runs," << est.report.n_samples << '\n';
  out << "abandoned," << est.report.abandoned << '\n';
  out << "nesting_failures," << est.nesting_failures << '\n';
  std::vector<int> trend;
  for (int l = 2; l <= plane.tree.max_level; l += 2) trend.push_back(l);
  const jf::IslandReport island = jf::island_entry_experiment(plane, m, 0, cfg.level, cfg.seed, trend);
  jf::IslandReport shown = island;
  if (!island.vacuous) {
    // Reuse the runs above for the empirical island fraction.
    const auto marked = jf::island_marker(plane.tree);
    shown.runs = est.report.n_samples;
    shown.completed = est.report.n_samples - est.report.abandoned;
    shown.hits = 0;
    for (const auto& [id, count] : est.report.counts) {
      if (marked(id)) shown.hits += count;
    }
    const double mass = jf::to_double(island.exact_mass);
    shown.empirical = shown.completed ? static_cast<double>(shown.hits) / static_cast<double>(shown.completed) : 0.0;
    shown.band = jf::binomial_band(mass, shown.completed);
    shown.consistent = std::abs(shown.empirical - mass) <= shown.band + 1e-12;
  }
  out << jf::island_summary(shown);
  emit(cfg, out.str());
  return kExitOk;
}

int cmd_render(const RunConfig& cfg) {
  const auto doc = maybe_read(cfg);
  const jf::PlaneTree plane = plane_for(cfg, doc, cfg.level);
  jf::RenderOptions ro;
  ro.width = cfg.width;
  ro.max_level = cfg.level;
  if (cfg.out.empty() || cfg.out == "-") throw jf::InvalidArgument("render needs --out for the image file");
  jf::write_text_file(cfg.out, jf::render_ppm(plane, ro));
  return kExitOk;
}

int cmd_report(const RunConfig& cfg) {
  const auto doc = maybe_read(cfg);
  const jf::PlaneTree plane = plane_for(cfg, doc, cfg.level);
  const jf::MeasureAssignment m = jf::compute_omega(plane.tree);
  jf::WalkConfig wc;
  wc.seed = cfg.seed;
  wc.target_level = cfg.level;
  const jf::SampleReport walk = jf::empirical_cone_measure(plane.tree, m, wc, cfg.samples);
  const jf::RayEstimate rays = jf::estimate_omega_rays(plane, m, cfg.angles, cfg.seed, cfg.level);
  const jf::BrownianEstimate bm =
      jf::estimate_omega_brownian(plane, m, cfg.runs, cfg.seed, cfg.level, cfg.entry_potential);

  std::ostringstream csv;
  csv << std::setprecision(10);
  csv << "level,index,exact,walk,ray,brownian,walk_flag,ray_flag,brownian_flag\n";
  std::size_t flagged = 0;
  for (std::size_t k = 0; k < walk.rows.size(); ++k) {
    const auto& w = walk.rows[k];
    const auto& r = rays.report.rows[k];
    const auto& b = bm.report.rows[k];
    flagged += (w.flag ? 1 : 0) + (r.flag ? 1 : 0) + (b.flag ? 1 : 0);
    csv << w.id.level << ',' << w.id.index << ',' << jf::to_double(w.omega) << ',' << w.empirical << ','
        << r.empirical << ',' << b.empirical << ',' << w.flag << ',' << r.flag << ',' << b.flag << '\n';
  }
  emit(cfg, csv.str());

  std::vector<int> trend;
  for (int l = 2; l <= plane.tree.max_level; l += 2) trend.push_back(l);
  const jf::IslandReport island = jf::island_entry_experiment(plane, m, 0, cfg.level, cfg.seed, trend);
  std::cerr << "report seed=" << cfg.seed << " level=" << cfg.level << " walk_samples=" << cfg.samples
            << " angles=" << cfg.angles << " runs=" << cfg.runs << '\n'
            << "non_smooth_rays=" << rays.non_smooth << " abandoned_runs=" << bm.report.abandoned
            << " flagged_cells=" << flagged << '\n'
            << jf::island_summary(island);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trees with dynamics and harmonic measure for polynomials with disconnected Julia sets"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_poly = [&](CLI::App* s) { s->add_option("--poly", cfg.poly, "Coefficients, constant first: a+bi,..."); };
  auto add_tree_in = [&](CLI::App* s) { s->add_option("--tree-in", cfg.tree_in, "Input tree document"); };
  auto add_tree_out = [&](CLI::App* s) { s->add_option("--tree-out", cfg.tree_out, "Output tree document"); };
  auto add_out = [&](CLI::App* s) { s->add_option("--out", cfg.out, "Output file (default: standard output)"); };
  auto add_seed = [&](CLI::App* s) { s->add_option("--seed", cfg.seed, "Random seed"); };
  auto add_build = [&](CLI::App* s) {
    s->add_option("--max-level", cfg.max_level, "Deepest level to construct");
    s->add_option("--grid", cfg.grid, "Root grid resolution")->check(CLI::Range(64, 4096));
  };
  auto add_level = [&](CLI::App* s) { s->add_option("--level", cfg.level, "Target level")->check(CLI::Range(0, 64)); };

  CLI::App* build = app.add_subcommand("build", "Build the tree with dynamics and write the tree document");
  add_poly(build);
  build->get_option("--poly")->required();
  add_build(build);
  add_tree_out(build);

  CLI::App* check = app.add_subcommand("check", "Validate tree axioms, the measure flow, and decay bounds");
  add_tree_in(check);
  check->get_option("--tree-in")->required();

  CLI::App* measure = app.add_subcommand("measure", "Exact harmonic measure and decay bounds as CSV");
  add_poly(measure);
  add_tree_in(measure);
  add_tree_out(measure);
  add_build(measure);
  add_out(measure);

  CLI::App* walk = app.add_subcommand("walk", "Random-walk estimate of cone measures");
  add_poly(walk);
  add_tree_in(walk);
  add_build(walk);
  add_out(walk);
  add_seed(walk);
  add_level(walk);
  walk->add_option("--mode", cfg.mode, "loop_erased or nearest_neighbor")
      ->check(CLI::IsMember({"loop_erased", "loop-erased", "nearest_neighbor", "nearest-neighbor"}));
  walk->add_option("--samples", cfg.samples, "Number of walks");

  CLI::App* rays = app.add_subcommand("rays", "External-ray estimate of cone measures");
  add_poly(rays);
  add_tree_in(rays);
  add_build(rays);
  add_out(rays);
  add_seed(rays);
  add_level(rays);
  rays->add_option("--angles", cfg.angles, "Number of sampled angles");

  CLI::App* brownian = app.add_subcommand("brownian", "Brownian first-entry estimate and island mass");
  add_poly(brownian);
  add_tree_in(brownian);
  add_build(brownian);
  add_out(brownian);
  add_seed(brownian);
  add_level(brownian);
  brownian->add_option("--runs", cfg.runs, "Number of Brownian runs");
  brownian->add_option("--entry-potential", cfg.entry_potential, "Stopping potential (default: next level)");

  CLI::App* render = app.add_subcommand("render", "Render potential bands and components as PPM");
  add_poly(render);
  add_tree_in(render);
  add_build(render);
  add_out(render);
  add_level(render);
  render->add_option("--width", cfg.width, "Image side in pixels")->check(CLI::Range(16, 8192));

  CLI::App* report = app.add_subcommand("report", "Exact, walk, ray and Brownian estimates side by side");
  add_poly(report);
  add_tree_in(report);
  add_build(report);
  add_out(report);
  add_seed(report);
  add_level(report);
  report->add_option("--samples", cfg.samples, "Number of walks");
  report->add_option("--angles", cfg.angles, "Number of sampled angles");
  report->add_option("--runs", cfg.runs, "Number of Brownian runs");
  report->add_option("--entry-potential", cfg.entry_potential, "Stopping potential (default: next level)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*build) return cmd_build(cfg);
    if (*check) return cmd_check(cfg);
    if (*measure) return cmd_measure(cfg);
    if (*walk) return cmd_walk(cfg);
    if (*rays) return cmd_rays(cfg);
    if (*brownian) return cmd_brownian(cfg);
    if (*render) return cmd_render(cfg);
    if (*report) return cmd_report(cfg);
  } catch (const jf::ConnectedJuliaSet& e) {
    std::cerr << "error: connected Julia set: " << e.what() << '\n';
    return kExitConnected;
  } catch (const jf::ResolutionInsufficient& e) {
    std::cerr << "error: resolution insufficient: " << e.what() << '\n';
    return kExitResolution;
  } catch (const jf::MalformedDocument& e) {
    std::cerr << "error: malformed document: " << e.what() << '\n';
    return kExitMalformed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}
