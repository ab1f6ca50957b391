#include "bglue/cli/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "bglue/cli/svg.hpp"
#include "bglue/geometry/chart.hpp"

namespace bglue::cli {

namespace {

namespace fs = std::filesystem;
using glue::GluedMap;
using glue::GluedPoint;
using heisenberg::Word;

const BigScalar kOmegaTol = BigScalar(1e-3);

std::string sci(const BigScalar& v) { return v.to_string(6); }

std::string write_file(const RunConfig& cfg, const std::string& name, const std::string& body, std::ostream& out) {
  fs::create_directories(cfg.out_dir);
  fs::path p = fs::path(cfg.out_dir) / name;
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << body;
  out << "wrote " << p.string() << "\n";
  return p.string();
}

GluedMap element_of(const verify::Scene& scene, const std::string& word) {
  return scene.element(heisenberg::evaluate(Word::parse(word)));
}

/// A 2-d chart representative of p, for the single-chart control.
std::optional<geometry::Point> planar(const geometry::ManifoldModel& m, const geometry::Point& p) {
  if (p.dim() == 2) return p;
  for (const auto& id : m.atlas)
    if (geometry::chart(id).dim == 2)
      if (auto q = geometry::try_to_chart(p, id)) return q;
  return std::nullopt;
}

json verdict_json(bool ok) { return ok ? "pass" : "fail"; }

struct Orbit {
  std::vector<GluedPoint> pts;
  bool truncated = false;
  std::string reason;
};

Orbit iterate(const GluedMap& f, const GluedPoint& p, int n) {
  Orbit o;
  o.pts.push_back(f.host().canonicalize(p));
  for (int i = 1; i <= n; ++i) {
    try {
      o.pts.push_back(f(o.pts.back()));
    } catch (const DomainError& e) {
      o.truncated = true;
      o.reason = "step " + std::to_string(i) + ": " + e.what();
      break;
    }
  }
  return o;
}

/// max distance between F(t, +d) and F(t, -d) over tangential samples.
BigScalar seam_straddle_defect(const GluedMap& f, size_t seam, int samples) {
  const BigScalar d = BigScalar::pow2(-20);
  BigScalar worst(0);
  for (int i = 0; i < samples; ++i) {
    BigScalar t = BigScalar::pi() * BigScalar(2 * i + 1) / BigScalar(samples);
    GluedPoint a = f(f.host().from_seam(seam, {geometry::Coord(t), geometry::Coord(d)}));
    GluedPoint b = f(f.host().from_seam(seam, {geometry::Coord(t), geometry::Coord(-d)}));
    worst = max(worst, f.host().distance(a, b));
  }
  return worst;
}

bool doubly_periodic(const geometry::ManifoldModel& m) {
  const geometry::Chart& c = geometry::chart(m.fallback_chart);
  return c.dim == 2 && c.is_periodic(0) && c.is_periodic(1);
}

}  // namespace

// ---- verify ---------------------------------------------------------------------

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  verify::Scene scene = build_scene(cfg.scene);
  bool all = true;
  json smooth = json::array();
  out << "scene " << scene.name << (scene.smoothed() ? " (smoothed)" : " (unsmoothed)") << ", "
      << numeric::working_precision() << " bits, orders 1.." << cfg.verify.orders << "\n";

  auto record = [&](const std::string& word, const verify::SmoothnessReport& r) {
    bool ok = r.passes_through(cfg.verify.orders);
    all = all && ok;
    out << "  " << word << " at " << r.location << ":";
    for (const auto& o : r.orders) out << "  k=" << o.order << " " << verify::to_string(o.verdict) << " (" << sci(o.mismatch) << ")";
    out << "\n";
    json j = r.to_json();
    j["word"] = word;
    j["verdict"] = verdict_json(ok);
    smooth.push_back(j);
  };

  if (!scene.host.seams().empty()) {
    for (const auto& w : cfg.verify.generators) {
      GluedMap f = element_of(scene, w);
      for (size_t s = 0; s < scene.host.seams().size(); ++s)
        for (const auto& t : cfg.verify.seam_points) record(w, verify::verify_cr_at_seam(f, s, t, cfg.verify.orders, cfg.verify.fd));
    }
  } else {
    // No seam: the same two-sided comparison inside one chart (control).
    std::mt19937_64 rng(cfg.seed);
    for (const auto& w : cfg.verify.generators) {
      GluedMap f = element_of(scene, w);
      int done = 0;
      for (int attempt = 0; attempt < 40 && done < 3; ++attempt) {
        auto p = planar(scene.host.piece(0), scene.host.piece(0).sample_interior(rng));
        if (!p) continue;
        try {
          record(w, verify::verify_cr_single_chart(f.maps()[0], *p, cfg.verify.orders, cfg.verify.fd));
          ++done;
        } catch (const DomainError&) {
          // Stencil left the chart near its edge; draw another point.
        }
      }
      if (done == 0) throw DomainError("no interior point admits the single-chart stencil for word " + w);
    }
  }

  json flat = json::array();
  for (const auto& fc : cfg.verify.flatness) {
    verify::DecayReport d = verify::measure_flatness(geometry::scalar_graph(fc.germ, fc.params));
    bool ok = true;
    if (fc.expect_constant) ok = ok && std::fabs(d.constant_fit.intercept - *fc.expect_constant) < fc.constant_tol;
    if (fc.min_slope) ok = ok && (d.g_y_zero || d.slope_fit.slope > *fc.min_slope);
    all = all && ok;
    out << "  flatness " << fc.germ << ": slope " << d.slope_fit.slope << ", constant " << d.constant_fit.intercept
        << " -> " << (ok ? "pass" : "fail") << "\n";
    json j = d.to_json();
    j["germ"] = fc.germ;
    j["verdict"] = verdict_json(ok);
    flat.push_back(j);
  }

  json report = {{"precision_bits", numeric::working_precision()},
                 {"scene", scene.name},
                 {"smoothed", scene.smoothed()},
                 {"config", cfg.to_json()},
                 {"smoothness", smooth},
                 {"flatness", flat}};

  if (cfg.verify.homomorphism) {
    const auto& h = *cfg.verify.homomorphism;
    verify::HomomorphismReport r =
        verify::check_homomorphism(scene, h.words, static_cast<size_t>(h.max_len), h.points, cfg.seed);
    bool ok = r.max_defect < h.tol;
    all = all && ok;
    out << "  homomorphism: " << r.words << " words x " << r.points << " points, max defect " << sci(r.max_defect)
        << " -> " << (ok ? "pass" : "fail") << "\n";
    report["homomorphism"] = r.to_json();
    report["homomorphism"]["verdict"] = verdict_json(ok);
  }

  report["verdict"] = verdict_json(all);
  write_file(cfg, "verify_report.json", report.dump(2) + "\n", out);
  out << (all ? "PASS" : "FAIL") << "\n";
  return all ? kExitPass : kExitFail;
}

// ---- orbit ------------------------------------------------------------------------

int cmd_orbit(const RunConfig& cfg, std::ostream& out) {
  verify::Scene scene = build_scene(cfg.scene);
  GluedMap f = element_of(scene, cfg.orbit.word);

  std::vector<GluedPoint> seeds;
  for (const auto& s : cfg.orbit.seeds) {
    if (s.piece >= scene.host.pieces().size())
      throw ConfigError("orbit seed on piece " + std::to_string(s.piece) + ", scene has " +
                        std::to_string(scene.host.pieces().size()));
    seeds.push_back(scene.host.canonicalize({s.piece, s.point}));
  }
  std::mt19937_64 rng(cfg.seed);
  for (int i = 0; i < cfg.orbit.random_seeds; ++i) seeds.push_back(scene.host.sample(rng));

  std::vector<Orbit> orbits;
  for (const auto& s : seeds) orbits.push_back(iterate(f, s, cfg.orbit.iterates));

  std::ostringstream csv;
  size_t dim = 0;
  for (const auto& o : orbits)
    for (const auto& p : o.pts) dim = std::max(dim, p.point.dim());
  csv << "seed,step,piece,chart";
  for (size_t i = 0; i < dim; ++i) csv << ",x" << i;
  csv << "\n";
  for (size_t k = 0; k < orbits.size(); ++k)
    for (size_t s = 0; s < orbits[k].pts.size(); ++s) {
      const GluedPoint& p = orbits[k].pts[s];
      csv << k << ',' << s << ',' << p.piece << ',' << p.point.chart;
      for (const auto& c : p.point.x) csv << ',' << c.to_string(20);
      for (size_t i = p.point.dim(); i < dim; ++i) csv << ',';
      csv << "\n";
    }

  out << "scene " << scene.name << ", word " << cfg.orbit.word << ", " << seeds.size() << " seeds x "
      << cfg.orbit.iterates << " iterates\n";
  json summary = {{"precision_bits", numeric::working_precision()},
                  {"scene", scene.name},
                  {"word", cfg.orbit.word},
                  {"iterates", cfg.orbit.iterates}};
  json per_seed = json::array();
  const bool single = scene.host.pieces().size() == 1;
  for (size_t k = 0; k < orbits.size(); ++k) {
    const Orbit& o = orbits[k];
    json j = {{"seed", k}, {"base", o.pts.front().to_string(12)}, {"points", o.pts.size()}, {"truncated", o.truncated}};
    if (o.truncated) j["truncation_reason"] = o.reason;
    std::string line = "  seed " + std::to_string(k) + " " + o.pts.front().to_string(6);
    if (single) {
      verify::OrbitData d;
      d.base = o.pts.front().point;
      d.generator = cfg.orbit.word;
      d.iterates = static_cast<int>(o.pts.size()) - 1;
      for (const auto& p : o.pts) d.trajectory.push_back(p.point);
      verify::OmegaEstimate w = verify::omega_estimate(d, kOmegaTol);
      j["omega"] = w.to_json();
      line += " -> omega " + w.point.to_string(6) + " residual " + sci(w.residual) +
              (w.converged ? " (converged)" : " (not converged)");
    }
    if (o.truncated) line += " [truncated at " + o.reason + "]";
    out << line << "\n";
    per_seed.push_back(j);
  }
  summary["seeds"] = per_seed;

  if (!scene.host.seams().empty()) {
    json seams = json::array();
    for (size_t s = 0; s < scene.host.seams().size(); ++s) {
      BigScalar d = seam_straddle_defect(f, s, 64);
      out << "  seam-straddle defect on seam " << s << " (|s| = 2^-20, 64 points): " << sci(d) << "\n";
      seams.push_back({{"seam", s}, {"defect", sci(d)}});
    }
    summary["seam_straddle"] = seams;
  }

  int code = kExitPass;
  const bool periodic = single && doubly_periodic(scene.host.piece(0));
  if (cfg.orbit.density && !periodic)
    throw ConfigError("orbit.density needs a single-piece scene with a doubly periodic chart");
  if (periodic) {
    DensityCase dc = cfg.orbit.density.value_or(DensityCase{});
    json dens = json::array();
    for (size_t k = 0; k < seeds.size(); ++k) {
      verify::DensityReport r = verify::word_ball_density(scene.actions[0], seeds[k].point, dc.eps, dc.max_len);
      out << "  density seed " << k << ": eps " << sci(dc.eps) << ", " << r.cells_per_axis << "^2 cells, "
          << (r.dense ? "dense at word length " + std::to_string(*r.length_when_dense)
                      : "not dense by length " + std::to_string(dc.max_len) + " (" + std::to_string(r.uncovered) +
                            " cells missed)")
          << ", " << r.points << " points\n";
      if (!r.dense) code = kExitFail;
      json j = r.to_json();
      j["seed"] = k;
      dens.push_back(j);
    }
    summary["density"] = dens;
  }

  std::vector<std::vector<GluedPoint>> pts;
  for (const auto& o : orbits) pts.push_back(o.pts);
  write_file(cfg, "orbits.csv", csv.str(), out);
  write_file(cfg, "orbits.svg",
             orbit_portrait(scene, pts, cfg.orbit.style, scene.name + ": orbits of " + cfg.orbit.word), out);
  write_file(cfg, "orbit_summary.json", summary.dump(2) + "\n", out);
  return code;
}

// ---- distortion -------------------------------------------------------------------

int cmd_distortion(const RunConfig& cfg, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  heisenberg::DistortionProfile p = heisenberg::distortion_profile(cfg.distortion.n_max, cfg.distortion.radius);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out << "BFS radius " << p.radius << ": " << p.ball_size << " elements, " << secs << " s\n";
  out << "|Z| = " << p.rows[0].length << (p.rows[0].exact ? " (exact)" : " (witness bound)") << "\n";
  out << "min-so-far |Z^m|/m:";
  for (long n = 1; n <= cfg.distortion.n_max; ++n) {
    long m = n * n;
    out << (n == 1 ? " " : ", ") << "m=" << m << ": " << p.min_ratio_upto(m);
  }
  out << "\n";
  out << "|Z^{n^2}| <= 4n for n <= " << cfg.distortion.n_max << ": " << (p.square_bound_holds ? "yes" : "no")
      << "; min-so-far nonincreasing: " << (p.min_ratio_nonincreasing ? "yes" : "no") << "\n";
  write_file(cfg, "distortion.csv", p.to_csv(), out);
  json j = p.to_json();
  j["config"] = {{"n_max", cfg.distortion.n_max}, {"radius", cfg.distortion.radius}};
  write_file(cfg, "distortion.json", j.dump(2) + "\n", out);
  return p.square_bound_holds && p.min_ratio_nonincreasing ? kExitPass : kExitFail;
}

// ---- scene-dump -------------------------------------------------------------------

int cmd_scene_dump(const RunConfig& cfg, std::ostream& out) {
  verify::Scene scene = build_scene(cfg.scene);
  json free = json::array();
  for (const auto& [piece, comp] : scene.host.free_boundary()) free.push_back({{"piece", piece}, {"component", comp}});
  json j = {{"precision_bits", numeric::working_precision()},
            {"config", cfg.to_json()},
            {"scene", scene.to_json()},
            {"euler_characteristic", scene.host.euler_characteristic()},
            {"free_boundary", free},
            {"closed", scene.host.closed()}};
  if (scene.host.closed()) j["topology"] = scene.host.topology();
  out << "scene " << scene.name << ": " << scene.host.pieces().size() << " piece(s), " << scene.host.seams().size()
      << " seam(s), chi = " << scene.host.euler_characteristic()
      << (scene.host.closed() ? ", closed (" + scene.host.topology() + ")" : ", with boundary") << "\n";
  write_file(cfg, "scene.json", j.dump(2) + "\n", out);
  return kExitPass;
}

// ---- command line -------------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boundary gluing of group actions: seam checks, orbits and distortion tables", "bglue"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  std::optional<int> precision, order, n_max, radius, iterates;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> word;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--precision", precision, "working precision in bits (overrides the config)")
      ->check(CLI::Range(32, 4096));
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--order", order, "highest derivative order to verify")->check(CLI::Range(1, 6));
  app.add_option("--seed", seed, "seed for sampled points and words");

  auto* verify_cmd = app.add_subcommand("verify", "C^r seam checks, flatness fits, homomorphism check");
  auto* orbit_cmd = app.add_subcommand("orbit", "orbit CSV, SVG portrait, omega and density summaries");
  orbit_cmd->add_option("--word", word, "iterated word, e.g. Y or XYxy");
  orbit_cmd->add_option("--iterates", iterates, "iterates per seed")->check(CLI::Range(1, 10'000'000));
  auto* dist_cmd = app.add_subcommand("distortion", "word lengths of Z^m from BFS and witness words");
  dist_cmd->add_option("--n-max", n_max, "rows m = 1 .. n_max^2")->check(CLI::Range(1, 1000));
  dist_cmd->add_option("--radius", radius, "exact BFS radius")->check(CLI::Range(1, 1000));
  auto* dump_cmd = app.add_subcommand("scene-dump", "write the built scene as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    json doc = config_path.empty() ? json::object() : load_json_file(config_path);
    const int bits = precision.value_or(config_precision(doc));
    numeric::PrecisionScope scope(bits);
    RunConfig cfg = parse_config(doc);
    cfg.precision_bits = bits;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (order) cfg.verify.orders = *order;
    if (seed) cfg.seed = *seed;
    if (word) {
      Word::parse(*word);
      cfg.orbit.word = *word;
    }
    if (iterates) cfg.orbit.iterates = *iterates;
    if (n_max) cfg.distortion.n_max = *n_max;
    if (radius) cfg.distortion.radius = *radius;
    // The environment wins over the config so a run can be throttled without editing it.
    if (cfg.threads && std::getenv("BGLUE_THREADS") == nullptr)
      setenv("BGLUE_THREADS", std::to_string(*cfg.threads).c_str(), 1);
    verify::worker_count();

    if (*verify_cmd) return cmd_verify(cfg, out);
    if (*orbit_cmd) return cmd_orbit(cfg, out);
    if (*dist_cmd) return cmd_distortion(cfg, out);
    if (*dump_cmd) return cmd_scene_dump(cfg, out);
    return kExitUsage;
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << " (largest radius within budget: " << e.partial() << ")\n";
    return kExitUsage;
  } catch (const glue::IncompatibleMaps& e) {
    err << "error: scene maps do not glue: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConstructionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFail;
  }
}

}  // namespace bglue::cli
