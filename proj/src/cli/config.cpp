#include "bglue/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "bglue/geometry/chart.hpp"

namespace bglue::cli {

namespace {

/// Cursor over one JSON object of the config. Every key has to be declared
/// through one of the accessors; leftovers are reported by finish().
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  bool has(const std::string& k) {
    seen_.insert(k);
    return j_.contains(k);
  }

  [[noreturn]] void fail(const std::string& k, const std::string& msg) const {
    throw ConfigError(where(k) + ": " + msg);
  }

  std::string where(const std::string& k) const {
    if (k.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? k : path_ + "." + k;
  }

  const json& raw(const std::string& k) {
    seen_.insert(k);
    return j_.at(k);
  }

  int integer(const std::string& k, int def, long lo, long hi) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_number_integer()) fail(k, "expected an integer, got " + v.dump());
    long x = v.get<long>();
    if (x < lo || x > hi) fail(k, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(x);
  }

  double real(const std::string& k, double def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_number()) fail(k, "expected a number, got " + v.dump());
    return v.get<double>();
  }

  bool boolean(const std::string& k, bool def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_boolean()) fail(k, "expected true or false, got " + v.dump());
    return v.get<bool>();
  }

  std::string string(const std::string& k, const std::string& def) {
    if (!has(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_string()) fail(k, "expected a string, got " + v.dump());
    return v.get<std::string>();
  }

  std::string choice(const std::string& k, const std::string& def, const std::vector<std::string>& allowed) {
    std::string s = string(k, def);
    for (const auto& a : allowed)
      if (a == s) return s;
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    fail(k, "'" + s + "' is not one of: " + list);
  }

  BigScalar scalar(const std::string& k, const BigScalar& def) {
    if (!has(k)) return def;
    return to_scalar(j_.at(k), where(k));
  }

  BigScalar positive(const std::string& k, const BigScalar& def) {
    BigScalar v = scalar(k, def);
    if (!(v > BigScalar(0))) fail(k, "must be positive");
    return v;
  }

  const json& array(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_array()) fail(k, "expected an array, got " + v.dump());
    return v;
  }

  static BigScalar to_scalar(const json& v, const std::string& where) {
    if (v.is_number()) return BigScalar(v.get<double>());
    if (v.is_string()) {
      try {
        return BigScalar(v.get<std::string>());
      } catch (const ParameterError& e) {
        throw ConfigError(where + ": " + e.what());
      }
    }
    throw ConfigError(where + ": expected a number or numeric string, got " + v.dump());
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(where(k) + ": unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string color(Obj& o, const std::string& k, const std::string& def) {
  std::string c = o.string(k, def);
  bool ok = c.size() == 7 && c[0] == '#';
  for (size_t i = 1; ok && i < c.size(); ++i) ok = std::isxdigit(static_cast<unsigned char>(c[i])) != 0;
  if (!ok) o.fail(k, "expected a colour of the form #rrggbb, got '" + c + "'");
  return c;
}

SceneConfig parse_scene(const json& j) {
  Obj o(j, "scene");
  SceneConfig s;
  s.preset = o.choice("preset", s.preset, {"disk_annulus", "identity", "action", "custom"});
  s.smoothed = o.boolean("smoothed", s.smoothed);
  if (o.has("stretch")) {
    Obj st(o.raw("stretch"), "scene.stretch");
    s.y0 = st.positive("y0", s.y0);
    s.y1 = st.positive("y1", s.y1);
    s.blend = st.choice("blend", s.blend, {"phi-step"});
    st.finish();
    if (!(s.y0 < s.y1 && s.y1 < BigScalar(1))) o.fail("stretch", "need 0 < y0 < y1 < 1");
  }
  if (s.preset == "action") {
    if (!o.has("target")) o.fail("target", "required for preset 'action'");
    s.target = o.choice("target", "", heisenberg::action_targets());
  }
  if (o.has("alpha")) {
    if (s.preset != "action") o.fail("alpha", "only used with preset 'action'");
    s.alpha = o.positive("alpha", BigScalar(0));
  }
  if (s.preset == "custom") {
    if (!o.has("host")) o.fail("host", "required for preset 'custom'");
    s.host = o.raw("host");
    for (const auto& a : o.array("actions")) {
      if (!a.is_string()) o.fail("actions", "expected action target names");
      s.actions.push_back(a.get<std::string>());
    }
  } else {
    if (o.has("host")) o.fail("host", "only used with preset 'custom'");
    if (o.has("actions")) o.fail("actions", "only used with preset 'custom'");
  }
  if (s.preset != "action" && o.has("target")) o.fail("target", "only used with preset 'action'");
  o.finish();
  return s;
}

FlatnessCase parse_flatness(const json& j, const std::string& path) {
  Obj o(j, path);
  FlatnessCase f;
  f.germ = o.choice("germ", "", {"germ_linear", "germ_shear", "germ_random"});
  if (o.has("params"))
    for (const auto& v : o.array("params")) f.params.push_back(Obj::to_scalar(v, path + ".params"));
  if (o.has("expect_constant")) f.expect_constant = o.real("expect_constant", 0);
  f.constant_tol = o.real("constant_tol", f.constant_tol);
  if (o.has("min_slope")) f.min_slope = o.real("min_slope", 0);
  o.finish();
  return f;
}

VerifyConfig parse_verify(const json& j) {
  Obj o(j, "verify");
  VerifyConfig v;
  v.orders = o.integer("orders", v.orders, 1, 6);
  if (o.has("seam_points")) {
    v.seam_points.clear();
    for (const auto& t : o.array("seam_points")) v.seam_points.push_back(Obj::to_scalar(t, "verify.seam_points"));
  }
  if (o.has("generators")) {
    v.generators.clear();
    for (const auto& g : o.array("generators")) {
      if (!g.is_string()) o.fail("generators", "expected words such as \"X\" or \"XYxy\"");
      try {
        heisenberg::Word::parse(g.get<std::string>());
      } catch (const ParameterError& e) {
        o.fail("generators", e.what());
      }
      v.generators.push_back(g.get<std::string>());
    }
  }
  if (o.has("fd")) {
    Obj f(o.raw("fd"), "verify.fd");
    v.fd.base_step = f.positive("base_step", v.fd.base_step);
    v.fd.richardson_levels = f.integer("richardson_levels", v.fd.richardson_levels, 2, 12);
    v.fd.directions = f.integer("directions", v.fd.directions, 1, 64);
    f.finish();
  }
  if (o.has("tolerance")) {
    Obj t(o.raw("tolerance"), "verify.tolerance");
    v.fd.tol.seam_pass_abs = t.positive("pass_abs", v.fd.tol.seam_pass_abs);
    v.fd.tol.seam_rel = t.scalar("pass_rel", v.fd.tol.seam_rel);
    v.fd.tol.seam_fail_factor = t.positive("fail_factor", v.fd.tol.seam_fail_factor);
    t.finish();
  }
  if (o.has("flatness")) {
    const json& a = o.array("flatness");
    for (size_t i = 0; i < a.size(); ++i) v.flatness.push_back(parse_flatness(a[i], "verify.flatness[" + std::to_string(i) + "]"));
  }
  if (o.has("homomorphism")) {
    Obj h(o.raw("homomorphism"), "verify.homomorphism");
    HomomorphismCase c;
    c.words = h.integer("words", c.words, 1, 100000);
    c.max_len = h.integer("max_len", c.max_len, 1, 64);
    c.points = h.integer("points", c.points, 1, 100000);
    c.tol = h.positive("tol", c.tol);
    h.finish();
    v.homomorphism = c;
  }
  o.finish();
  return v;
}

OrbitSeed parse_seed(const json& j, const std::string& path) {
  Obj o(j, path);
  OrbitSeed s;
  s.piece = static_cast<size_t>(o.integer("piece", 0, 0, 64));
  std::string chart = o.string("chart", "");
  if (!geometry::ChartRegistry::instance().has(chart)) o.fail("chart", "unknown chart '" + chart + "'");
  std::vector<BigScalar> xs;
  for (const auto& v : o.array("x")) xs.push_back(Obj::to_scalar(v, path + ".x"));
  if (static_cast<int>(xs.size()) != geometry::chart(chart).dim)
    o.fail("x", "chart " + chart + " has dimension " + std::to_string(geometry::chart(chart).dim));
  s.point = geometry::make_point(chart, xs);
  o.finish();
  return s;
}

OrbitConfig parse_orbit(const json& j) {
  Obj o(j, "orbit");
  OrbitConfig c;
  c.word = o.string("word", c.word);
  try {
    heisenberg::Word::parse(c.word);
  } catch (const ParameterError& e) {
    o.fail("word", e.what());
  }
  c.iterates = o.integer("iterates", c.iterates, 1, 10'000'000);
  if (o.has("seeds")) {
    const json& a = o.array("seeds");
    for (size_t i = 0; i < a.size(); ++i) c.seeds.push_back(parse_seed(a[i], "orbit.seeds[" + std::to_string(i) + "]"));
  }
  c.random_seeds = o.integer("random_seeds", c.random_seeds, 0, 10000);
  if (o.has("density")) {
    Obj d(o.raw("density"), "orbit.density");
    DensityCase dc;
    dc.eps = d.positive("eps", dc.eps);
    dc.max_len = d.integer("max_len", dc.max_len, 1, 100000);
    d.finish();
    c.density = dc;
  }
  if (o.has("svg")) {
    Obj s(o.raw("svg"), "orbit.svg");
    c.style.size = s.integer("size", c.style.size, 64, 8192);
    c.style.background = color(s, "background", c.style.background);
    c.style.boundary = color(s, "boundary", c.style.boundary);
    c.style.equator = color(s, "equator", c.style.equator);
    c.style.seam = color(s, "seam", c.style.seam);
    c.style.fixed = color(s, "fixed", c.style.fixed);
    if (s.has("orbits")) {
      c.style.orbits.clear();
      for (const auto& v : s.array("orbits")) {
        if (!v.is_string()) s.fail("orbits", "expected colour strings");
        json one = {{"c", v}};
        Obj tmp(one, "orbit.svg.orbits");
        c.style.orbits.push_back(color(tmp, "c", ""));
      }
      if (c.style.orbits.empty()) s.fail("orbits", "at least one colour is required");
    }
    s.finish();
  }
  o.finish();
  if (c.seeds.empty() && c.random_seeds == 0) c.random_seeds = 12;
  return c;
}

DistortionConfig parse_distortion(const json& j) {
  Obj o(j, "distortion");
  DistortionConfig d;
  d.n_max = o.integer("n_max", d.n_max, 1, 1000);
  d.radius = o.integer("radius", d.radius, 1, 1000);
  o.finish();
  return d;
}

}  // namespace

int config_precision(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>: expected an object");
  if (!j.contains("precision_bits")) return numeric::kDefaultPrecisionBits;
  const json& v = j.at("precision_bits");
  if (!v.is_number_integer() || v.get<long>() < 32 || v.get<long>() > 4096)
    throw ConfigError("precision_bits: expected an integer in [32, 4096], got " + v.dump());
  return v.get<int>();
}

RunConfig parse_config(const json& j) {
  Obj o(j, "");
  RunConfig c;
  c.precision_bits = config_precision(j);
  o.has("precision_bits");
  if (o.has("threads")) c.threads = o.integer("threads", 1, 1, 1024);
  if (o.has("seed")) {
    const json& v = o.raw("seed");
    if (!v.is_number_integer() || v.get<long long>() < 0) o.fail("seed", "expected a non-negative integer");
    c.seed = v.get<std::uint64_t>();
  }
  if (o.has("output")) {
    Obj out(o.raw("output"), "output");
    c.out_dir = out.string("dir", c.out_dir);
    out.finish();
  }
  if (o.has("scene")) c.scene = parse_scene(o.raw("scene"));
  if (o.has("verify")) c.verify = parse_verify(o.raw("verify"));
  c.orbit = parse_orbit(o.has("orbit") ? o.raw("orbit") : json::object());
  if (o.has("distortion")) c.distortion = parse_distortion(o.raw("distortion"));
  o.finish();
  return c;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

json RunConfig::to_json() const {
  auto s = [](const BigScalar& v) { return v.to_string(20); };
  json pts = json::array();
  for (const auto& t : verify.seam_points) pts.push_back(s(t));
  json flat = json::array();
  for (const auto& f : verify.flatness) {
    json params = json::array();
    for (const auto& p : f.params) params.push_back(s(p));
    json one = {{"germ", f.germ}, {"params", params}, {"constant_tol", f.constant_tol}};
    if (f.expect_constant) one["expect_constant"] = *f.expect_constant;
    if (f.min_slope) one["min_slope"] = *f.min_slope;
    flat.push_back(one);
  }
  json scene_j = {{"preset", scene.preset},
                  {"smoothed", scene.smoothed},
                  {"stretch", {{"y0", s(scene.y0)}, {"y1", s(scene.y1)}, {"blend", scene.blend}}}};
  if (!scene.target.empty()) scene_j["target"] = scene.target;
  if (scene.alpha) scene_j["alpha"] = s(*scene.alpha);
  if (scene.preset == "custom") {
    scene_j["host"] = scene.host;
    scene_j["actions"] = scene.actions;
  }
  json verify_j = {{"orders", verify.orders},
                   {"seam_points", pts},
                   {"generators", verify.generators},
                   {"fd", verify.fd.to_json()},
                   {"flatness", flat}};
  if (verify.homomorphism)
    verify_j["homomorphism"] = {{"words", verify.homomorphism->words},
                                {"max_len", verify.homomorphism->max_len},
                                {"points", verify.homomorphism->points},
                                {"tol", s(verify.homomorphism->tol)}};
  json seeds = json::array();
  for (const auto& sd : orbit.seeds) seeds.push_back({{"piece", sd.piece}, {"point", verify::point_to_json(sd.point)}});
  json orbit_j = {{"word", orbit.word}, {"iterates", orbit.iterates}, {"seeds", seeds}, {"random_seeds", orbit.random_seeds}};
  if (orbit.density) orbit_j["density"] = {{"eps", s(orbit.density->eps)}, {"max_len", orbit.density->max_len}};
  json j = {{"precision_bits", precision_bits},
            {"seed", seed},
            {"output", {{"dir", out_dir}}},
            {"scene", scene_j},
            {"verify", verify_j},
            {"orbit", orbit_j},
            {"distortion", {{"n_max", distortion.n_max}, {"radius", distortion.radius}}}};
  if (threads) j["threads"] = *threads;
  return j;
}

verify::Scene build_scene(const SceneConfig& c) {
  stretch::ProfilePtr profile;
  if (c.smoothed) profile = stretch::build_chi(c.y0, c.y1, stretch::blend_by_name(c.blend));
  if (c.preset == "disk_annulus") return verify::disk_annulus_scene(profile);
  if (c.preset == "identity") {
    auto d = geometry::disk_model();
    return verify::make_scene("identity", glue::glue_pair(d, "S1", d, "S1", geometry::identity_map(1)),
                              {heisenberg::trivial_action(d), heisenberg::trivial_action(d)}, profile);
  }
  if (c.preset == "action") {
    auto spec = heisenberg::build_action(c.target, c.alpha.value_or(BigScalar(0)));
    return verify::make_scene(c.target, glue::GluedManifold({spec.model}, {}), {spec}, nullptr);
  }
  glue::GluedManifold host = [&] {
    try {
      return glue::glued_from_json(c.host);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("scene.host: ") + e.what());
    }
  }();
  std::vector<heisenberg::ActionSpec> acts;
  for (size_t i = 0; i < c.actions.size(); ++i) {
    acts.push_back(c.actions[i] == "trivial" && i < host.pieces().size() ? heisenberg::trivial_action(host.piece(i))
                                                                         : heisenberg::build_action(c.actions[i]));
  }
  if (host.seams().empty()) profile = nullptr;
  return verify::make_scene("custom", std::move(host), std::move(acts), profile);
}

}  // namespace bglue::cli
