#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bglue/errors.hpp"
#include "bglue/verify/verify.hpp"

namespace bglue::cli {

using geometry::json;
using numeric::BigScalar;

/// Malformed or schema-violating run configuration (exit code 2).
class ConfigError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

struct SceneConfig {
  /// disk_annulus | identity | action | custom
  std::string preset = "disk_annulus";
  std::string target;             ///< action preset: one of heisenberg::action_targets()
  std::optional<BigScalar> alpha;  ///< quotient period for torus-like targets
  bool smoothed = true;
  BigScalar y0 = BigScalar("0.2"), y1 = BigScalar("0.8");
  std::string blend = "phi-step";
  json host;                        ///< custom: glued manifold document
  std::vector<std::string> actions;  ///< custom: action target per piece
};

struct FlatnessCase {
  std::string germ;
  std::vector<BigScalar> params;
  std::optional<double> expect_constant;
  double constant_tol = 0.05;
  std::optional<double> min_slope;
};

struct HomomorphismCase {
  int words = 50;
  int max_len = 8;
  int points = 100;
  BigScalar tol = BigScalar(1e-20);
};

struct VerifyConfig {
  int orders = 3;
  std::vector<BigScalar> seam_points{BigScalar("0.4")};
  std::vector<std::string> generators{"X", "Y"};
  verify::SeamCheckConfig fd;
  std::vector<FlatnessCase> flatness;
  std::optional<HomomorphismCase> homomorphism;
};

struct SvgStyle {
  int size = 640;
  std::string background = "#ffffff";
  std::string boundary = "#222222";
  std::string equator = "#999999";
  std::string seam = "#d7191c";
  std::string fixed = "#1a9641";
  std::vector<std::string> orbits{"#2b83ba", "#fdae61", "#7b3294", "#008837", "#e66101", "#5e3c99"};
};

struct OrbitSeed {
  size_t piece = 0;
  geometry::Point point;
};

struct DensityCase {
  BigScalar eps = BigScalar("0.05");
  int max_len = 200;
};

struct OrbitConfig {
  std::string word = "Y";  ///< iterated element, any word over X, Y and inverses
  int iterates = 2000;
  std::vector<OrbitSeed> seeds;
  int random_seeds = 0;  ///< extra seeds drawn from the scene with the run seed
  std::optional<DensityCase> density;
  SvgStyle style;
};

struct DistortionConfig {
  int n_max = 8;
  int radius = 6;
};

struct RunConfig {
  int precision_bits = numeric::kDefaultPrecisionBits;
  std::optional<int> threads;
  std::uint64_t seed = 1;
  std::string out_dir = "bglue_out";
  SceneConfig scene;
  VerifyConfig verify;
  OrbitConfig orbit;
  DistortionConfig distortion;

  /// Echo of the effective configuration (scalars as decimal strings).
  json to_json() const;
};

/// Precision requested by a config document (default when absent); scalars
/// must be parsed after this precision is in force.
int config_precision(const json& j);

/// Validates `j` against the run-config schema. Unknown keys, wrong types and
/// out-of-range values raise ConfigError naming the offending path.
RunConfig parse_config(const json& j);

/// Reads and parses a JSON file (ConfigError on I/O or syntax errors).
json load_json_file(const std::string& path);

/// The scene described by the config.
verify::Scene build_scene(const SceneConfig& c);

}  // namespace bglue::cli
