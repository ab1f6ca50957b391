#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bglue/cli/config.hpp"

namespace bglue::cli {

using Xy = std::pair<double, double>;

/// Minimal SVG writer in world coordinates (y up). Numbers are printed with a
/// fixed number of decimals so equal inputs give byte-identical files.
class SvgCanvas {
 public:
  SvgCanvas(int size, double xmin, double xmax, double ymin, double ymax, std::string background);

  void line(Xy a, Xy b, const std::string& stroke, double width, const std::string& dash = "");
  void circle(Xy c, double r_world, const std::string& stroke, double width, const std::string& dash = "");
  void rect(Xy lo, Xy hi, const std::string& stroke, double width);
  void polyline(const std::vector<Xy>& pts, const std::string& stroke, double width, double opacity);
  void dots(const std::vector<Xy>& pts, const std::string& fill, double r_px, double opacity);
  void marker(Xy c, const std::string& fill, double r_px);
  void text(Xy at, const std::string& s, int px, const std::string& fill);

  std::string str() const;

 private:
  Xy px(Xy w) const;
  int size_;
  double xmin_, xmax_, ymin_, ymax_, scale_;
  std::string background_;
  std::vector<std::string> body_;
};

/// Picture coordinates of a glued point. S^2-based pieces use the disk layout
/// (blown-up circle at radius 1, the annulus piece in 1 <= radius <= 2);
/// doubly periodic charts use the fundamental domain; other 2-d charts use
/// their ambient coordinates. nullopt when the point cannot be placed.
std::optional<Xy> portrait_xy(const verify::Scene& scene, const glue::GluedPoint& p);

/// Orbit portrait: boundary, seam, equator, fixed points and one colour per orbit.
std::string orbit_portrait(const verify::Scene& scene, const std::vector<std::vector<glue::GluedPoint>>& orbits,
                           const SvgStyle& style, const std::string& title);

}  // namespace bglue::cli
