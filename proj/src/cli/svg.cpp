#include "bglue/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "bglue/geometry/chart.hpp"

namespace bglue::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      default: o += c;
    }
  }
  return o;
}

enum class Layout { inner_disk, outer_ring, chart2d };

Layout layout_of(const geometry::ManifoldModel& m) {
  if (m.id == "heis_annulus") return Layout::outer_ring;
  if (geometry::chart(m.fallback_chart).dim == 2) return Layout::chart2d;
  return Layout::inner_disk;
}

/// Angle from (1, 0, 0) and the direction of (y, z).
std::optional<std::pair<double, double>> sphere_angles(const geometry::Point& p) {
  const double pi = std::acos(-1.0);
  if (p.chart == "polar+x" || p.chart == "polar-x") {
    double t = p.x[0].big().to_double();
    double r = std::min(1.0, p.x[1].big().to_double());
    double th = std::asin(r);
    return std::make_pair(p.chart == "polar+x" ? th : pi - th, t);
  }
  geometry::Vec q = geometry::ambient_of(p);
  if (q.size() != 3) return std::nullopt;
  double x = std::clamp(q[0].to_double(), -1.0, 1.0), y = q[1].to_double(), z = q[2].to_double();
  return std::make_pair(std::acos(x), (y == 0 && z == 0) ? 0.0 : std::atan2(z, y));
}

}  // namespace

SvgCanvas::SvgCanvas(int size, double xmin, double xmax, double ymin, double ymax, std::string background)
    : size_(size), xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax), background_(std::move(background)) {
  if (!(xmax > xmin) || !(ymax > ymin)) throw DomainError("empty SVG frame");
  scale_ = (size_ - 20) / std::max(xmax_ - xmin_, ymax_ - ymin_);
}

Xy SvgCanvas::px(Xy w) const {
  return {10 + (w.first - xmin_) * scale_, size_ - 10 - (w.second - ymin_) * scale_};
}

void SvgCanvas::line(Xy a, Xy b, const std::string& stroke, double width, const std::string& dash) {
  Xy p = px(a), q = px(b);
  body_.push_back("<line x1=\"" + num(p.first) + "\" y1=\"" + num(p.second) + "\" x2=\"" + num(q.first) + "\" y2=\"" +
                  num(q.second) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"" +
                  (dash.empty() ? "" : " stroke-dasharray=\"" + dash + "\"") + "/>");
}

void SvgCanvas::circle(Xy c, double r_world, const std::string& stroke, double width, const std::string& dash) {
  Xy p = px(c);
  body_.push_back("<circle cx=\"" + num(p.first) + "\" cy=\"" + num(p.second) + "\" r=\"" + num(r_world * scale_) +
                  "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"" +
                  (dash.empty() ? "" : " stroke-dasharray=\"" + dash + "\"") + "/>");
}

void SvgCanvas::rect(Xy lo, Xy hi, const std::string& stroke, double width) {
  Xy a = px({lo.first, hi.second}), b = px({hi.first, lo.second});
  body_.push_back("<rect x=\"" + num(a.first) + "\" y=\"" + num(a.second) + "\" width=\"" + num(b.first - a.first) +
                  "\" height=\"" + num(b.second - a.second) + "\" fill=\"none\" stroke=\"" + stroke +
                  "\" stroke-width=\"" + num(width) + "\"/>");
}

void SvgCanvas::polyline(const std::vector<Xy>& pts, const std::string& stroke, double width, double opacity) {
  if (pts.size() < 2) return;
  std::string d;
  for (const auto& w : pts) {
    Xy p = px(w);
    d += (d.empty() ? "" : " ") + num(p.first) + "," + num(p.second);
  }
  body_.push_back("<polyline points=\"" + d + "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
                  num(width) + "\" stroke-opacity=\"" + num(opacity) + "\"/>");
}

void SvgCanvas::dots(const std::vector<Xy>& pts, const std::string& fill, double r_px, double opacity) {
  std::string g = "<g fill=\"" + fill + "\" fill-opacity=\"" + num(opacity) + "\">";
  for (const auto& w : pts) {
    Xy p = px(w);
    g += "<circle cx=\"" + num(p.first) + "\" cy=\"" + num(p.second) + "\" r=\"" + num(r_px) + "\"/>";
  }
  body_.push_back(g + "</g>");
}

void SvgCanvas::marker(Xy c, const std::string& fill, double r_px) {
  Xy p = px(c);
  body_.push_back("<circle cx=\"" + num(p.first) + "\" cy=\"" + num(p.second) + "\" r=\"" + num(r_px) + "\" fill=\"" +
                  fill + "\" stroke=\"#000000\" stroke-width=\"0.75\"/>");
}

void SvgCanvas::text(Xy at, const std::string& s, int size_px, const std::string& fill) {
  Xy p = px(at);
  body_.push_back("<text x=\"" + num(p.first) + "\" y=\"" + num(p.second) + "\" font-family=\"sans-serif\" font-size=\"" +
                  std::to_string(size_px) + "\" fill=\"" + fill + "\">" + escape(s) + "</text>");
}

std::string SvgCanvas::str() const {
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size_ << "\" height=\"" << size_ << "\" viewBox=\"0 0 "
    << size_ << " " << size_ << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"" << background_ << "\"/>\n";
  for (const auto& b : body_) o << b << "\n";
  o << "</svg>\n";
  return o.str();
}

std::optional<Xy> portrait_xy(const verify::Scene& scene, const glue::GluedPoint& p) {
  const geometry::ManifoldModel& m = scene.host.piece(p.piece);
  const double pi = std::acos(-1.0);
  switch (layout_of(m)) {
    case Layout::inner_disk:
    case Layout::outer_ring: {
      auto a = sphere_angles(p.point);
      if (!a) return std::nullopt;
      double rho = layout_of(m) == Layout::inner_disk ? 1 - a->first / pi : 1 + a->first / pi;
      return Xy{rho * std::cos(a->second), rho * std::sin(a->second)};
    }
    case Layout::chart2d: {
      auto q = geometry::try_to_chart(p.point, m.fallback_chart);
      if (!q) return std::nullopt;
      const geometry::Chart& c = geometry::chart(m.fallback_chart);
      double v[2];
      for (size_t i = 0; i < 2; ++i) {
        BigScalar x = q->x[i].big();
        if (c.is_periodic(i)) x = numeric::wrap(x, c.periods[i]);
        v[i] = x.to_double();
      }
      return Xy{v[0], v[1]};
    }
  }
  return std::nullopt;
}

std::string orbit_portrait(const verify::Scene& scene, const std::vector<std::vector<glue::GluedPoint>>& orbits,
                           const SvgStyle& style, const std::string& title) {
  bool sphere_layout = false, ring = false, periodic = false;
  Xy period{0, 0};
  for (const auto& m : scene.host.pieces()) {
    Layout l = layout_of(m);
    sphere_layout = sphere_layout || l != Layout::chart2d;
    ring = ring || l == Layout::outer_ring;
    if (l == Layout::chart2d) {
      const geometry::Chart& c = geometry::chart(m.fallback_chart);
      if (c.is_periodic(0) && c.is_periodic(1)) {
        periodic = true;
        period = {c.periods[0].to_double(), c.periods[1].to_double()};
      }
    }
  }

  std::vector<std::vector<Xy>> placed;
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x, lo_y = lo_x, hi_y = -lo_x;
  for (const auto& o : orbits) {
    std::vector<Xy> pts;
    // Keep files small: at most 1500 points per orbit, evenly strided.
    const size_t stride = std::max<size_t>(1, o.size() / 1500);
    for (size_t i = 0; i < o.size(); i += stride)
      if (auto w = portrait_xy(scene, o[i])) {
        pts.push_back(*w);
        lo_x = std::min(lo_x, w->first), hi_x = std::max(hi_x, w->first);
        lo_y = std::min(lo_y, w->second), hi_y = std::max(hi_y, w->second);
      }
    placed.push_back(std::move(pts));
  }

  double R = ring ? 2.0 : 1.0;
  Xy flo{-R - 0.08, -R - 0.08}, fhi{R + 0.08, R + 0.16};
  if (!sphere_layout) {
    if (periodic) {
      flo = {-0.04 * period.first, -0.04 * period.second};
      fhi = {1.04 * period.first, 1.1 * period.second};
    } else if (lo_x <= hi_x) {
      double pad = 0.05 * std::max({hi_x - lo_x, hi_y - lo_y, 1e-6});
      flo = {lo_x - pad, lo_y - pad};
      fhi = {hi_x + pad, hi_y + 3 * pad};
    } else {
      flo = {-1, -1};
      fhi = {1, 1};
    }
  }
  SvgCanvas svg(style.size, flo.first, fhi.first, flo.second, fhi.second, style.background);

  if (sphere_layout) {
    // A circle is a seam when some seam uses it; otherwise it is free boundary.
    auto circle_colour = [&](size_t piece, const std::string& comp) {
      return scene.host.seam_of(piece, comp) ? style.seam : style.boundary;
    };
    for (size_t i = 0; i < scene.host.pieces().size(); ++i) {
      const auto& m = scene.host.piece(i);
      if (m.id == "heis_disk") svg.circle({0, 0}, 1, circle_colour(i, "e+"), 2);
      if (m.id == "heis_annulus") {
        svg.circle({0, 0}, 1, circle_colour(i, "e+"), 2);
        svg.circle({0, 0}, 2, circle_colour(i, "e-"), 2);
      }
      if (m.id == "sphere") svg.circle({0, 0}, 1, style.boundary, 1, "4 3");
    }
    svg.line({-R, 0}, {R, 0}, style.equator, 1, "6 4");
  } else if (periodic) {
    svg.rect({0, 0}, period, style.boundary, 1.5);
  }

  for (size_t i = 0; i < placed.size(); ++i) {
    const std::string& col = style.orbits[i % style.orbits.size()];
    // Iterates of a periodic chart jump across the frame; joining them would streak.
    if (!periodic) svg.polyline(placed[i], col, 0.5, 0.35);
    svg.dots(placed[i], col, 1.4, 0.8);
    if (!placed[i].empty()) svg.marker(placed[i].front(), col, 3.5);
  }

  if (sphere_layout) {
    for (size_t i = 0; i < scene.host.pieces().size(); ++i) {
      const auto& id = scene.host.piece(i).id;
      std::vector<std::vector<double>> fixed{{0, 1, 0}, {0, -1, 0}};
      if (id != "heis_annulus") fixed.push_back({-1, 0, 0});
      for (const auto& f : fixed) {
        geometry::Point p = geometry::make_point("S2", {BigScalar(f[0]), BigScalar(f[1]), BigScalar(f[2])});
        if (auto w = portrait_xy(scene, {i, p})) svg.marker(*w, style.fixed, 4.5);
      }
    }
  }
  svg.text({flo.first + 0.02 * (fhi.first - flo.first), fhi.second - 0.045 * (fhi.second - flo.second)}, title, 13,
           "#000000");
  return svg.str();
}

}  // namespace bglue::cli
