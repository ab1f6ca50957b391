#include "bglue/geometry/closed_forms.hpp"

#include <map>
#include <mutex>

#include "bglue/errors.hpp"

namespace bglue::geometry {

namespace {

BigScalar one() { return BigScalar(1); }

// Heisenberg element inverse: (a, b, c)^-1 = (-a, -b, ab - c).
Vec heis_inverse(const Vec& p, size_t off) {
  Vec out = p;
  out[off] = -p[off];
  out[off + 1] = -p[off + 1];
  out[off + 2] = p[off] * p[off + 1] - p[off + 2];
  return out;
}

ClosedForm sphere_projective() {
  ClosedForm f;
  f.name = "sphere_projective";
  f.dim = 3;
  f.n_params = 3;
  f.chart = [](const Vec&) { return std::string("S2"); };
  f.eval = [](const Vec& p, const Vec& x) {
    Vec ax = matvec(heisenberg_matrix(p[0], p[1], p[2]), x);
    BigScalar n = norm2(ax);
    return Vec{ax[0] / n, ax[1] / n, ax[2] / n};
  };
  // d(Ax/|Ax|) = (I - q q^T) A / |Ax| with q = Ax/|Ax|.
  f.jacobian = [](const Vec& p, const Vec& x) {
    Matrix a = heisenberg_matrix(p[0], p[1], p[2]);
    Vec ax = matvec(a, x);
    BigScalar n = norm2(ax);
    Vec q{ax[0] / n, ax[1] / n, ax[2] / n};
    Matrix proj = identity_matrix(3);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) proj[i][k] = (proj[i][k] - q[i] * q[k]) / n;
    return matmul(proj, a);
  };
  f.inverse_params = [](const Vec& p) { return heis_inverse(p, 0); };
  return f;
}

ClosedForm heis_plane() {
  ClosedForm f;
  f.name = "heis_plane";
  f.dim = 2;
  f.n_params = 3;
  f.chart = [](const Vec&) { return std::string("R2"); };
  f.eval = [](const Vec& p, const Vec& x) { return Vec{x[0] + p[0] * x[1] + p[2], x[1] + p[1]}; };
  f.jacobian = [](const Vec& p, const Vec&) { return Matrix{{one(), p[0]}, {BigScalar(0), one()}}; };
  f.inverse_params = [](const Vec& p) { return heis_inverse(p, 0); };
  return f;
}

ClosedForm heis_torus() {
  ClosedForm f;
  f.name = "heis_torus";
  f.dim = 2;
  f.n_params = 4;
  f.chart = [](const Vec& p) { return torus_chart(p[0]).id; };
  f.eval = [](const Vec& p, const Vec& x) {
    return Vec{numeric::wrap(x[0] + p[1] * x[1] + p[3], p[0]), numeric::wrap(x[1] + p[2], p[0])};
  };
  f.jacobian = [](const Vec& p, const Vec&) { return Matrix{{one(), p[1]}, {BigScalar(0), one()}}; };
  f.inverse_params = [](const Vec& p) { return heis_inverse(p, 1); };
  return f;
}

ClosedForm heis_cylinder() {
  ClosedForm f;
  f.name = "heis_cylinder";
  f.dim = 2;
  f.n_params = 4;
  f.chart = [](const Vec& p) { return cylinder_chart(p[0]).id; };
  f.eval = [](const Vec& p, const Vec& x) {
    return Vec{numeric::wrap(x[0] + p[1] * x[1] + p[3], p[0]), x[1] + p[2]};
  };
  f.jacobian = [](const Vec& p, const Vec&) { return Matrix{{one(), p[1]}, {BigScalar(0), one()}}; };
  f.inverse_params = [](const Vec& p) { return heis_inverse(p, 1); };
  return f;
}

// Cylinder action pushed to the two-point compactification; continuous only.
ClosedForm heis_calegari() {
  ClosedForm f;
  f.name = "heis_calegari";
  f.dim = 2;
  f.n_params = 4;
  f.chart = [](const Vec& p) { return calegari_chart(p[0]).id; };
  f.eval = [](const Vec& p, const Vec& x) {
    BigScalar half = BigScalar::pi() / BigScalar(2);
    if (!(abs(x[1]) < half)) return x;
    BigScalar y = sin(x[1]) / cos(x[1]);
    return Vec{numeric::wrap(x[0] + p[1] * y + p[3], p[0]), atan(y + p[2])};
  };
  f.inverse_params = [](const Vec& p) { return heis_inverse(p, 1); };
  return f;
}

ClosedForm disk_rotation() {
  ClosedForm f;
  f.name = "disk_rotation";
  f.dim = 2;
  f.n_params = 1;
  f.chart = [](const Vec&) { return std::string("disk"); };
  f.eval = [](const Vec& p, const Vec& x) {
    BigScalar c = cos(p[0]), s = sin(p[0]);
    return Vec{c * x[0] - s * x[1], s * x[0] + c * x[1]};
  };
  f.jacobian = [](const Vec& p, const Vec&) {
    BigScalar c = cos(p[0]), s = sin(p[0]);
    return Matrix{{c, -s}, {s, c}};
  };
  f.inverse_params = [](const Vec& p) { return Vec{-p[0]}; };
  return f;
}

// z -> (z + c) / (1 + c z) for real |c| < 1; fixes +-1.
ClosedForm disk_moebius() {
  ClosedForm f;
  f.name = "disk_moebius";
  f.dim = 2;
  f.n_params = 1;
  f.chart = [](const Vec&) { return std::string("disk"); };
  f.eval = [](const Vec& p, const Vec& x) {
    const BigScalar& c = p[0];
    BigScalar nr = x[0] + c, ni = x[1];
    BigScalar dr = one() + c * x[0], di = c * x[1];
    BigScalar d2 = dr * dr + di * di;
    return Vec{(nr * dr + ni * di) / d2, (ni * dr - nr * di) / d2};
  };
  f.jacobian = [](const Vec& p, const Vec& x) {
    // f'(z) = (1 - c^2) / (1 + c z)^2
    const BigScalar& c = p[0];
    BigScalar dr = one() + c * x[0], di = c * x[1];
    BigScalar sr = dr * dr - di * di, si = BigScalar(2) * dr * di;
    BigScalar m2 = sr * sr + si * si;
    BigScalar k = one() - c * c;
    BigScalar re = k * sr / m2, im = -(k * si) / m2;
    return Matrix{{re, -im}, {im, re}};
  };
  f.inverse_params = [](const Vec& p) { return Vec{-p[0]}; };
  return f;
}

ClosedForm germ_linear() {
  ClosedForm f;
  f.name = "germ_linear";
  f.dim = 2;
  f.n_params = 1;
  f.chart = [](const Vec&) { return std::string("R2"); };
  f.eval = [](const Vec& p, const Vec& x) { return Vec{x[0], p[0] * x[1]}; };
  f.jacobian = [](const Vec& p, const Vec&) { return Matrix{{one(), BigScalar(0)}, {BigScalar(0), p[0]}}; };
  f.inverse_params = [](const Vec& p) { return Vec{one() / p[0]}; };
  return f;
}

// (x, y) -> (x + y, y (1 + x^2))
ClosedForm germ_shear() {
  ClosedForm f;
  f.name = "germ_shear";
  f.dim = 2;
  f.n_params = 0;
  f.chart = [](const Vec&) { return std::string("R2"); };
  f.eval = [](const Vec&, const Vec& x) { return Vec{x[0] + x[1], x[1] * (one() + x[0] * x[0])}; };
  f.jacobian = [](const Vec&, const Vec& x) {
    return Matrix{{one(), one()}, {BigScalar(2) * x[0] * x[1], one() + x[0] * x[0]}};
  };
  return f;
}

// (x, y) -> (x + p0 y + p1 x y, y a exp(p2 sin(p3 x + p4) + p5 y / (1 + y)));
// params [a, p0, ..., p5].
ClosedForm germ_random() {
  ClosedForm f;
  f.name = "germ_random";
  f.dim = 2;
  f.n_params = 7;
  f.chart = [](const Vec&) { return std::string("R2"); };
  f.eval = [](const Vec& p, const Vec& x) {
    BigScalar e = p[3] * sin(p[4] * x[0] + p[5]) + p[6] * x[1] / (one() + x[1]);
    return Vec{x[0] + p[1] * x[1] + p[2] * x[0] * x[1], x[1] * p[0] * exp(e)};
  };
  return f;
}

struct Registry {
  std::mutex mu;
  std::map<std::string, ClosedForm> forms;

  Registry() {
    for (auto f : {sphere_projective(), heis_plane(), heis_torus(), heis_cylinder(), heis_calegari(),
                   disk_rotation(), disk_moebius(), germ_linear(), germ_shear(), germ_random()})
      forms.emplace(f.name, f);
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

Matrix heisenberg_matrix(const BigScalar& a, const BigScalar& b, const BigScalar& c) {
  return Matrix{{one(), a, c}, {BigScalar(0), one(), b}, {BigScalar(0), BigScalar(0), one()}};
}

void register_closed_form(ClosedForm form) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  r.forms[form.name] = std::move(form);
}

const ClosedForm& closed_form(const std::string& name) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  auto it = r.forms.find(name);
  if (it == r.forms.end()) throw DomainError("unknown closed form '" + name + "'");
  return it->second;
}

std::vector<std::string> closed_form_names() {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  std::vector<std::string> out;
  for (const auto& [k, _] : r.forms) out.push_back(k);
  return out;
}

}  // namespace bglue::geometry
