#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bglue/geometry/chart.hpp"

namespace bglue::geometry {

/// A named self-map of a chart with parameters, optionally carrying its
/// Jacobian and the parameters of its inverse (an inverse is the same form
/// with transformed parameters).
struct ClosedForm {
  std::string name;
  int dim = 0;
  size_t n_params = 0;
  std::function<std::string(const Vec& params)> chart;
  std::function<Vec(const Vec& params, const Vec& x)> eval;
  std::function<Matrix(const Vec& params, const Vec& x)> jacobian;
  std::function<Vec(const Vec& params)> inverse_params;
};

void register_closed_form(ClosedForm form);
/// Throws DomainError for unknown names.
const ClosedForm& closed_form(const std::string& name);
std::vector<std::string> closed_form_names();

/// Unipotent matrix [[1, a, c], [0, 1, b], [0, 0, 1]].
Matrix heisenberg_matrix(const BigScalar& a, const BigScalar& b, const BigScalar& c);

}  // namespace bglue::geometry
