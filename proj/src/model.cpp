#include "shstab/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shstab/errors.hpp"

namespace shs {

void validate(const Params& p) {
  if (!(p.mu > 0.0) || !std::isfinite(p.nu))
    throw InvalidParameter("mu must be positive and nu finite (mu = " +
                           std::to_string(p.mu) + ")");
}

double nonlinearity(double u, const Params& p) {
  return p.nu * u * u - u * u * u - p.mu * u;
}

double nonlinearity_deriv(double u, const Params& p) {
  return 2.0 * p.nu * u - 3.0 * u * u - p.mu;
}

double normal_form_gamma(double nu) { return 38.0 * nu * nu / 9.0 - 3.0; }

double normal_form(double x, double phi, const Params& p) {
  const double g = normal_form_gamma(p.nu);
  if (g <= 0.0)
    throw InvalidParameter("normal form requires 38 nu^2/9 - 3 > 0");
  const double s = std::sqrt(p.mu);
  return 2.0 * std::sqrt(2.0 * p.mu / g) / std::cosh(0.5 * s * x) *
         std::cos(x + phi);
}

Mat4 symplectic_J4() {
  Mat4 J = Mat4::Zero();
  J.topRightCorner<2, 2>().setIdentity();
  J.bottomLeftCorner<2, 2>() = -Eigen::Matrix2d::Identity();
  return J;
}

CoefficientMatrices coefficient_matrix(double fprime, double lambda) {
  CoefficientMatrices m;
  m.J = symplectic_J4();
  m.C.setZero();
  m.C(0, 0) = lambda + 1.0 - fprime;
  m.C(1, 1) = -1.0;
  m.C(2, 3) = 1.0;
  m.C(3, 2) = 1.0;
  m.C(3, 3) = -2.0;
  m.B.setZero();
  m.B(0, 3) = 1.0;
  m.B(1, 2) = 1.0;
  m.B(1, 3) = -2.0;
  m.B(2, 0) = -lambda - 1.0 + fprime;
  m.B(3, 1) = 1.0;
  return m;
}

Mat4 asymptotic_matrix(double lambda, const Params& p) {
  return coefficient_matrix(-p.mu, lambda).B;
}

AsymptoticData asymptotic_frames(double lambda, const Params& p) {
  validate(p);
  if (lambda < 0.0) throw InvalidParameter("asymptotic frames need lambda >= 0");
  AsymptoticData d;
  d.lambda = lambda;
  d.r = std::sqrt(1.0 + lambda + p.mu);
  d.theta = std::numbers::pi - std::atan(std::sqrt(lambda + p.mu));

  const double r = d.r, sr = std::sqrt(r);
  const double ct = std::cos(d.theta), st = std::sin(d.theta);
  const double ch = std::cos(0.5 * d.theta), sh = std::sin(0.5 * d.theta);

  d.Ru1 << ct / r, 1.0, (2.0 / sr + sr) * ch, ch / sr;
  d.Ru2 << -st / r, 0.0, (sr - 2.0 / sr) * sh, -sh / sr;
  d.Rs1 << ct / r, 1.0, -(2.0 / sr + sr) * ch, -ch / sr;
  d.Rs2 << -st / r, 0.0, (2.0 / sr - sr) * sh, sh / sr;
  return d;
}

double lambda_infinity_bound(const std::vector<double>& potential_samples,
                             double margin) {
  if (potential_samples.empty())
    throw InvalidParameter("lambda_infinity_bound needs at least one sample");
  return *std::max_element(potential_samples.begin(), potential_samples.end()) +
         margin;
}

}  // namespace shs
