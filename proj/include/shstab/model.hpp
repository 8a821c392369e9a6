#pragma once

#include <vector>

#include <Eigen/Dense>

namespace shs {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

// Swift-Hohenberg parameters for f(u) = nu u^2 - u^3 - mu u.
struct Params {
  double nu = 1.6;
  double mu = 0.05;
};

void validate(const Params& p);

double nonlinearity(double u, const Params& p);
double nonlinearity_deriv(double u, const Params& p);

// Coefficient of the cubic term in the amplitude equation; must be positive
// for the normal-form pulse to exist.
double normal_form_gamma(double nu);
double normal_form(double x, double phi, const Params& p);

struct CoefficientMatrices {
  Mat4 B;
  Mat4 J;
  Mat4 C;
};

Mat4 symplectic_J4();

// fprime is the potential f'(phi(x)) at the point of evaluation.
CoefficientMatrices coefficient_matrix(double fprime, double lambda);
Mat4 asymptotic_matrix(double lambda, const Params& p);

struct AsymptoticData {
  double lambda = 0.0;
  double r = 0.0;
  double theta = 0.0;
  Vec4 Ru1, Ru2, Rs1, Rs2;
};

AsymptoticData asymptotic_frames(double lambda, const Params& p);

double lambda_infinity_bound(const std::vector<double>& potential_samples,
                             double margin = 1.0);

}  // namespace shs
