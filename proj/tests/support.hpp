#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "shstab/conjugate.hpp"
#include "shstab/lagrangian.hpp"
#include "shstab/pulse.hpp"

namespace testing {

struct Reference {
  const char* label;
  shs::Params params;
  double phi;
  double scale;
};

inline const Reference kPulses[3] = {
    {"phi0 mu0.05", {1.6, 0.05}, 0.0, 1.0},
    {"phipi mu0.05", {1.6, 0.05}, std::numbers::pi, 1.0},
    {"phi0 mu0.20", {1.6, 0.20}, 0.0, 3.0},
};

// Solved once per test binary.
inline const shs::FourierPulse& pulse(int i) {
  static std::vector<shs::FourierPulse> cache = [] {
    std::vector<shs::FourierPulse> v;
    for (const auto& r : kPulses) v.push_back(shs::solve_pulse(r.params, r.phi, r.scale));
    return v;
  }();
  return cache.at(i);
}

// Direct sums over all index pairs / triples, restricted to |k_i| <= N.
inline std::vector<double> brute_conv2(const std::vector<double>& a) {
  const int N = static_cast<int>(a.size() / 2);
  std::vector<double> out(a.size(), 0.0);
  for (int i = -N; i <= N; ++i)
    for (int j = -N; j <= N; ++j)
      if (std::abs(i + j) <= N) out[i + j + N] += a[i + N] * a[j + N];
  return out;
}

inline std::vector<double> brute_conv3(const std::vector<double>& a) {
  const int N = static_cast<int>(a.size() / 2);
  std::vector<double> out(a.size(), 0.0);
  for (int i = -N; i <= N; ++i)
    for (int j = -N; j <= N; ++j)
      for (int l = -N; l <= N; ++l)
        if (std::abs(i + j + l) <= N) out[i + j + l + N] += a[i + N] * a[j + N] * a[l + N];
  return out;
}

inline std::vector<double> random_coefficients(std::mt19937& rng, int N, double scale = 0.3) {
  std::uniform_real_distribution<double> U(-scale, scale);
  std::vector<double> a(2 * N + 1);
  for (double& v : a) v = U(rng);
  return a;
}

inline Eigen::MatrixXd random_symmetric(std::mt19937& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> G(0.0, scale);
  Eigen::MatrixXd S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) S(i, j) = S(j, i) = G(rng);
  return S;
}

// Product of shears and a block-diagonal scaling; each factor is symplectic.
inline Eigen::MatrixXd random_symplectic(std::mt19937& rng, int n) {
  std::normal_distribution<double> G(0.0, 0.5);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd up = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  up.topRightCorner(n, n) = random_symmetric(rng, n, 0.5);
  Eigen::MatrixXd lo = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  lo.bottomLeftCorner(n, n) = random_symmetric(rng, n, 0.5);
  Eigen::MatrixXd Gm(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Gm(i, j) = (i == j ? 1.0 : 0.0) + G(rng) * 0.3;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  D.topLeftCorner(n, n) = Gm;
  D.bottomRightCorner(n, n) = Gm.inverse().transpose();
  return up * D * lo;
}

// sin of the largest principal angle between two column spans.
inline double subspace_angle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::MatrixXd Qa = Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ() *
                             Eigen::MatrixXd::Identity(A.rows(), A.cols());
  const Eigen::MatrixXd Qb = Eigen::HouseholderQR<Eigen::MatrixXd>(B).householderQ() *
                             Eigen::MatrixXd::Identity(B.rows(), B.cols());
  const Eigen::MatrixXd R = Qb - Qa * (Qa.transpose() * Qb);
  return Eigen::JacobiSVD<Eigen::MatrixXd>(R).singularValues()[0];
}

inline shs::FourierPulse zero_pulse(const shs::Params& p, int N = 16, double L_f = 100.0) {
  shs::FourierPulse z;
  z.params = p;
  z.L_f = L_f;
  z.N = N;
  z.a.assign(N + 1, 0.0);
  return z;
}

}  // namespace testing
