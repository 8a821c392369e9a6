#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shstab/model.hpp"

namespace shs {

// Even pulse on [-L_f, L_f] stored as half coefficients a_0..a_N with
// a_{-k} = a_k.  Full vectors used by the residual and Jacobian have length
// 2N+1 with index k+N holding a_k.
struct FourierPulse {
  Params params;
  double phi = 0.0;
  double L_f = 100.0;
  int N = 256;
  std::vector<double> a;
  double residual_norm = 0.0;
  int iterations = 0;
};

struct PulseDefaults {
  static constexpr double L_f = 100.0;
  static constexpr int N = 256;
  static constexpr double tol = 1e-12;
  static constexpr int max_iter = 50;
};

std::vector<double> full_coefficients(const FourierPulse& pulse);
std::vector<double> half_coefficients(const std::vector<double>& full);

std::vector<double> convolve2(const std::vector<double>& a);
std::vector<double> convolve3(const std::vector<double>& a);

double linear_symbol(int k, const Params& p, double L_f);
std::vector<double> residual(const std::vector<double>& a, const Params& p,
                             double L_f);
Eigen::MatrixXd jacobian(const std::vector<double>& a, const Params& p,
                         double L_f);

FourierPulse seed_from_normal_form(const Params& p, double phi, double L_f,
                                   int N, double scale);

// history, when given, receives the residual sup-norm before each iteration
// and after the last one.
FourierPulse newton_solve(const FourierPulse& seed,
                          double tol = PulseDefaults::tol,
                          int max_iter = PulseDefaults::max_iter,
                          std::vector<double>* history = nullptr);

// Seed from the scaled normal form and refine with Newton.
FourierPulse solve_pulse(const Params& p, double phi, double scale = 1.0,
                         double L_f = PulseDefaults::L_f,
                         int N = PulseDefaults::N,
                         double tol = PulseDefaults::tol,
                         int max_iter = PulseDefaults::max_iter);

double evaluate(const FourierPulse& pulse, double x);
double evaluate_derivative(const FourierPulse& pulse, double x, int order);
double potential(const FourierPulse& pulse, double x);

// |a_N| relative to max |a_k|.
double tail_decay(const FourierPulse& pulse);

void save(const FourierPulse& pulse, const std::string& path);
FourierPulse load(const std::string& path);
std::string to_json(const FourierPulse& pulse);
FourierPulse from_json(const std::string& text);

}  // namespace shs
