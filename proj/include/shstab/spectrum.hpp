#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "shstab/pulse.hpp"

namespace shs {

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;
  std::vector<double> unstable;  // real parts, descending
  std::complex<double> zero_mode;
  double threshold = 1e-4;
};

std::vector<std::complex<double>> eigenvalues_dense(const Eigen::MatrixXd& M);

// Eigenvalues of the full (2N+1)-dimensional Jacobian with real part above
// threshold, leaving out the translation eigenvalue nearest zero.
SpectrumReport count_unstable(const FourierPulse& pulse, double threshold = 1e-4);

}  // namespace shs
