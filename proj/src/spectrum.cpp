#include "shstab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "shstab/errors.hpp"

namespace shs {

std::vector<std::complex<double>> eigenvalues_dense(const Eigen::MatrixXd& M) {
  if (M.rows() == 0 || M.rows() != M.cols())
    throw InvalidParameter("eigenvalues_dense needs a non-empty square matrix");
  if (!M.allFinite()) throw InvalidParameter("matrix has non-finite entries");
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  if (es.info() != Eigen::Success)
    throw NumericalError("dense eigensolver failed to converge");
  const Eigen::VectorXcd ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

SpectrumReport count_unstable(const FourierPulse& pulse, double threshold) {
  SpectrumReport rep;
  rep.threshold = threshold;
  const Eigen::MatrixXd D =
      jacobian(full_coefficients(pulse), pulse.params, pulse.L_f);
  rep.eigenvalues = eigenvalues_dense(D);

  std::size_t zero = 0;
  for (std::size_t i = 1; i < rep.eigenvalues.size(); ++i)
    if (std::abs(rep.eigenvalues[i]) < std::abs(rep.eigenvalues[zero])) zero = i;
  rep.zero_mode = rep.eigenvalues[zero];

  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i)
    if (i != zero && rep.eigenvalues[i].real() > threshold)
      rep.unstable.push_back(rep.eigenvalues[i].real());
  std::sort(rep.unstable.begin(), rep.unstable.end(), std::greater<>());
  return rep;
}

}  // namespace shs
