#pragma once

#include <string>
#include <vector>

#include "shstab/conjugate.hpp"

namespace shs {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyTolerances {
  double fixture = 1e-8;
  double eigenvalue = 5e-3;
  double location = 5e-2;
  double simplicity = 1e-3;
};

struct ReferencePulse {
  std::string label;
  Params params;
  double phi = 0.0;
  double scale = 1.0;
  std::vector<double> eigenvalues;        // descending
  std::vector<double> conjugate_points;   // ascending
};

std::vector<ReferencePulse> reference_pulses();

std::vector<CheckResult> fixture_checks(const VerifyTolerances& tol = {});
std::vector<CheckResult> reference_checks(const VerifyTolerances& tol = {},
                                          const StabilityOptions& opt = {});

}  // namespace shs
