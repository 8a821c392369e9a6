#pragma once

#include <iosfwd>
#include <vector>

#include "shstab/lagrangian.hpp"
#include "shstab/model.hpp"
#include "shstab/pulse.hpp"

namespace shs {

struct ShootParams {
  double lambda = 0.0;
  double L_minus = 60.0;  // integration starts at x = -L_minus
  double L_plus = 60.0;
  double renorm_every = 1.0;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double sample_dx = 0.05;
};

void validate(const ShootParams& sp);

struct PathSample {
  double x = 0.0;
  Frame frame;  // orthonormal, orientation continuous along the path
  double detA = 0.0;
  Plucker plucker;
  double omega_drift = 0.0;
};

struct ShootingPath {
  FourierPulse pulse;
  ShootParams params;
  std::vector<PathSample> samples;
  double tail_potential = 0.0;  // |f'(phi(-L_minus)) + mu|
  double max_omega_drift = 0.0;
  int steps = 0;
  int rejected = 0;

  // Re-integrates from the nearest stored sample at or left of x.
  Frame frame_at(double x) const;
  LagrangianPath as_lagrangian_path() const;
};

Frame init_frame(double lambda, const Params& p);

double detA(const Frame& F);

// Adaptive Dormand-Prince 5(4) for M' = B(x, lambda) M without
// renormalization; returns the orthonormalized end frame.
Frame propagate(const FourierPulse& pulse, double lambda, const Frame& start,
                double x0, double x1, double abs_tol = 1e-10,
                double rel_tol = 1e-10);

ShootingPath integrate_frame(const FourierPulse& pulse, const ShootParams& sp);

void write_trajectory_csv(std::ostream& out, const ShootingPath& path);

}  // namespace shs
