#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shstab/shooting.hpp"
#include "shstab/spectrum.hpp"

namespace shs {

struct ConjugateOptions {
  double refine_tol = 1e-8;
  double dip_tol = 1e-6;
  double degeneracy_tol = 1e-6;  // on Q1 relative to |p|^2
  double case3_tol = 1e-6;       // on the larger singular value of A(x*)
  double simplicity_threshold = 1e-3;
  // Crossings where the frame has drifted this far from the translation
  // direction are not trusted.
  double translation_tol = 1e-2;
};

struct ScanResult {
  std::vector<double> crossings;       // detA sign changes, refined
  std::vector<double> suspected_even;  // touching minima of |detA|
  std::vector<double> widths;          // final bracket width per crossing
};

ScanResult scan_and_refine(const ShootingPath& path,
                           const ConjugateOptions& opt = {});

enum class CrossingCase { I, II, III };
const char* to_string(CrossingCase c);

struct ConjugatePointRecord {
  double x_star = 0.0;
  Vec4 p = Vec4::Zero();
  CrossingCase kind = CrossingCase::I;
  double Q1 = 0.0;
  std::optional<double> Q3;
  double simplicity_norm = 0.0;  // 2-norm of rows (1,4) at x*
  double refined_tol = 0.0;
  double translation_residual = 0.0;
};

ConjugatePointRecord classify_frame(double x_star, const Frame& F,
                                    const ConjugateOptions& opt = {});
ConjugatePointRecord classify(double x_star, const ShootingPath& path,
                              const ConjugateOptions& opt = {});

// (phi', phi''', phi'''' + 2 phi'', phi'') lies in the unstable plane at
// lambda = 0.  Returns its relative distance from the frame at x.
double translation_residual(const Frame& F, const FourierPulse& pulse, double x);

// Smallest |detA| of the asymptotic unstable frame over the grid.
double asymptotic_crossing_margin(const Params& p,
                                  const std::vector<double>& lambda_grid);
bool check_no_asymptotic_crossings(const Params& p,
                                   const std::vector<double>& lambda_grid,
                                   double tol = 1e-6);

struct StabilityOptions {
  double unstable_threshold = 1e-4;
  ShootParams shoot;
  ConjugateOptions conj;
  int lambda_grid_points = 101;
};

struct StabilityReport {
  std::string pulse_id;
  std::vector<double> unstable;
  std::complex<double> zero_mode;
  std::vector<ConjugatePointRecord> conjugate_points;
  std::vector<double> suspected_even;
  std::vector<double> discarded;  // sign changes where the frame is unreliable
  bool counts_match = false;
  bool hypothesis_degeneracy_ok = true;
  bool simplicity_ok = true;
  bool asymptotic_ok = false;
  double lambda_infinity = 0.0;
  double tail_potential = 0.0;
  double max_omega_drift = 0.0;
  double coefficient_tail = 0.0;
  std::vector<std::string> warnings;
};

std::string pulse_id(const FourierPulse& pulse);

StabilityReport stability_report(const FourierPulse& pulse,
                                 const StabilityOptions& opt = {});

std::string format_report(const StabilityReport& r);

}  // namespace shs
