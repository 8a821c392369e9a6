#include "shstab/conjugate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace shs {

namespace {

double detA_at(const ShootingPath& path, double x) {
  return detA(path.frame_at(x));
}

}  // namespace

ScanResult scan_and_refine(const ShootingPath& path, const ConjugateOptions& opt) {
  ScanResult out;
  const auto& s = path.samples;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if ((s[i].detA > 0.0) == (s[i + 1].detA > 0.0)) continue;
    double lo = s[i].x, hi = s[i + 1].x;
    const bool lo_pos = s[i].detA > 0.0;
    while (hi - lo > opt.refine_tol) {
      const double mid = 0.5 * (lo + hi);
      if ((detA_at(path, mid) > 0.0) == lo_pos) lo = mid; else hi = mid;
    }
    out.crossings.push_back(0.5 * (lo + hi));
    out.widths.push_back(hi - lo);
  }

  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double m = std::abs(s[i].detA);
    if (!(m < std::abs(s[i - 1].detA) && m < std::abs(s[i + 1].detA))) continue;
    if ((s[i - 1].detA > 0.0) != (s[i + 1].detA > 0.0)) continue;
    if (m > 100.0 * opt.dip_tol) continue;
    double lo = s[i - 1].x, hi = s[i + 1].x;
    while (hi - lo > opt.refine_tol) {
      const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
      if (std::abs(detA_at(path, x1)) < std::abs(detA_at(path, x2))) hi = x2;
      else lo = x1;
    }
    const double xm = 0.5 * (lo + hi);
    if (std::abs(detA_at(path, xm)) < opt.dip_tol) out.suspected_even.push_back(xm);
  }
  return out;
}

const char* to_string(CrossingCase c) {
  switch (c) {
    case CrossingCase::I: return "I";
    case CrossingCase::II: return "II";
    case CrossingCase::III: return "III";
  }
  return "?";
}

ConjugatePointRecord classify_frame(double x_star, const Frame& F,
                                    const ConjugateOptions& opt) {
  const Frame Q = orthonormalize(F);
  Eigen::Matrix2d A;
  A << Q.M(0, 0), Q.M(0, 1), Q.M(3, 0), Q.M(3, 1);
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(A, Eigen::ComputeFullV);

  ConjugatePointRecord r;
  r.x_star = x_star;
  r.simplicity_norm = svd.singularValues()[0];
  const Eigen::Vector2d u = svd.matrixV().col(1);
  r.p = Q.M * u;
  r.p.normalize();
  r.Q1 = r.p[1] * r.p[1];
  if (r.simplicity_norm < opt.case3_tol) {
    r.kind = CrossingCase::III;
  } else if (r.Q1 > opt.degeneracy_tol * r.p.squaredNorm()) {
    r.kind = CrossingCase::I;
  } else {
    r.kind = CrossingCase::II;
    r.Q3 = 2.0 * r.p[2] * r.p[2];
  }
  return r;
}

ConjugatePointRecord classify(double x_star, const ShootingPath& path,
                              const ConjugateOptions& opt) {
  const Frame F = path.frame_at(x_star);
  ConjugatePointRecord r = classify_frame(x_star, F, opt);
  if (path.params.lambda == 0.0)
    r.translation_residual = translation_residual(F, path.pulse, x_star);
  return r;
}

double translation_residual(const Frame& F, const FourierPulse& pulse, double x) {
  const double d1 = evaluate_derivative(pulse, x, 1), d2 = evaluate_derivative(pulse, x, 2);
  const double d3 = evaluate_derivative(pulse, x, 3), d4 = evaluate_derivative(pulse, x, 4);
  Vec4 v(d1, d3, d4 + 2.0 * d2, d2);
  const double n = v.norm();
  if (n == 0.0) return 0.0;
  v /= n;
  const Eigen::MatrixXd Q = orthonormalize(F).M;
  return (v - Q * (Q.transpose() * v)).norm();
}

double asymptotic_crossing_margin(const Params& p,
                                  const std::vector<double>& lambda_grid) {
  double m = std::numeric_limits<double>::infinity();
  for (double lam : lambda_grid) m = std::min(m, std::abs(detA(init_frame(lam, p))));
  return m;
}

bool check_no_asymptotic_crossings(const Params& p,
                                   const std::vector<double>& lambda_grid,
                                   double tol) {
  return asymptotic_crossing_margin(p, lambda_grid) > tol;
}

std::string pulse_id(const FourierPulse& pulse) {
  const bool pi = std::abs(pulse.phi - std::numbers::pi) < 1e-12;
  char buf[96];
  std::snprintf(buf, sizeof buf, "phi=%s nu=%.4g mu=%.4g",
                pi ? "pi" : (pulse.phi == 0.0 ? "0" : std::to_string(pulse.phi).c_str()),
                pulse.params.nu, pulse.params.mu);
  return buf;
}

StabilityReport stability_report(const FourierPulse& pulse,
                                 const StabilityOptions& opt) {
  StabilityReport r;
  r.pulse_id = pulse_id(pulse);
  r.coefficient_tail = tail_decay(pulse);

  const SpectrumReport spec = count_unstable(pulse, opt.unstable_threshold);
  r.unstable = spec.unstable;
  r.zero_mode = spec.zero_mode;

  ShootParams sp = opt.shoot;
  sp.lambda = 0.0;
  const ShootingPath path = integrate_frame(pulse, sp);
  r.tail_potential = path.tail_potential;
  r.max_omega_drift = path.max_omega_drift;

  const ScanResult scan = scan_and_refine(path, opt.conj);
  for (std::size_t i = 0; i < scan.crossings.size(); ++i) {
    ConjugatePointRecord rec = classify(scan.crossings[i], path, opt.conj);
    rec.refined_tol = scan.widths[i];
    if (!(rec.translation_residual <= opt.conj.translation_tol)) {
      r.discarded.push_back(rec.x_star);
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "sign change of detA at x = %.6f ignored: translation residual %.2e",
                    rec.x_star, rec.translation_residual);
      r.warnings.push_back(buf);
      continue;
    }
    if (rec.kind == CrossingCase::III) {
      r.hypothesis_degeneracy_ok = false;
      r.warnings.push_back("non-simple crossing at x = " + std::to_string(rec.x_star));
    }
    if (!(rec.simplicity_norm > opt.conj.simplicity_threshold)) r.simplicity_ok = false;
    r.conjugate_points.push_back(rec);
  }
  r.suspected_even = scan.suspected_even;
  for (double x : scan.suspected_even)
    r.warnings.push_back("touching zero of detA near x = " + std::to_string(x) +
                         " (even order, no contribution)");

  std::vector<double> pot;
  const int m = 8 * pulse.N + 1;
  for (int i = 0; i < m; ++i)
    pot.push_back(potential(pulse, -pulse.L_f + 2.0 * pulse.L_f * i / (m - 1)));
  r.lambda_infinity = lambda_infinity_bound(pot);

  std::vector<double> grid(opt.lambda_grid_points);
  for (int i = 0; i < opt.lambda_grid_points; ++i)
    grid[i] = r.lambda_infinity * i / std::max(1, opt.lambda_grid_points - 1);
  r.asymptotic_ok = check_no_asymptotic_crossings(pulse.params, grid);

  r.counts_match = r.unstable.size() == r.conjugate_points.size();
  return r;
}

std::string format_report(const StabilityReport& r) {
  std::ostringstream o;
  char buf[160];
  o << "pulse: " << r.pulse_id << '\n';
  o << "unstable eigenvalues (" << r.unstable.size() << "):";
  if (r.unstable.empty()) o << " none";
  for (double v : r.unstable) {
    std::snprintf(buf, sizeof buf, " %.6f", v);
    o << buf;
  }
  std::snprintf(buf, sizeof buf, "\ntranslation eigenvalue: %.3e\n", std::abs(r.zero_mode));
  o << buf;
  o << "conjugate points (" << r.conjugate_points.size() << "):\n";
  o << "  x*            case  Q1            Q3            simplicity\n";
  for (const auto& c : r.conjugate_points) {
    std::snprintf(buf, sizeof buf, "  %-12.6f  %-4s  %-12.6e  %-12s  %.6e\n",
                  c.x_star, to_string(c.kind), c.Q1,
                  c.Q3 ? std::to_string(*c.Q3).c_str() : "-", c.simplicity_norm);
    o << buf;
  }
  if (r.conjugate_points.empty()) o << "  none\n";
  std::snprintf(buf, sizeof buf,
                "lambda_inf bound: %.6f  asymptotic crossings: %s\n",
                r.lambda_infinity, r.asymptotic_ok ? "none" : "PRESENT");
  o << buf;
  std::snprintf(buf, sizeof buf,
                "coefficient tail |a_N|/max|a_k|: %.3e  potential tail: %.3e  omega drift: %.3e\n",
                r.coefficient_tail, r.tail_potential, r.max_omega_drift);
  o << buf;
  for (const auto& w : r.warnings) o << "warning: " << w << '\n';
  o << "verdict: " << r.unstable.size() << " unstable, " << r.conjugate_points.size()
    << " conjugate -> " << (r.counts_match ? "match" : "MISMATCH")
    << (r.hypothesis_degeneracy_ok ? "" : " (non-simple crossing present)") << '\n';
  return o.str();
}

}  // namespace shs
