#include "shstab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace shs {

namespace {

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

CheckResult close(const std::string& name, double got, double want, double tol) {
  const double err = std::abs(got - want);
  return {name, err <= tol, fmt("got %.12g, expected %.12g", got, want)};
}

Frame span(int i, int j) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4, 2);
  M(i, 0) = 1.0;
  M(j, 1) = 1.0;
  return Frame(M);
}

bool lists_close(std::vector<double> got, std::vector<double> want, double tol) {
  if (got.size() != want.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i)
    if (!(std::abs(got[i] - want[i]) <= tol)) return false;
  return true;
}

std::string list(const std::vector<double>& v) {
  std::string s = "{";
  char buf[32];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.4f", i ? ", " : "", v[i]);
    s += buf;
  }
  return s + "}";
}

}  // namespace

std::vector<ReferencePulse> reference_pulses() {
  return {
      {"phi=0 mu=0.05", {1.6, 0.05}, 0.0, 1.0, {0.1209}, {1.2400}},
      {"phi=pi mu=0.05", {1.6, 0.05}, std::numbers::pi, 1.0, {0.1179, 0.0058},
       {-0.6310, 17.5887}},
      {"phi=0 mu=0.20", {1.6, 0.20}, 0.0, 3.0, {}, {}},
  };
}

std::vector<CheckResult> fixture_checks(const VerifyTolerances& tol) {
  std::vector<CheckResult> out;
  const FixturePaths fx = fixture_paths();
  const Frame sandwich = sandwich_frame();

  // Regular fixture, graph taken over span(e1, e4).
  const Frame W1 = span(0, 3);
  Eigen::VectorXd v1(4);
  v1 << 0.0, 1.0, 2.0, 0.0;
  out.push_back(close("regular fixture Q1(v1(0))",
                      quadratic_form(fx.regular, 0.0, W1, v1, 1), -4.0,
                      tol.fixture));
  auto lam1 = [&](double s) {
    return eigenvalue_motion(fx.regular, 0.0, sandwich, W1, {s})[0][0];
  };
  out.push_back(close("regular fixture lambda'(0)",
                      derivative_richardson(lam1, 0.0, 1, 1e-2), -0.8,
                      tol.fixture));

  // Nonregular fixture, graph taken over l(0)^perp = span(e3, e4).
  const Frame W2 = span(2, 3);
  Eigen::VectorXd v2 = Eigen::VectorXd::Unit(4, 1);
  const double want[] = {0.0, 0.0, -2.0};
  for (int j = 1; j <= 3; ++j)
    out.push_back(close("nonregular fixture Q" + std::to_string(j),
                        quadratic_form(fx.nonregular, 0.0, W2, v2, j), want[j - 1],
                        tol.fixture));

  std::vector<double> ss;
  for (int i = -10; i <= 10; ++i) ss.push_back(0.05 * i);
  const auto lam2 = eigenvalue_motion(fx.nonregular, 0.0, sandwich, W2, ss);
  double worst = 0.0;
  for (std::size_t i = 0; i < ss.size(); ++i)
    worst = std::max(worst, std::abs(lam2[i][0] + ss[i] * ss[i] * ss[i] / 3.0));
  out.push_back({"nonregular fixture lambda(s) = -s^3/3", worst <= tol.fixture,
                 fmt("max error %.3e over %g samples", worst, double(ss.size()))});

  const double m1 = maslov_index(fx.regular, sandwich).index;
  const double m2 = maslov_index(fx.nonregular, sandwich).index;
  out.push_back(close("regular fixture Maslov index", m1, -1.0, 1e-12));
  out.push_back(close("nonregular fixture Maslov index", m2, -1.0, 1e-12));
  return out;
}

std::vector<CheckResult> reference_checks(const VerifyTolerances& tol,
                                          const StabilityOptions& opt) {
  std::vector<CheckResult> out;
  for (const ReferencePulse& ref : reference_pulses()) {
    const FourierPulse pulse = solve_pulse(ref.params, ref.phi, ref.scale);
    const StabilityReport r = stability_report(pulse, opt);

    std::vector<double> xs;
    bool simple = r.hypothesis_degeneracy_ok;
    for (const auto& c : r.conjugate_points) {
      xs.push_back(c.x_star);
      simple = simple && c.simplicity_norm > tol.simplicity;
    }
    std::sort(xs.begin(), xs.end());

    const std::size_t nu = r.unstable.size(), nc = r.conjugate_points.size();
    out.push_back({ref.label + " counts",
                   nu == ref.eigenvalues.size() && nc == ref.conjugate_points.size() &&
                       r.counts_match,
                   "unstable " + std::to_string(nu) + ", conjugate " + std::to_string(nc)});
    out.push_back({ref.label + " eigenvalues",
                   lists_close(r.unstable, ref.eigenvalues, tol.eigenvalue),
                   list(r.unstable) + " vs " + list(ref.eigenvalues)});
    out.push_back({ref.label + " conjugate points",
                   lists_close(xs, ref.conjugate_points, tol.location),
                   list(xs) + " vs " + list(ref.conjugate_points)});
    out.push_back({ref.label + " simple crossings", simple,
                   r.hypothesis_degeneracy_ok ? "no non-simple crossing"
                                              : "non-simple crossing present"});
  }
  return out;
}

}  // namespace shs
