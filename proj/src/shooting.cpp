#include "shstab/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>

namespace shs {

namespace {

using State = Eigen::Matrix<double, 4, 2>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

class Stepper {
 public:
  Stepper(const FourierPulse& pulse, double lambda, double atol, double rtol)
      : pulse_(pulse), lambda_(lambda), atol_(atol), rtol_(rtol) {}

  State rhs(double x, const State& M) const {
    const double q = -lambda_ - 1.0 + potential(pulse_, x);
    State d;
    d.row(0) = M.row(3);
    d.row(1) = M.row(2) - 2.0 * M.row(3);
    d.row(2) = q * M.row(0);
    d.row(3) = M.row(1);
    return d;
  }

  // Attempts one step of size h; on success advances (x, M) and returns true.
  // h is updated to the next suggested size either way.
  bool step(double& x, State& M, double& h) const {
    const State k1 = rhs(x, M);
    const State k2 = rhs(x + c2 * h, M + h * (a21 * k1));
    const State k3 = rhs(x + c3 * h, M + h * (a31 * k1 + a32 * k2));
    const State k4 = rhs(x + c4 * h, M + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 = rhs(x + c5 * h,
                         M + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 = rhs(x + h, M + h * (a61 * k1 + a62 * k2 + a63 * k3 +
                                         a64 * k4 + a65 * k5));
    const State y5 =
        M + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = rhs(x + h, y5);
    const State err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double en = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 2; ++j) {
        const double sc =
            atol_ + rtol_ * std::max(std::abs(M(i, j)), std::abs(y5(i, j)));
        en = std::max(en, std::abs(err(i, j)) / sc);
      }
    const double fac =
        en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    if (en <= 1.0) {
      x += h;
      M = y5;
      h *= fac;
      return true;
    }
    h *= std::min(fac, 1.0);
    return false;
  }

 private:
  const FourierPulse& pulse_;
  double lambda_, atol_, rtol_;
};

void check_underflow(double x, double h) {
  if (!(std::abs(h) > 1e-13 * std::max(1.0, std::abs(x))))
    throw NumericalError("integrator step size underflow at x = " +
                             std::to_string(x),
                         x);
}

// Integrates to x1 exactly.  on_accept(x, M, landed) runs after every
// accepted step and may rescale M.
template <class OnAccept>
void advance(const Stepper& st, double& x, State& M, double x1, double& h,
             int& rejected, OnAccept&& on_accept) {
  while (x < x1) {
    const double room = x1 - x;
    const bool last = h >= room;
    double hs = last ? room : h;
    if (st.step(x, M, hs)) {
      if (last) x = x1;
      // A clipped landing step says little about the natural step size.
      if (!last || hs > h) h = hs;
      on_accept(x, M, last);
    } else {
      ++rejected;
      h = hs;
      check_underflow(x, h);
    }
  }
}

State to_state(const Frame& F) { return F.M; }

Frame orthonormal(const State& M) { return orthonormalize(Frame(M)); }

}  // namespace

void validate(const ShootParams& sp) {
  if (!(-sp.L_minus < sp.L_plus))
    throw InvalidParameter("shooting window must satisfy -L_minus < L_plus");
  if (!(sp.abs_tol > 0.0 && sp.rel_tol > 0.0))
    throw InvalidParameter("integrator tolerances must be positive");
  if (!(sp.sample_dx > 0.0) || !(sp.renorm_every > 0.0))
    throw InvalidParameter("sample_dx and renorm_every must be positive");
  if (sp.lambda < 0.0) throw InvalidParameter("lambda must be >= 0");
}

Frame init_frame(double lambda, const Params& p) {
  const AsymptoticData d = asymptotic_frames(lambda, p);
  Eigen::MatrixXd M(4, 2);
  M.col(0) = d.Ru1;
  M.col(1) = d.Ru2;
  return orthonormalize(Frame(M));
}

double detA(const Frame& F) {
  if (F.n() != 2) throw InvalidParameter("detA needs a 4 x 2 frame");
  return F.M(0, 0) * F.M(3, 1) - F.M(0, 1) * F.M(3, 0);
}

Frame propagate(const FourierPulse& pulse, double lambda, const Frame& start,
                double x0, double x1, double abs_tol, double rel_tol) {
  if (start.n() != 2) throw InvalidParameter("propagate needs a 4 x 2 frame");
  if (x1 < x0) throw InvalidParameter("propagate integrates left to right only");
  const Stepper st(pulse, lambda, abs_tol, rel_tol);
  State M = to_state(start);
  double x = x0, h = std::min(0.05, std::max(x1 - x0, 1e-6));
  int rejected = 0;
  advance(st, x, M, x1, h, rejected, [](double, State&, bool) {});
  return orthonormal(M);
}

ShootingPath integrate_frame(const FourierPulse& pulse, const ShootParams& sp) {
  validate(sp);
  validate(pulse.params);
  if (sp.L_minus > pulse.L_f || sp.L_plus > pulse.L_f)
    throw InvalidParameter("shooting window exceeds the pulse domain");

  ShootingPath out;
  out.pulse = pulse;
  out.params = sp;
  out.tail_potential = std::abs(potential(pulse, -sp.L_minus) + pulse.params.mu);

  const Stepper st(pulse, sp.lambda, sp.abs_tol, sp.rel_tol);
  const double xa = -sp.L_minus, xb = sp.L_plus;
  const int n = std::max(1, static_cast<int>(std::lround((xb - xa) / sp.sample_dx)));

  State M = to_state(init_frame(sp.lambda, pulse.params));
  double x = xa, h = 0.01, last_renorm = xa;

  auto make_sample = [&](double xs, const State& S) {
    PathSample s;
    s.x = xs;
    s.frame = orthonormal(S);
    s.detA = detA(s.frame);
    s.plucker = plucker(s.frame);
    s.plucker = out.samples.empty() ? canonical_sign(s.plucker)
                                    : align_sign(s.plucker, out.samples.back().plucker);
    s.omega_drift = omega(s.frame.M.col(0), s.frame.M.col(1));
    out.max_omega_drift = std::max(out.max_omega_drift, std::abs(s.omega_drift));
    return s;
  };

  out.samples.push_back(make_sample(x, M));
  std::vector<std::pair<double, State>> inner;
  for (int k = 1; k <= n; ++k) {
    const double target = xa + (xb - xa) * k / n;
    inner.clear();
    advance(st, x, M, target, h, out.rejected, [&](double xs, State& S, bool landed) {
      ++out.steps;
      if (!landed) inner.emplace_back(xs, S);
      if (xs - last_renorm >= sp.renorm_every) {
        S = orthonormal(S).M;
        last_renorm = xs;
      }
    });

    // Keep internal steps around detA sign changes.
    if (!inner.empty()) {
      double dprev = out.samples.back().detA;
      bool flip = (detA(orthonormal(M)) > 0.0) != (dprev > 0.0);
      for (const auto& [xi, Mi] : inner) {
        const double di = detA(orthonormal(Mi));
        if ((di > 0.0) != (dprev > 0.0)) flip = true;
        dprev = di;
      }
      if (flip)
        for (const auto& [xi, Mi] : inner) out.samples.push_back(make_sample(xi, Mi));
    }
    out.samples.push_back(make_sample(target, M));
  }
  return out;
}

Frame ShootingPath::frame_at(double x) const {
  if (samples.empty()) throw InvalidParameter("empty shooting path");
  if (x < samples.front().x || x > samples.back().x)
    throw InvalidParameter("x = " + std::to_string(x) + " outside the shooting window");
  auto it = std::upper_bound(samples.begin(), samples.end(), x,
                             [](double v, const PathSample& s) { return v < s.x; });
  const PathSample& s = *std::prev(it);
  if (s.x == x) return s.frame;
  return propagate(pulse, params.lambda, s.frame, s.x, x, params.abs_tol,
                   params.rel_tol);
}

LagrangianPath ShootingPath::as_lagrangian_path() const {
  auto self = std::make_shared<const ShootingPath>(*this);
  return LagrangianPath([self](double x) { return self->frame_at(x); },
                        samples.front().x, samples.back().x, params.sample_dx);
}

void write_trajectory_csv(std::ostream& out, const ShootingPath& path) {
  out << "x,detA,P12,P13,P14,P23,P24,P34,omega_drift\n";
  out.precision(12);
  for (const PathSample& s : path.samples) {
    out << s.x << ',' << s.detA;
    for (int k = 0; k < 6; ++k) out << ',' << s.plucker[k];
    out << ',' << s.omega_drift << '\n';
  }
}

}  // namespace shs
