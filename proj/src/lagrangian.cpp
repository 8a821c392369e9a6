#include "shstab/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace shs {

Frame::Frame(Eigen::MatrixXd m) : M(std::move(m)) {
  if (M.cols() < 1 || M.rows() != 2 * M.cols())
    throw InvalidParameter("frame must be 2n x n, got " +
                           std::to_string(M.rows()) + " x " +
                           std::to_string(M.cols()));
}

Eigen::MatrixXd symplectic_J(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n).setIdentity();
  J.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return J;
}

double omega(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size() || u.size() % 2)
    throw InvalidParameter("omega needs two vectors of equal even length");
  const int n = static_cast<int>(u.size() / 2);
  // <u, Jv> with Jv = (v_bottom, -v_top)
  return u.head(n).dot(v.tail(n)) - u.tail(n).dot(v.head(n));
}

Frame orthonormalize(const Frame& F) {
  const int n = F.n();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(F.M);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(2 * n, n);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (std::abs(R(j, j)) <= 1e-14 * R.cwiseAbs().maxCoeff())
      throw NumericalError("frame is rank deficient", R(j, j));
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  }
  return Frame(std::move(Q));
}

LagrangianCheck is_lagrangian(const Frame& F, double tol) {
  LagrangianCheck c;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(F.M);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > 1e-12 * smax && smax > 0.0) ++c.rank;
  if (c.rank < F.n()) {
    c.residual = std::numeric_limits<double>::infinity();
    return c;
  }
  const Frame Q = orthonormalize(F);
  const Eigen::MatrixXd X = Q.X(), Y = Q.Y();
  c.residual = (X.transpose() * Y - Y.transpose() * X).norm();
  c.lagrangian = c.residual < tol;
  return c;
}

Frame sandwich_frame() {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4, 2);
  M(1, 0) = 1.0;
  M(2, 1) = 1.0;
  return Frame(M);
}

Plucker plucker(const Frame& F) {
  if (F.n() != 2) throw InvalidParameter("Plucker coordinates need n = 2");
  const Eigen::Vector4d a = F.M.col(0), b = F.M.col(1);
  Plucker P;
  int k = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) P[k++] = a[i] * b[j] - a[j] * b[i];
  const double nrm = P.norm();
  if (!(nrm > 1e-14 * a.norm() * b.norm()))
    throw NumericalError("rank-deficient frame has no Plucker coordinates", nrm);
  return P / nrm;
}

Plucker canonical_sign(const Plucker& P) {
  for (int i = 0; i < 6; ++i) {
    if (std::abs(P[i]) > 1e-14) return P[i] < 0.0 ? Plucker(-P) : P;
  }
  return P;
}

Plucker align_sign(const Plucker& P, const Plucker& previous) {
  return P.dot(previous) < 0.0 ? Plucker(-P) : P;
}

double plucker_relation(const Plucker& P) {
  return P[0] * P[5] - P[1] * P[4] + P[2] * P[3];
}

bool sandwich_train_projection_test(const Eigen::Vector3d& point, double tol) {
  if (std::abs(point[2]) > tol) return false;
  const double x = point[0], y = point[1];
  for (double c : {-0.5, 0.5})
    if ((x + c) * (x + c) + y * y <= 0.25 + tol) return true;
  return false;
}

void write_plucker_csv(std::ostream& out, const std::vector<double>& t,
                       const std::vector<Plucker>& P,
                       const std::vector<double>* detA) {
  if (t.size() != P.size() || (detA && detA->size() != t.size()))
    throw InvalidParameter("trajectory columns differ in length");
  out << "t,P12,P13,P14,P23,P24,P34" << (detA ? ",detA" : "") << '\n';
  out.precision(12);
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << t[i];
    for (int k = 0; k < 6; ++k) out << ',' << P[i][k];
    if (detA) out << ',' << (*detA)[i];
    out << '\n';
  }
}

LagrangianPath::LagrangianPath(Eval eval, double t_begin, double t_end,
                               double max_step)
    : eval_(std::move(eval)), t_begin_(t_begin), t_end_(t_end),
      max_step_(max_step) {
  if (!(t_begin < t_end)) throw InvalidParameter("path needs t_begin < t_end");
  if (!(max_step > 0.0)) throw InvalidParameter("path max_step must be positive");
}

std::vector<LagrangianPath::Sample> LagrangianPath::samples(int count) const {
  if (count < 2) throw InvalidParameter("need at least two samples");
  std::vector<Sample> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double t = t_begin_ + (t_end_ - t_begin_) * i / (count - 1);
    out.push_back({t, eval_(t)});
  }
  return out;
}

Eigen::MatrixXd graph_matrix(const LagrangianPath& path, double t0,
                             const Frame& W, double t) {
  const Frame V0 = orthonormalize(path(t0));
  const Frame Lt = orthonormalize(path(t));
  const Frame Wq = orthonormalize(W);
  const int n = V0.n();
  if (Lt.n() != n || Wq.n() != n)
    throw InvalidParameter("graph_matrix: frame dimensions differ");

  Eigen::MatrixXd S(2 * n, 2 * n);
  S << Lt.M, -Wq.M;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cond = s[0] / s[2 * n - 1];
  if (!(cond < 1e10))
    throw NumericalError("transversality lost in graph_matrix (condition " +
                             std::to_string(cond) + ")",
                         cond);
  const Eigen::MatrixXd sol = svd.solve(V0.M);
  const Eigen::MatrixXd AV = Wq.M * sol.bottomRows(n);
  return AV * V0.M.transpose();
}

namespace {

// Finite-difference weights for derivative m at 0 on nodes z.
std::vector<double> fornberg(const std::vector<double>& z, int m) {
  const int n = static_cast<int>(z.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = z[0];
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = z[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = z[i] - z[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k > 0; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k > 0; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

// Works for any value type supporting + and scalar *.
template <class T, class G>
T richardson(const G& g, double t0, int order, double h) {
  if (order < 1) throw InvalidParameter("derivative order must be >= 1");
  std::vector<double> z(2 * order + 1);
  for (int m = -order; m <= order; ++m) z[m + order] = m;
  const std::vector<double> w = fornberg(z, order);
  auto stencil = [&](double step) {
    T acc = w[0] * g(t0 + z[0] * step);
    for (std::size_t i = 1; i < z.size(); ++i)
      if (w[i] != 0.0) acc = acc + w[i] * g(t0 + z[i] * step);
    return T(acc * (1.0 / std::pow(step, order)));
  };
  const int p = (order % 2) ? order + 1 : order + 2;
  const double f = std::pow(2.0, p);
  const T coarse = stencil(h), fine = stencil(0.5 * h);
  return T((f * fine - coarse) * (1.0 / (f - 1.0)));
}

double path_speed(const LagrangianPath& path, double t0) {
  const double d = 1e-5;
  auto proj = [&](double t) {
    const Frame Q = orthonormalize(path(t));
    return Eigen::MatrixXd(Q.M * Q.M.transpose());
  };
  // Largest principal angular velocity of the plane.
  const Eigen::MatrixXd dP = (proj(t0 + d) - proj(t0 - d)) / (2.0 * d);
  return Eigen::JacobiSVD<Eigen::MatrixXd>(dP).singularValues()[0];
}

// Smallest singular value of [l | W] on orthonormal frames: 1 for W = l^perp,
// 0 when W meets l.  The graph map has a pole roughly that far away.
double transversality(const Frame& l, const Frame& W) {
  const Frame Q = orthonormalize(l), R = orthonormalize(W);
  Eigen::MatrixXd S(Q.M.rows(), 2 * Q.n());
  S << Q.M, R.M;
  const auto s = Eigen::JacobiSVD<Eigen::MatrixXd>(S).singularValues();
  return s[s.size() - 1];
}

// Roundoff in an order-j stencil grows like h^-j, so higher orders take a
// milder share of the shrink factor.
double step_for(const LagrangianPath& path, double t0, const Frame& W,
                double base, int order) {
  const double shrink = std::min(1.0, transversality(path(t0), W)) /
                        std::max(1.0, path_speed(path, t0));
  return base * std::pow(shrink, 1.0 / order);
}

Frame default_transverse(const Frame& l) {
  const Frame Q = orthonormalize(l);
  return Frame(symplectic_J(Q.n()) * Q.M);
}

}  // namespace

double derivative_richardson(const std::function<double(double)>& g, double t0,
                             int order, double h) {
  return richardson<double>(g, t0, order, h);
}

double quadratic_form(const LagrangianPath& path, double t0, const Frame& W,
                      const Eigen::VectorXd& v, int order,
                      const CrossingOptions& opt) {
  const double h = step_for(path, t0, W, opt.h, order);
  auto g = [&](double t) { return omega(v, graph_matrix(path, t0, W, t) * v); };
  return richardson<double>(g, t0, order, h);
}

Eigen::MatrixXd crossing_kernel(const Frame& l, const Frame& reference,
                                double tol) {
  const Frame Q = orthonormalize(l), R = orthonormalize(reference);
  const int n = Q.n();
  Eigen::MatrixXd S(2 * n, 2 * n);
  S << Q.M, -R.M;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  std::vector<int> idx;
  for (int i = 0; i < 2 * n; ++i)
    if (s[i] <= tol) idx.push_back(i);
  Eigen::MatrixXd K(2 * n, static_cast<int>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c)
    K.col(c) = Q.M * svd.matrixV().col(idx[c]).head(n);
  if (K.cols() == 0) return K;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(K);
  return qr.householderQ() * Eigen::MatrixXd::Identity(2 * n, K.cols());
}

CrossingFormResult crossing_form(const LagrangianPath& path, double t0,
                                 const Frame& reference,
                                 const CrossingOptions& opt,
                                 std::optional<Frame> W) {
  const Frame l0 = path(t0);
  const Eigen::MatrixXd K = crossing_kernel(l0, reference, opt.kernel_tol);
  if (K.cols() == 0)
    throw CrossingError(CrossingError::Kind::NotACrossing,
                        "t0 = " + std::to_string(t0) + " is not a crossing");
  const Frame Wf = W ? *W : default_transverse(l0);
  const Eigen::MatrixXd Jn = symplectic_J(l0.n());

  auto form_at = [&](double t) {
    const Eigen::MatrixXd A = graph_matrix(path, t0, Wf, t);
    return Eigen::MatrixXd(K.transpose() * Jn * A * K);
  };

  CrossingFormResult res;
  res.t0 = t0;
  res.kernel = K;
  res.kernel_dim = static_cast<int>(K.cols());
  for (int j = 1; j <= opt.max_order; ++j) {
    const double h = step_for(path, t0, Wf, opt.h, j);
    Eigen::MatrixXd F = richardson<Eigen::MatrixXd>(form_at, t0, j, h);
    F = 0.5 * (F + F.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double size = ev.cwiseAbs().maxCoeff();
    if (size <= opt.degeneracy_tol) {
      res.lower_norms.push_back(size);
      continue;
    }
    if (ev.cwiseAbs().minCoeff() <= opt.degeneracy_tol)
      throw CrossingError(CrossingError::Kind::PartiallyDegenerate,
                          "order-" + std::to_string(j) +
                              " form is degenerate on part of the kernel",
                          ev.cwiseAbs().minCoeff());
    res.order = j;
    res.form = F;
    res.Qj = F(0, 0);
    for (int i = 0; i < ev.size(); ++i) (ev[i] > 0.0 ? res.p : res.q)++;
    return res;
  }
  throw CrossingError(CrossingError::Kind::FullyDegenerate,
                      "crossing at t0 = " + std::to_string(t0) +
                          " is degenerate through order " +
                          std::to_string(opt.max_order) + " (not isolated?)");
}

std::vector<Eigen::VectorXd> eigenvalue_motion(const LagrangianPath& path,
                                               double t0, const Frame& reference,
                                               const Frame& W,
                                               const std::vector<double>& ts,
                                               double kernel_tol) {
  const Eigen::MatrixXd K = crossing_kernel(path(t0), reference, kernel_tol);
  if (K.cols() == 0)
    throw CrossingError(CrossingError::Kind::NotACrossing,
                        "reference does not meet l(t0)");
  const Eigen::MatrixXd Jn = symplectic_J(W.n());
  std::vector<Eigen::VectorXd> out;
  out.reserve(ts.size());
  for (double t : ts) {
    const Eigen::MatrixXd A = graph_matrix(path, t0, W, t);
    Eigen::MatrixXd B = K.transpose() * Jn * A * K;
    B = 0.5 * (B + B.transpose()).eval();
    out.push_back(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(B).eigenvalues());
  }
  return out;
}

double crossing_determinant(const Frame& l, const Frame& reference) {
  const Frame Q = orthonormalize(l), R = orthonormalize(reference);
  const int n = Q.n();
  Eigen::MatrixXd S(2 * n, 2 * n);
  S << Q.M, R.M;
  return S.determinant();
}

Eigen::MatrixXd ReferenceChart::S(const Frame& l) const {
  const Eigen::MatrixXd F = to_chart * orthonormalize(l).M;
  const int n = l.n();
  const Eigen::MatrixXd X = F.topRows(n), Y = F.bottomRows(n);
  Eigen::MatrixXd S = X.transpose().partialPivLu().solve(Y.transpose()).transpose();
  return 0.5 * (S + S.transpose());
}

ReferenceChart reference_chart(const Frame& reference,
                               const std::vector<Frame>& near) {
  const Frame R = orthonormalize(reference);
  const int n = R.n();
  Eigen::MatrixXd U(2 * n, 2 * n);
  U << R.M, symplectic_J(n).transpose() * R.M;

  std::vector<Eigen::MatrixXd> shifts{Eigen::MatrixXd::Zero(n, n)};
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(n, n);
  for (int i = 1; i < n; i += 2) D(i, i) = -1.0;
  for (double c : {0.5, -0.5, 1.0, -1.0, 2.0, -2.0}) {
    shifts.push_back(c * Eigen::MatrixXd::Identity(n, n));
    shifts.push_back(c * D);
  }

  ReferenceChart best;
  double best_score = -1.0;
  for (const auto& T : shifts) {
    Eigen::MatrixXd shear_inv = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    shear_inv.topRightCorner(n, n) = -T;
    const Eigen::MatrixXd inv = shear_inv * U.transpose();
    double score = std::numeric_limits<double>::infinity();
    for (const Frame& l : near) {
      const Eigen::MatrixXd F = inv * orthonormalize(l).M;
      const auto sx = Eigen::JacobiSVD<Eigen::MatrixXd>(F.topRows(n)).singularValues();
      const double full = Eigen::JacobiSVD<Eigen::MatrixXd>(F).singularValues()[0];
      score = std::min(score, sx[n - 1] / full);
    }
    if (score > best_score) {
      best_score = score;
      best.to_chart = inv;
    }
    if (best_score > 0.1) break;
  }
  if (!(best_score > 1e-8))
    throw NumericalError("no chart over the reference plane covers the path here",
                         best_score);
  return best;
}

int signature(const Eigen::MatrixXd& S, int drop) {
  Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S).eigenvalues();
  std::vector<double> v(ev.data(), ev.data() + ev.size());
  std::sort(v.begin(), v.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
  int sig = 0;
  for (std::size_t i = static_cast<std::size_t>(std::max(drop, 0)); i < v.size(); ++i)
    sig += v[i] > 0.0 ? 1 : -1;
  return sig;
}

MaslovResult maslov_index(const LagrangianPath& path, const Frame& reference,
                          const MaslovOptions& opt) {
  const double a = path.begin(), b = path.end();
  const int steps = std::max(2, static_cast<int>(std::ceil((b - a) / path.max_step())));
  auto det = [&](double t) { return crossing_determinant(path(t), reference); };

  std::vector<double> ts(steps + 1), ds(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    ts[i] = a + (b - a) * i / steps;
    ds[i] = det(ts[i]);
  }

  std::vector<double> found;
  auto add = [&](double t) {
    for (double f : found)
      if (std::abs(f - t) < 0.25 * (b - a) / steps) return;
    found.push_back(t);
  };

  for (int i = 0; i <= steps; ++i)
    if (std::abs(ds[i]) <= opt.zero_tol) add(ts[i]);

  for (int i = 0; i < steps; ++i) {
    if (ds[i] * ds[i + 1] >= 0.0) continue;
    double lo = ts[i], hi = ts[i + 1], dlo = ds[i];
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi), dm = det(mid);
      if (dm == 0.0) { lo = hi = mid; break; }
      if ((dm < 0.0) == (dlo < 0.0)) { lo = mid; dlo = dm; } else hi = mid;
    }
    add(0.5 * (lo + hi));
  }

  // Touching zeros without a sign change.
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 1; i < steps; ++i) {
    const double m = std::abs(ds[i]);
    if (!(m < std::abs(ds[i - 1]) && m < std::abs(ds[i + 1]) && m < opt.dip_tol)) continue;
    if (ds[i - 1] * ds[i + 1] < 0.0) continue;
    double lo = ts[i - 1], hi = ts[i + 1];
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
      const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
      if (std::abs(det(x1)) < std::abs(det(x2))) hi = x2; else lo = x1;
    }
    const double tm = 0.5 * (lo + hi);
    if (std::abs(det(tm)) <= opt.zero_tol) add(tm);
  }

  std::sort(found.begin(), found.end());
  MaslovResult res;
  const double edge = 1e-12 * std::max(1.0, b - a);
  for (std::size_t i = 0; i < found.size(); ++i) {
    const double t = found[i];
    const CrossingFormResult cf = crossing_form(path, t, reference, opt.crossing);
    MaslovCrossing c;
    c.t = t;
    c.order = cf.order;
    c.p = cf.p;
    c.q = cf.q;
    const int sig = cf.p - cf.q;
    const bool odd = cf.order % 2 == 1;
    const bool at_a = std::abs(t - a) <= edge, at_b = std::abs(t - b) <= edge;
    if (at_a) {
      c.endpoint = true;
      c.contribution = 0.5 * sig;
    } else if (at_b) {
      c.endpoint = true;
      c.contribution = odd ? 0.5 * sig : -0.5 * sig;
    } else {
      c.contribution = odd ? sig : 0.0;
    }

    double delta = path.max_step();
    if (i > 0) delta = std::min(delta, 0.5 * (t - found[i - 1]));
    if (i + 1 < found.size()) delta = std::min(delta, 0.5 * (found[i + 1] - t));
    if (!at_a) delta = std::min(delta, t - a);
    if (!at_b) delta = std::min(delta, b - t);
    const double lo = at_a ? a : t - delta, hi = at_b ? b : t + delta;
    const Frame Llo = path(lo), Lhi = path(hi);
    const ReferenceChart chart = reference_chart(reference, {Llo, path(t), Lhi});
    const int k = cf.kernel_dim;
    const int before = signature(chart.S(Llo), at_a ? k : 0);
    const int after = signature(chart.S(Lhi), at_b ? k : 0);
    c.signature_contribution = 0.5 * (after - before);

    res.index += c.contribution;
    res.signature_index += c.signature_contribution;
    res.ledger.push_back(c);
  }
  return res;
}

FixturePaths fixture_paths() {
  auto regular = [](double s) {
    Eigen::MatrixXd M(4, 2);
    M << -s * s / 2 + 2 * s, -3 * s * s + 1,
         1.0,                6.0,
         2 - s,              -6 * s,
         s * s * s / 6 - s * s, s * s * s - s + 2;
    return Frame(M);
  };
  auto nonregular = [](double s) {
    Eigen::MatrixXd M(4, 2);
    M << -s * s / 2,     -3 * s * s + 1,
         1.0,            6.0,
         -s,             -6 * s,
         s * s * s / 6,  s * s * s - s;
    return Frame(M);
  };
  return {LagrangianPath(regular, -1.0, 1.0, 0.01),
          LagrangianPath(nonregular, -1.0, 1.0, 0.01)};
}

}  // namespace shs
