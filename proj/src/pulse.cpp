#include "shstab/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "shstab/errors.hpp"

namespace shs {

namespace {

int order_of(const std::vector<double>& a) {
  if (a.empty() || a.size() % 2 == 0)
    throw InvalidParameter("full coefficient vector must have odd length 2N+1");
  return static_cast<int>(a.size() / 2);
}

// (a*a)_m for |m| <= 2N, index m+2N.
std::vector<double> square_untruncated(const std::vector<double>& a) {
  const int N = order_of(a);
  std::vector<double> out(4 * N + 1, 0.0);
  for (int i = 0; i <= 2 * N; ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; j <= 2 * N; ++j) out[i + j] += a[i] * a[j];
  }
  return out;
}

}  // namespace

std::vector<double> full_coefficients(const FourierPulse& pulse) {
  const int N = pulse.N;
  if (static_cast<int>(pulse.a.size()) != N + 1)
    throw InvalidParameter("pulse has " + std::to_string(pulse.a.size()) +
                           " coefficients, expected N+1 = " +
                           std::to_string(N + 1));
  std::vector<double> full(2 * N + 1);
  for (int k = 0; k <= N; ++k) {
    full[N + k] = pulse.a[k];
    full[N - k] = pulse.a[k];
  }
  return full;
}

std::vector<double> half_coefficients(const std::vector<double>& full) {
  const int N = order_of(full);
  return std::vector<double>(full.begin() + N, full.end());
}

std::vector<double> convolve2(const std::vector<double>& a) {
  const int N = order_of(a);
  std::vector<double> out(2 * N + 1, 0.0);
  for (int k = -N; k <= N; ++k) {
    const int lo = std::max(-N, k - N), hi = std::min(N, k + N);
    double s = 0.0;
    for (int k1 = lo; k1 <= hi; ++k1) s += a[k1 + N] * a[k - k1 + N];
    out[k + N] = s;
  }
  return out;
}

std::vector<double> convolve3(const std::vector<double>& a) {
  const int N = order_of(a);
  const std::vector<double> aa = square_untruncated(a);
  std::vector<double> out(2 * N + 1, 0.0);
  for (int k = -N; k <= N; ++k) {
    double s = 0.0;
    for (int k1 = -N; k1 <= N; ++k1) s += a[k1 + N] * aa[k - k1 + 2 * N];
    out[k + N] = s;
  }
  return out;
}

double linear_symbol(int k, const Params& p, double L_f) {
  const double q = k * std::numbers::pi / L_f;
  const double w = 1.0 - q * q;
  return -p.mu - w * w;
}

std::vector<double> residual(const std::vector<double>& a, const Params& p,
                             double L_f) {
  const int N = order_of(a);
  const std::vector<double> c2 = convolve2(a), c3 = convolve3(a);
  std::vector<double> F(2 * N + 1);
  for (int k = -N; k <= N; ++k) {
    const int i = k + N;
    F[i] = linear_symbol(k, p, L_f) * a[i] - c3[i] + p.nu * c2[i];
  }
  return F;
}

Eigen::MatrixXd jacobian(const std::vector<double>& a, const Params& p,
                         double L_f) {
  const int N = order_of(a);
  const int n = 2 * N + 1;
  const std::vector<double> aa = square_untruncated(a);
  Eigen::MatrixXd D(n, n);
  for (int k = -N; k <= N; ++k) {
    for (int j = -N; j <= N; ++j) {
      const int m = k - j;
      double v = -3.0 * aa[m + 2 * N];
      if (std::abs(m) <= N) v += 2.0 * p.nu * a[m + N];
      D(k + N, j + N) = v;
    }
    D(k + N, k + N) += linear_symbol(k, p, L_f);
  }
  return D;
}

FourierPulse seed_from_normal_form(const Params& p, double phi, double L_f,
                                   int N, double scale) {
  validate(p);
  if (N < 1) throw InvalidParameter("truncation order N must be >= 1");
  if (!(L_f > 0.0)) throw InvalidParameter("L_f must be positive");
  if (!(scale > 0.0)) throw InvalidParameter("seed scale must be positive");

  FourierPulse s;
  s.params = p;
  s.phi = phi;
  s.L_f = L_f;
  s.N = N;
  s.a.assign(N + 1, 0.0);

  const int M = 4 * N + 1;
  const double h = 2.0 * L_f / (M - 1);
  std::vector<double> xs(M), wu(M);
  for (int m = 0; m < M; ++m) {
    xs[m] = -L_f + m * h;
    const double w = (m == 0 || m == M - 1) ? 0.5 * h : h;
    wu[m] = w * scale * normal_form(xs[m], phi, p) / (2.0 * L_f);
  }
  for (int k = 0; k <= N; ++k) {
    const double q = k * std::numbers::pi / L_f;
    double sum = 0.0;
    for (int m = 0; m < M; ++m) sum += wu[m] * std::cos(q * xs[m]);
    s.a[k] = sum;
  }
  s.residual_norm =
      Eigen::Map<const Eigen::VectorXd>(
          residual(full_coefficients(s), p, L_f).data(), 2 * N + 1)
          .lpNorm<Eigen::Infinity>();
  return s;
}

FourierPulse newton_solve(const FourierPulse& seed, double tol, int max_iter,
                          std::vector<double>* history) {
  validate(seed.params);
  FourierPulse out = seed;
  const int N = seed.N;
  std::vector<double> full = full_coefficients(seed);
  if (history) history->clear();

  for (int it = 0;; ++it) {
    const std::vector<double> F = residual(full, seed.params, seed.L_f);
    Eigen::VectorXd Fh(N + 1);
    for (int k = 0; k <= N; ++k) Fh[k] = F[k + N];
    const double r = Fh.lpNorm<Eigen::Infinity>();
    if (history) history->push_back(r);
    if (!std::isfinite(r))
      throw NumericalError("Newton iteration diverged (non-finite residual)", r);
    if (r <= tol) {
      out.a = half_coefficients(full);
      out.residual_norm = r;
      out.iterations = it;
      return out;
    }
    if (it == max_iter) {
      std::ostringstream msg;
      msg << "Newton did not converge in " << max_iter << " iterations; last residual "
          << std::scientific << std::setprecision(3) << r;
      throw NumericalError(msg.str(), r);
    }

    const Eigen::MatrixXd D = jacobian(full, seed.params, seed.L_f);
    Eigen::MatrixXd Jh(N + 1, N + 1);
    for (int k = 0; k <= N; ++k) {
      Jh(k, 0) = D(k + N, N);
      for (int j = 1; j <= N; ++j) Jh(k, j) = D(k + N, N + j) + D(k + N, N - j);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Jh);
    const double rc = lu.rcond();
    if (!(rc > 1e-14))
      throw NumericalError("singular Newton system (rcond " +
                               std::to_string(rc) + ")",
                           rc);
    const Eigen::VectorXd da = lu.solve(-Fh);
    for (int k = 0; k <= N; ++k) {
      full[N + k] += da[k];
      if (k) full[N - k] = full[N + k];
    }
  }
}

FourierPulse solve_pulse(const Params& p, double phi, double scale, double L_f,
                         int N, double tol, int max_iter) {
  return newton_solve(seed_from_normal_form(p, phi, L_f, N, scale), tol, max_iter);
}

namespace {

void check_domain(const FourierPulse& pulse, double x) {
  if (!(std::abs(x) <= pulse.L_f * (1.0 + 1e-14)))
    throw InvalidParameter("x = " + std::to_string(x) + " outside [-L_f, L_f]");
}

}  // namespace

double evaluate(const FourierPulse& pulse, double x) {
  check_domain(pulse, x);
  const double t = std::numbers::pi * x / pulse.L_f;
  const double c1 = std::cos(t);
  double cprev = 1.0, c = c1, sum = 0.0;
  for (int k = 1; k <= pulse.N; ++k) {
    sum += pulse.a[k] * c;
    const double next = 2.0 * c1 * c - cprev;
    cprev = c;
    c = next;
  }
  return pulse.a[0] + 2.0 * sum;
}

double evaluate_derivative(const FourierPulse& pulse, double x, int order) {
  if (order < 0) throw InvalidParameter("derivative order must be >= 0");
  if (order == 0) return evaluate(pulse, x);
  check_domain(pulse, x);
  const double w = std::numbers::pi / pulse.L_f;
  const std::complex<double> rot = std::polar(1.0, w * x);
  // i^order picks the phase of d^n/dx^n e^{iwkx}.
  std::complex<double> phase(1.0, 0.0);
  for (int i = 0; i < order; ++i) phase *= std::complex<double>(0.0, 1.0);
  std::complex<double> z = rot;
  double sum = 0.0;
  for (int k = 1; k <= pulse.N; ++k) {
    sum += pulse.a[k] * std::pow(w * k, order) * (phase * z).real();
    z *= rot;
  }
  return 2.0 * sum;
}

double potential(const FourierPulse& pulse, double x) {
  return nonlinearity_deriv(evaluate(pulse, x), pulse.params);
}

double tail_decay(const FourierPulse& pulse) {
  double mx = 0.0;
  for (double v : pulse.a) mx = std::max(mx, std::abs(v));
  if (mx == 0.0) return 0.0;
  return std::abs(pulse.a.back()) / mx;
}

std::string to_json(const FourierPulse& pulse) {
  nlohmann::ordered_json j;
  j["nu"] = pulse.params.nu;
  j["mu"] = pulse.params.mu;
  j["phi"] = pulse.phi;
  j["L_f"] = pulse.L_f;
  j["N"] = pulse.N;
  j["coefficients"] = pulse.a;
  j["residual_norm"] = pulse.residual_norm;
  return j.dump(1);
}

namespace {

int line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

template <class T>
T field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) throw ParseError(std::string("missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("field '") + name + "': " + e.what());
  }
}

}  // namespace

FourierPulse from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("pulse file line " + std::to_string(line_of(text, e.byte)) +
                     ": " + e.what());
  }
  if (!j.is_object()) throw ParseError("pulse file must hold a JSON object");

  FourierPulse p;
  p.params.nu = field<double>(j, "nu");
  p.params.mu = field<double>(j, "mu");
  p.phi = field<double>(j, "phi");
  p.L_f = field<double>(j, "L_f");
  p.N = field<int>(j, "N");
  p.a = field<std::vector<double>>(j, "coefficients");
  p.residual_norm = field<double>(j, "residual_norm");

  validate(p.params);
  if (p.N < 1 || static_cast<int>(p.a.size()) != p.N + 1)
    throw ParseError("field 'coefficients': expected N+1 = " +
                     std::to_string(p.N + 1) + " entries, found " +
                     std::to_string(p.a.size()));
  if (!(p.L_f > 0.0)) throw InvalidParameter("L_f must be positive");
  return p;
}

void save(const FourierPulse& pulse, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << to_json(pulse) << '\n';
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

FourierPulse load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open pulse file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return from_json(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace shs
