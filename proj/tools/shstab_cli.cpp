#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

#include <CLI11.hpp>

#include "shstab/conjugate.hpp"
#include "shstab/verify.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  double nu = 1.6, mu = 0.05, scale = 1.0;
  std::string phi = "0";
  double L_f = shs::PulseDefaults::L_f;
  int N = shs::PulseDefaults::N;
  double newton_tol = shs::PulseDefaults::tol;
  double L_cp = 60.0;
  double abs_tol = 1e-10, rel_tol = 1e-10;
  double renorm_every = 1.0, sample_dx = 0.05;
  double unstable_threshold = 1e-4, degeneracy_tol = 1e-6, simplicity = 1e-3;
  std::string out;
  std::string pulse_file;
  bool quick = false;
};

double parse_phase(const std::string& s) {
  if (s == "pi" || s == "PI" || s == "Pi") return std::numbers::pi;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw UsageError("--phi must be 0, pi or a number, got '" + s + "'");
  return v;
}

void check(const RunConfig& c) {
  if (!(c.unstable_threshold > 0 && c.degeneracy_tol > 0 && c.simplicity > 0))
    throw UsageError("thresholds must be positive");
  if (!(c.L_cp > 0 && c.L_cp <= c.L_f)) throw UsageError("need 0 < Lcp <= Lf");
}

shs::StabilityOptions stability_options(const RunConfig& c) {
  shs::StabilityOptions o;
  o.unstable_threshold = c.unstable_threshold;
  o.shoot.L_minus = o.shoot.L_plus = c.L_cp;
  o.shoot.abs_tol = c.abs_tol;
  o.shoot.rel_tol = c.rel_tol;
  o.shoot.renorm_every = c.renorm_every;
  o.shoot.sample_dx = c.sample_dx;
  o.conj.degeneracy_tol = c.degeneracy_tol;
  o.conj.simplicity_threshold = c.simplicity;
  return o;
}

shs::FourierPulse obtain_pulse(const RunConfig& c, bool params_given) {
  if (!c.pulse_file.empty()) return shs::load(c.pulse_file);
  if (!params_given)
    throw UsageError("give a pulse file or --nu, --mu and --phi");
  return shs::solve_pulse({c.nu, c.mu}, parse_phase(c.phi), c.scale, c.L_f, c.N,
                          c.newton_tol);
}

int cmd_pulse(const RunConfig& c, bool params_given) {
  if (!params_given) throw UsageError("pulse needs --nu, --mu and --phi");
  const shs::FourierPulse p = shs::solve_pulse(
      {c.nu, c.mu}, parse_phase(c.phi), c.scale, c.L_f, c.N, c.newton_tol);
  const std::string path = c.out.empty() ? "pulse.json" : c.out;
  shs::save(p, path);
  double amp = 0.0;
  for (int i = 0; i <= 4000; ++i)
    amp = std::max(amp, std::abs(shs::evaluate(p, -p.L_f + p.L_f * i / 2000.0)));
  std::printf("pulse: %s\n", shs::pulse_id(p).c_str());
  std::printf("newton iterations: %d\nresidual sup-norm: %.3e\n", p.iterations,
              p.residual_norm);
  std::printf("coefficient tail |a_N|/max|a_k|: %.3e\nmax |phi|: %.6f\n",
              shs::tail_decay(p), amp);
  std::printf("written: %s\n", path.c_str());
  return 0;
}

int cmd_spectrum(const RunConfig& c, bool params_given) {
  const shs::FourierPulse p = obtain_pulse(c, params_given);
  const shs::SpectrumReport r = shs::count_unstable(p, c.unstable_threshold);
  std::printf("pulse: %s\n", shs::pulse_id(p).c_str());
  std::printf("jacobian dimension: %zu\n", r.eigenvalues.size());
  std::printf("translation eigenvalue: %.3e\n", std::abs(r.zero_mode));
  std::printf("unstable eigenvalues (%zu):", r.unstable.size());
  if (r.unstable.empty()) std::printf(" none");
  for (double v : r.unstable) std::printf(" %.4f", v);
  std::printf("\n");
  return 0;
}

int cmd_conjugate(const RunConfig& c, bool params_given) {
  const shs::FourierPulse p = obtain_pulse(c, params_given);
  const shs::StabilityOptions o = stability_options(c);
  const shs::StabilityReport r = shs::stability_report(p, o);
  std::fputs(shs::format_report(r).c_str(), stdout);
  if (!c.out.empty()) {
    std::ofstream f(c.out);
    if (!f) throw std::runtime_error("cannot write " + c.out);
    shs::ShootParams sp = o.shoot;
    shs::write_trajectory_csv(f, shs::integrate_frame(p, sp));
    std::printf("trajectory: %s\n", c.out.c_str());
  }
  return 0;
}

int cmd_plucker(const RunConfig& c, bool params_given) {
  const shs::FourierPulse p = obtain_pulse(c, params_given);
  const shs::StabilityOptions o = stability_options(c);
  const shs::ShootingPath path = shs::integrate_frame(p, o.shoot);
  if (c.out.empty()) {
    shs::write_trajectory_csv(std::cout, path);
  } else {
    std::ofstream f(c.out);
    if (!f) throw std::runtime_error("cannot write " + c.out);
    shs::write_trajectory_csv(f, path);
  }

  shs::Plucker nonsimple = shs::Plucker::Zero();
  nonsimple[3] = 1.0;
  double dmin = 1e300;
  for (const auto& s : path.samples)
    dmin = std::min({dmin, (s.plucker - nonsimple).norm(), (s.plucker + nonsimple).norm()});
  int entries = 0;
  const shs::ScanResult scan = shs::scan_and_refine(path, o.conj);
  for (double x : scan.crossings) {
    const shs::Plucker P = shs::plucker(path.frame_at(x));
    if (shs::sandwich_train_projection_test({P[0], P[1], P[2]}, 1e-6)) ++entries;
  }
  std::fprintf(stderr, "samples: %zu\ntrain entries: %d\nmin distance to non-simple point: %.6f\n",
               path.samples.size(), entries, dmin);
  return 0;
}

int cmd_verify(const RunConfig& c) {
  std::vector<shs::CheckResult> checks = shs::fixture_checks();
  if (!c.quick) {
    const auto more = shs::reference_checks({}, stability_options(c));
    checks.insert(checks.end(), more.begin(), more.end());
  }
  int failed = 0;
  for (const auto& r : checks) {
    std::printf("%s  %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    failed += !r.pass;
  }
  std::printf("%zu checks, %d failed\n", checks.size(), failed);
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swift-Hohenberg pulse stability: spectrum and conjugate points"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option values; flags override it");

  RunConfig c;
  auto* onu = app.add_option("--nu", c.nu, "quadratic coefficient nu");
  auto* omu = app.add_option("--mu", c.mu, "linear damping mu (> 0)");
  auto* ophi = app.add_option("--phi", c.phi, "phase of the pulse: 0 or pi");
  app.add_option("--scale", c.scale, "multiplier on the normal-form seed")->capture_default_str();
  app.add_option("--Lf", c.L_f, "half-period of the Fourier domain")->capture_default_str();
  app.add_option("--N", c.N, "Fourier truncation order")->capture_default_str();
  app.add_option("--newton-tol", c.newton_tol, "Newton residual tolerance")->capture_default_str();
  app.add_option("--Lcp", c.L_cp, "shooting window [-Lcp, Lcp]")->capture_default_str();
  app.add_option("--abs-tol", c.abs_tol, "integrator absolute tolerance")->capture_default_str();
  app.add_option("--rel-tol", c.rel_tol, "integrator relative tolerance")->capture_default_str();
  app.add_option("--renorm-every", c.renorm_every, "distance between frame orthonormalizations")->capture_default_str();
  app.add_option("--sample-dx", c.sample_dx, "trajectory sample spacing")->capture_default_str();
  app.add_option("--threshold", c.unstable_threshold, "unstable eigenvalue threshold")->capture_default_str();
  app.add_option("--degeneracy-tol", c.degeneracy_tol, "first-order crossing degeneracy tolerance")->capture_default_str();
  app.add_option("--simplicity", c.simplicity, "simplicity threshold on crossings")->capture_default_str();
  app.add_option("--out", c.out, "output file");
  app.fallthrough();

  auto* pulse = app.add_subcommand("pulse", "solve for a pulse and write it to --out");
  auto* spectrum = app.add_subcommand("spectrum", "unstable eigenvalues of a pulse");
  auto* conjugate = app.add_subcommand("conjugate", "conjugate points and stability report");
  auto* plucker = app.add_subcommand("plucker", "Plucker trajectory as CSV");
  auto* verify = app.add_subcommand("verify", "run fixture and reference checks");
  for (auto* sub : {spectrum, conjugate, plucker})
    sub->add_option("pulse_file", c.pulse_file, "pulse file written by 'pulse'");
  verify->add_flag("--quick", c.quick, "fixtures only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const bool params_given = onu->count() && omu->count() && ophi->count();
  try {
    check(c);
    if (pulse->parsed()) return cmd_pulse(c, params_given);
    if (spectrum->parsed()) return cmd_spectrum(c, params_given);
    if (conjugate->parsed()) return cmd_conjugate(c, params_given);
    if (plucker->parsed()) return cmd_plucker(c, params_given);
    if (verify->parsed()) return cmd_verify(c);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const shs::InvalidParameter& e) {
    std::fprintf(stderr, "invalid parameter: %s\n", e.what());
    return 2;
  } catch (const shs::ParseError& e) {
    std::fprintf(stderr, "bad pulse file: %s\n", e.what());
    return 2;
  } catch (const shs::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
