#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shstab/errors.hpp"

namespace shs {

// Columns of M span an n-plane in R^{2n}; X and Y are the top and bottom
// n x n blocks.
struct Frame {
  Eigen::MatrixXd M;

  Frame() = default;
  explicit Frame(Eigen::MatrixXd m);

  int n() const { return static_cast<int>(M.cols()); }
  Eigen::MatrixXd X() const { return M.topRows(n()); }
  Eigen::MatrixXd Y() const { return M.bottomRows(n()); }
};

Eigen::MatrixXd symplectic_J(int n);

struct LagrangianCheck {
  bool lagrangian = false;
  double residual = 0.0;  // ||X^T Y - Y^T X|| on the orthonormalized frame
  int rank = 0;
};

LagrangianCheck is_lagrangian(const Frame& F, double tol = 1e-9);

double omega(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// QR with R's diagonal made positive, so orientation-sensitive minors keep
// their sign.
Frame orthonormalize(const Frame& F);

Frame sandwich_frame();

using Plucker = Eigen::Matrix<double, 6, 1>;

// Order (P12, P13, P14, P23, P24, P34), unit Euclidean norm.
Plucker plucker(const Frame& F);
Plucker canonical_sign(const Plucker& P);
Plucker align_sign(const Plucker& P, const Plucker& previous);
double plucker_relation(const Plucker& P);

bool sandwich_train_projection_test(const Eigen::Vector3d& point,
                                    double tol = 1e-12);

void write_plucker_csv(std::ostream& out, const std::vector<double>& t,
                       const std::vector<Plucker>& P,
                       const std::vector<double>* detA = nullptr);

class LagrangianPath {
 public:
  using Eval = std::function<Frame(double)>;
  struct Sample {
    double t;
    Frame frame;
  };

  LagrangianPath(Eval eval, double t_begin, double t_end, double max_step);

  Frame operator()(double t) const { return eval_(t); }
  double begin() const { return t_begin_; }
  double end() const { return t_end_; }
  double max_step() const { return max_step_; }

  // count >= 2 uniformly spaced samples including both ends.
  std::vector<Sample> samples(int count) const;

 private:
  Eval eval_;
  double t_begin_, t_end_, max_step_;
};

struct CrossingError : NumericalError {
  enum class Kind { NotACrossing, FullyDegenerate, PartiallyDegenerate };
  CrossingError(Kind kind, const std::string& what, double value = 0.0)
      : NumericalError(what, value), kind(kind) {}
  Kind kind;
};

// A(t) maps l(t0) into span(W) with v + A(t)v in l(t); zero on l(t0)^perp.
Eigen::MatrixXd graph_matrix(const LagrangianPath& path, double t0,
                             const Frame& W, double t);

// Central stencil of 2*order+1 points with one Richardson halving.
double derivative_richardson(const std::function<double(double)>& g, double t0,
                             int order, double h);

struct CrossingOptions {
  int max_order = 5;
  double h = 1e-2;
  double degeneracy_tol = 1e-6;
  double kernel_tol = 1e-6;
};

// d^order/dt^order omega(v, A(t) v) at t0 for the given (unnormalized) v.
double quadratic_form(const LagrangianPath& path, double t0, const Frame& W,
                      const Eigen::VectorXd& v, int order,
                      const CrossingOptions& opt = {});

// Orthonormal basis of l(t0) intersected with the reference plane.
Eigen::MatrixXd crossing_kernel(const Frame& l, const Frame& reference,
                                double tol = 1e-6);

struct CrossingFormResult {
  double t0 = 0.0;
  int order = 0;
  double Qj = 0.0;  // value on the first unit kernel vector
  int kernel_dim = 0;
  int p = 0, q = 0;
  Eigen::MatrixXd kernel;          // unit kernel vectors as columns
  Eigen::MatrixXd form;            // order-j form on the kernel basis
  std::vector<double> lower_norms; // sizes of the vanishing lower orders
};

// W defaults to J l(t0), which is Lagrangian and transverse to l(t0).
CrossingFormResult crossing_form(const LagrangianPath& path, double t0,
                                 const Frame& reference,
                                 const CrossingOptions& opt = {},
                                 std::optional<Frame> W = std::nullopt);

// Eigenvalues of the kernel-projected J A(t) at each requested t.
std::vector<Eigen::VectorXd> eigenvalue_motion(const LagrangianPath& path,
                                               double t0, const Frame& reference,
                                               const Frame& W,
                                               const std::vector<double>& ts,
                                               double kernel_tol = 1e-6);

struct MaslovCrossing {
  double t = 0.0;
  int order = 0;
  int p = 0, q = 0;
  bool endpoint = false;
  double contribution = 0.0;
  // Half-signature jump of the graph chart over the reference plane.
  double signature_contribution = 0.0;
};

// index follows the crossing-form rule with W = J l(t0).  signature_index
// does not depend on a transverse plane; the two differ only when a
// degenerate crossing is seen in coordinates that distort J l(t0).
struct MaslovResult {
  double index = 0.0;
  double signature_index = 0.0;
  std::vector<MaslovCrossing> ledger;
};

struct MaslovOptions {
  CrossingOptions crossing;
  double zero_tol = 1e-10;  // on det[Q(t) | Q*] for orthonormal frames
  double dip_tol = 1e-6;
};

double crossing_determinant(const Frame& l, const Frame& reference);

// Symmetric S(t) with l(t) = graph of S over the reference plane, in
// coordinates where a complement W' of the reference is vertical.  W' is
// chosen transverse to every frame in `near`.
struct ReferenceChart {
  Eigen::MatrixXd to_chart;  // inverse of the symplectic chart map
  Eigen::MatrixXd S(const Frame& l) const;
};

ReferenceChart reference_chart(const Frame& reference,
                               const std::vector<Frame>& near);

// Signature with the `drop` eigenvalues of least magnitude left out.
int signature(const Eigen::MatrixXd& S, int drop = 0);

MaslovResult maslov_index(const LagrangianPath& path, const Frame& reference,
                          const MaslovOptions& opt = {});

struct FixturePaths {
  LagrangianPath regular;     // first-order crossing at s = 0
  LagrangianPath nonregular;  // third-order crossing at s = 0
};

FixturePaths fixture_paths();

}  // namespace shs
