#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "shstab/lagrangian.hpp"
#include "support.hpp"

using namespace shs;

namespace {

Frame cols(std::initializer_list<Eigen::Vector4d> vs) {
  Eigen::MatrixXd M(4, static_cast<int>(vs.size()));
  int j = 0;
  for (const auto& v : vs) M.col(j++) = v;
  return Frame(M);
}

Eigen::Vector4d e(int i) { return Eigen::Vector4d::Unit(i - 1); }

Frame horizontal() { return cols({e(1), e(2)}); }

// Graph {(x, S(t) x)} over the horizontal plane; its crossings with the
// horizontal plane sit where S(t) is singular and the graph matrix over the
// vertical plane is A(t)(x, 0) = (0, S(t) x), so Q_j = x^T S^(j)(t0) x.
LagrangianPath graph_path(std::function<Eigen::Matrix2d(double)> S, double a, double b) {
  return LagrangianPath(
      [S](double t) {
        Eigen::MatrixXd M(4, 2);
        M << Eigen::Matrix2d::Identity(), S(t);
        return Frame(M);
      },
      a, b, 0.01);
}

Frame vertical_graph(const Eigen::Matrix2d& S) {
  Eigen::MatrixXd M(4, 2);
  M << S, Eigen::Matrix2d::Identity();
  return Frame(M);
}

LagrangianPath transformed(const LagrangianPath& p, const Eigen::MatrixXd& Psi) {
  return LagrangianPath([p, Psi](double t) { return Frame(Psi * p(t).M); }, p.begin(), p.end(),
                        p.max_step());
}

}  // namespace

TEST_CASE("symplectic form") {
  CHECK(omega(e(1), e(3)) == 1.0);
  CHECK(omega(e(3), e(1)) == -1.0);
  CHECK(omega(e(2), e(3)) == 0.0);
  std::mt19937 rng(1);
  std::normal_distribution<double> G;
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd u(6);
    for (int k = 0; k < 6; ++k) u[k] = G(rng);
    CHECK(omega(u, u) == 0.0);
  }
  CHECK_THROWS_AS(omega(e(1), Eigen::VectorXd::Zero(2)), InvalidParameter);
  const Eigen::MatrixXd J = symplectic_J(2);
  CHECK(J(0, 2) == 1.0);
  CHECK(J(2, 0) == -1.0);
}

TEST_CASE("lagrangian check") {
  CHECK(is_lagrangian(sandwich_frame()).lagrangian);
  CHECK(sandwich_frame().M.col(0) == Eigen::VectorXd(e(2)));
  CHECK(sandwich_frame().M.col(1) == Eigen::VectorXd(e(3)));
  const LagrangianCheck bad = is_lagrangian(cols({e(1), e(3)}));
  CHECK_FALSE(bad.lagrangian);
  CHECK(bad.rank == 2);
  CHECK(bad.residual > 0.5);

  const LagrangianCheck deficient = is_lagrangian(cols({e(1), e(1)}));
  CHECK_FALSE(deficient.lagrangian);
  CHECK(deficient.rank == 1);

  std::mt19937 rng(5);
  Eigen::Matrix2d M;
  M << 2.0, -1.0, 0.3, 4.0;
  for (const Frame& F : {sandwich_frame(), cols({e(1), e(3)}), vertical_graph(testing::random_symmetric(rng, 2))}) {
    const Frame G(F.M * M);
    CHECK(is_lagrangian(G).lagrangian == is_lagrangian(F).lagrangian);
  }
  CHECK_THROWS_AS(Frame(Eigen::MatrixXd::Zero(3, 2)), InvalidParameter);
}

TEST_CASE("fixture frames") {
  const FixturePaths fx = fixture_paths();
  CHECK(fx.regular(0.0).M.col(0) == Eigen::VectorXd(Eigen::Vector4d(0, 1, 2, 0)));
  CHECK(fx.nonregular(0.0).M.col(0) == Eigen::VectorXd(e(2)));
  for (double s : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
    CHECK(is_lagrangian(fx.regular(s)).lagrangian);
    CHECK(is_lagrangian(fx.nonregular(s)).lagrangian);
  }
}

TEST_CASE("plucker coordinates") {
  const Plucker p12 = plucker(cols({e(1), e(2)}));
  CHECK(p12[0] == 1.0);
  CHECK(p12.tail(5).isZero(0.0));
  const Plucker s = plucker(sandwich_frame());
  CHECK(s[3] == 1.0);
  CHECK((s - Plucker::Unit(3)).isZero(0.0));
  CHECK_THROWS_AS(plucker(cols({e(1), 2.0 * e(1)})), NumericalError);

  std::mt19937 rng(9);
  const FixturePaths fx = fixture_paths();
  Eigen::Matrix2d pos, neg;
  pos << 1.5, 0.2, -0.7, 0.9;
  neg << 0.0, 1.0, 1.0, 0.0;
  for (int i = 0; i < 50; ++i) {
    const Frame F = i % 2 ? fx.regular(-1.0 + 0.04 * i)
                          : Frame(testing::random_symplectic(rng, 2) * sandwich_frame().M);
    const Plucker P = plucker(F);
    CHECK(std::abs(P.norm() - 1.0) < 1e-12);
    CHECK(std::abs(plucker_relation(P)) < 1e-12);
    CHECK((plucker(Frame(F.M * pos)) - P).norm() < 1e-12);
    CHECK((plucker(Frame(F.M * neg)) + P).norm() < 1e-12);
    CHECK((canonical_sign(plucker(Frame(F.M * neg))) - canonical_sign(P)).norm() < 1e-12);
  }
  CHECK(canonical_sign(-p12)[0] == 1.0);
  CHECK(align_sign(-s, s) == s);
}

TEST_CASE("sandwich train region") {
  CHECK(sandwich_train_projection_test({0, 0, 0}));
  CHECK(sandwich_train_projection_test({-1, 0, 0}));
  CHECK(sandwich_train_projection_test({1, 0, 0}));
  CHECK(sandwich_train_projection_test({0.5, 0.5, 0}));
  CHECK_FALSE(sandwich_train_projection_test({0, 0, 0.5}));
  CHECK_FALSE(sandwich_train_projection_test({0, 0.3, 0}));
  CHECK_FALSE(sandwich_train_projection_test({1.01, 0, 0}));
}

TEST_CASE("plucker export") {
  std::ostringstream o;
  write_plucker_csv(o, {0.0, 1.0}, {Plucker::Unit(0), Plucker::Unit(3)});
  CHECK(o.str().rfind("t,P12,P13,P14,P23,P24,P34\n", 0) == 0);
  CHECK_THROWS_AS(write_plucker_csv(o, {0.0}, {}), InvalidParameter);
}

TEST_CASE("graph matrix") {
  const FixturePaths fx = fixture_paths();
  const Frame W = cols({e(3), e(4)});
  const Eigen::MatrixXd A0 = graph_matrix(fx.nonregular, 0.0, W, 0.0);
  CHECK((A0 * fx.nonregular(0.0).M).norm() < 1e-14);

  for (double s : {-0.5, -0.1, 0.2, 0.8}) {
    const Eigen::MatrixXd A = graph_matrix(fx.nonregular, 0.0, W, s);
    CHECK(A(2, 1) == doctest::Approx(-s).epsilon(1e-12));
    CHECK(A(3, 0) == doctest::Approx(-s).epsilon(1e-12));
    CHECK(A(3, 1) == doctest::Approx(-s * s * s / 3).epsilon(1e-12));
    CHECK(A.topRows(2).norm() < 1e-12);
    // v + A v lies in l(s).
    const Eigen::MatrixXd L0 = fx.nonregular(0.0).M;
    const Eigen::MatrixXd img = L0 + A * L0;
    const Frame Ls = orthonormalize(fx.nonregular(s));
    CHECK((img - Ls.M * (Ls.M.transpose() * img)).norm() < 1e-12);
  }
  CHECK_THROWS_AS(graph_matrix(fx.nonregular, 0.0, fx.nonregular(0.0), 0.0), NumericalError);
}

TEST_CASE("crossing forms of the fixtures") {
  const FixturePaths fx = fixture_paths();
  Eigen::VectorXd v1(4);
  v1 << 0, 1, 2, 0;
  CHECK(quadratic_form(fx.regular, 0.0, cols({e(1), e(4)}), v1, 1) ==
        doctest::Approx(-4.0).epsilon(1e-10));

  const Frame W2 = cols({e(3), e(4)});
  const Eigen::VectorXd v2 = e(2);
  CHECK(std::abs(quadratic_form(fx.nonregular, 0.0, W2, v2, 1)) < 1e-8);
  CHECK(std::abs(quadratic_form(fx.nonregular, 0.0, W2, v2, 2)) < 1e-8);
  CHECK(std::abs(quadratic_form(fx.nonregular, 0.0, W2, v2, 3) + 2.0) < 1e-8);

  const CrossingFormResult r1 = crossing_form(fx.regular, 0.0, sandwich_frame());
  CHECK(r1.order == 1);
  CHECK(r1.kernel_dim == 1);
  CHECK(r1.q == 1);
  CHECK(r1.p == 0);
  // Unit kernel vector is v1 / sqrt(5).
  CHECK(r1.Qj == doctest::Approx(-0.8).epsilon(1e-8));

  const CrossingFormResult r2 = crossing_form(fx.nonregular, 0.0, sandwich_frame());
  CHECK(r2.order == 3);
  CHECK(r2.q == 1);
  CHECK(r2.Qj == doctest::Approx(-2.0).epsilon(1e-8));
  REQUIRE(r2.lower_norms.size() == 2);
  for (double n : r2.lower_norms) CHECK(n < 1e-8);
}

TEST_CASE("crossing form errors") {
  const FixturePaths fx = fixture_paths();
  try {
    crossing_form(fx.regular, 0.5, sandwich_frame());
    FAIL("expected NotACrossing");
  } catch (const CrossingError& e) {
    CHECK(e.kind == CrossingError::Kind::NotACrossing);
  }
  const LagrangianPath still([](double) { return sandwich_frame(); }, -1.0, 1.0, 0.1);
  try {
    crossing_form(still, 0.0, sandwich_frame());
    FAIL("expected FullyDegenerate");
  } catch (const CrossingError& e) {
    CHECK(e.kind == CrossingError::Kind::FullyDegenerate);
  }
  // Both directions cross, one at first order and one at second.
  const LagrangianPath mixed = graph_path(
      [](double t) { return Eigen::Matrix2d(Eigen::Vector2d(t, t * t).asDiagonal()); }, -1, 1);
  try {
    crossing_form(mixed, 0.0, horizontal());
    FAIL("expected PartiallyDegenerate");
  } catch (const CrossingError& e) {
    CHECK(e.kind == CrossingError::Kind::PartiallyDegenerate);
  }
  CHECK_THROWS_AS(eigenvalue_motion(fx.regular, 0.5, sandwich_frame(), cols({e(1), e(4)}), {0.5}),
                  CrossingError);
}

TEST_CASE("eigenvalue motion on the fixtures") {
  const FixturePaths fx = fixture_paths();
  const Frame W1 = cols({e(1), e(4)});
  auto lam = [&](double s) { return eigenvalue_motion(fx.regular, 0.0, sandwich_frame(), W1, {s})[0][0]; };
  CHECK(derivative_richardson(lam, 0.0, 1, 1e-2) == doctest::Approx(-0.8).epsilon(1e-8));

  const Frame W2 = cols({e(3), e(4)});
  for (int i = -10; i <= 10; ++i) {
    const double s = 0.05 * i;
    const auto ev = eigenvalue_motion(fx.nonregular, 0.0, sandwich_frame(), W2, {s})[0];
    REQUIRE(ev.size() == 1);
    CHECK(std::abs(ev[0] + s * s * s / 3) < 1e-8);
  }
}

TEST_CASE("spectral flow agrees with the crossing sign") {
  const FixturePaths fx = fixture_paths();
  const Frame W2 = cols({e(3), e(4)});
  const auto ev = eigenvalue_motion(fx.nonregular, 0.0, sandwich_frame(), W2, {-0.1, 0.1});
  const double q3 = crossing_form(fx.nonregular, 0.0, sandwich_frame()).Qj;
  CHECK(ev[0][0] * ev[1][0] < 0.0);
  CHECK((ev[1][0] - ev[0][0]) * q3 > 0.0);
}

TEST_CASE("crossing forms match the graph oracle") {
  std::mt19937 rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::MatrixXd S1 = testing::random_symmetric(rng, 2);
    const Eigen::MatrixXd S2 = testing::random_symmetric(rng, 2);
    const Eigen::MatrixXd S3 = testing::random_symmetric(rng, 2);
    // S(t) = t S1 + t^2 S2 + t^3 S3, singular at t = 0 on the whole plane.
    const LagrangianPath path = graph_path(
        [=](double t) { return Eigen::Matrix2d(t * S1 + t * t * S2 + t * t * t * S3); }, -1, 1);
    const Frame W = cols({e(3), e(4)});
    std::normal_distribution<double> G;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(4);
    v[0] = G(rng);
    v[1] = G(rng);
    const Eigen::Vector2d x = v.head(2);
    CHECK(std::abs(quadratic_form(path, 0.0, W, v, 1) - x.dot(S1 * x)) < 1e-8);
    CHECK(std::abs(quadratic_form(path, 0.0, W, v, 2) - 2.0 * x.dot(S2 * x)) < 1e-8);
    CHECK(std::abs(quadratic_form(path, 0.0, W, v, 3) - 6.0 * x.dot(S3 * x)) < 1e-7);
  }
}

TEST_CASE("first-order forms do not depend on the transverse plane") {
  std::mt19937 rng(33);
  const FixturePaths fx = fixture_paths();
  Eigen::VectorXd v1(4);
  v1 << 0, 1, 2, 0;
  const double base = quadratic_form(fx.regular, 0.0, cols({e(1), e(4)}), v1, 1);
  int tried = 0;
  for (int rep = 0; rep < 12; ++rep) {
    const Frame W(testing::random_symplectic(rng, 2) *
                  vertical_graph(testing::random_symmetric(rng, 2, 0.5)).M);
    Eigen::Matrix4d T;
    T << orthonormalize(fx.regular(0.0)).M, orthonormalize(W).M;
    if (std::abs(T.determinant()) < 1e-2) continue;
    ++tried;
    CHECK(std::abs(quadratic_form(fx.regular, 0.0, W, v1, 1) - base) < 1e-7);
  }
  CHECK(tried >= 8);
}

TEST_CASE("higher-order forms on planes W = {(T y, y)}") {
  // l2(0) is the horizontal plane and l2(s) is the graph of
  // S(s) = [[0, -s], [-s, -s^3/3]].  Over W_T the form on e2 is
  // e2^T S (I - T S)^{-1} e2 = -s^3/3 + T11 s^2 - 2 T11 T12 s^3 + O(s^4),
  // so the orders above one only agree across W when T11 = 0.
  std::mt19937 rng(35);
  const FixturePaths fx = fixture_paths();
  const Eigen::VectorXd v2 = e(2);
  for (int rep = 0; rep < 6; ++rep) {
    Eigen::Matrix2d T = testing::random_symmetric(rng, 2, 0.5);
    const Frame W = vertical_graph(T);
    CHECK(std::abs(quadratic_form(fx.nonregular, 0.0, W, v2, 1)) < 1e-7);
    CHECK(std::abs(quadratic_form(fx.nonregular, 0.0, W, v2, 2) - 2.0 * T(0, 0)) < 1e-7);
    CHECK(std::abs(quadratic_form(fx.nonregular, 0.0, W, v2, 3) -
                   (-2.0 - 12.0 * T(0, 0) * T(0, 1))) < 1e-7);

    T(0, 0) = 0.0;
    const Frame W0 = vertical_graph(T);
    for (int j = 1; j <= 3; ++j)
      CHECK(std::abs(quadratic_form(fx.nonregular, 0.0, W0, v2, j) -
                     quadratic_form(fx.nonregular, 0.0, cols({e(3), e(4)}), v2, j)) < 1e-7);
  }
}

TEST_CASE("crossing forms are symplectic invariants") {
  std::mt19937 rng(44);
  const FixturePaths fx = fixture_paths();
  Eigen::VectorXd v1(4);
  v1 << 0, 1, 2, 0;
  const Eigen::VectorXd v2 = e(2);
  const Frame W1 = cols({e(1), e(4)}), W2 = cols({e(3), e(4)});
  const Eigen::MatrixXd J = symplectic_J(2);
  for (int rep = 0; rep < 6; ++rep) {
    const Eigen::MatrixXd Psi = testing::random_symplectic(rng, 2);
    REQUIRE((Psi.transpose() * J * Psi - J).norm() < 1e-12);
    const LagrangianPath r = transformed(fx.regular, Psi);
    const LagrangianPath n = transformed(fx.nonregular, Psi);
    CHECK(std::abs(quadratic_form(r, 0.0, Frame(Psi * W1.M), Psi * v1, 1) + 4.0) < 1e-7);
    for (int j = 1; j <= 3; ++j)
      CHECK(std::abs(quadratic_form(n, 0.0, Frame(Psi * W2.M), Psi * v2, j) -
                     quadratic_form(fx.nonregular, 0.0, W2, v2, j)) < 1e-7);

    const Frame ref(Psi * sandwich_frame().M);
    const CrossingFormResult cr = crossing_form(r, 0.0, ref);
    CHECK(cr.order == 1);
    CHECK(cr.p - cr.q == -1);
    const CrossingFormResult cn = crossing_form(n, 0.0, ref, {}, Frame(Psi * W2.M));
    CHECK(cn.order == 3);
    CHECK(cn.p - cn.q == -1);
    CHECK(maslov_index(r, ref).index == -1.0);
    CHECK(maslov_index(n, ref).signature_index == -1.0);
  }
}

TEST_CASE("maslov index is invariant under orthogonal symplectic maps") {
  std::mt19937 rng(45);
  std::normal_distribution<double> G;
  const FixturePaths fx = fixture_paths();
  for (int rep = 0; rep < 6; ++rep) {
    // A + iB unitary gives the orthogonal symplectic [[A, -B], [B, A]].
    Eigen::Matrix2cd Z;
    for (int i = 0; i < 4; ++i) Z(i / 2, i % 2) = {G(rng), G(rng)};
    const Eigen::Matrix2cd Q = Eigen::HouseholderQR<Eigen::Matrix2cd>(Z).householderQ();
    Eigen::MatrixXd Psi(4, 4);
    Psi << Q.real(), -Q.imag(), Q.imag(), Q.real();
    const Frame ref(Psi * sandwich_frame().M);
    const MaslovResult m = maslov_index(transformed(fx.nonregular, Psi), ref);
    CHECK(m.index == -1.0);
    CHECK(m.signature_index == -1.0);
    REQUIRE(m.ledger.size() == 1);
    CHECK(m.ledger[0].order == 3);
  }
}

TEST_CASE("maslov index of the fixtures") {
  const FixturePaths fx = fixture_paths();
  const MaslovResult m1 = maslov_index(fx.regular, sandwich_frame());
  CHECK(m1.index == -1.0);
  REQUIRE(m1.ledger.size() == 1);
  CHECK(std::abs(m1.ledger[0].t) < 1e-10);
  CHECK(m1.ledger[0].order == 1);

  const MaslovResult m2 = maslov_index(fx.nonregular, sandwich_frame());
  CHECK(m2.index == -1.0);
  REQUIRE(m2.ledger.size() == 1);
  CHECK(m2.ledger[0].order == 3);
  CHECK(m2.ledger[0].contribution == -1.0);
  CHECK(m1.signature_index == -1.0);
  CHECK(m2.signature_index == -1.0);

  const LagrangianPath away(fx.regular, 0.2, 1.0, 0.01);
  CHECK(maslov_index(away, sandwich_frame()).index == 0.0);
  CHECK(maslov_index(away, sandwich_frame()).ledger.empty());
}

TEST_CASE("endpoint crossings contribute halves and indices add") {
  const FixturePaths fx = fixture_paths();
  for (const LagrangianPath* p : {&fx.regular, &fx.nonregular}) {
    const LagrangianPath left(*p, -1.0, 0.0, 0.01), right(*p, 0.0, 1.0, 0.01);
    const MaslovResult ml = maslov_index(left, sandwich_frame());
    const MaslovResult mr = maslov_index(right, sandwich_frame());
    CHECK(ml.index == -0.5);
    CHECK(mr.index == -0.5);
    REQUIRE(ml.ledger.size() == 1);
    CHECK(ml.ledger[0].endpoint);
    CHECK(ml.signature_index == ml.index);
    CHECK(mr.signature_index == mr.index);
    CHECK(ml.index + mr.index == maslov_index(*p, sandwich_frame()).index);
  }

  // Second-order touch: no interior contribution, cancelling endpoint halves.
  const LagrangianPath touch = graph_path(
      [](double t) { return Eigen::Matrix2d(Eigen::Vector2d(t * t, 1.0).asDiagonal()); }, -1, 1);
  const MaslovResult mt = maslov_index(touch, horizontal());
  CHECK(mt.index == 0.0);
  REQUIRE(mt.ledger.size() == 1);
  CHECK(mt.ledger[0].order == 2);
  const double a = maslov_index(LagrangianPath(touch, -1.0, 0.0, 0.01), horizontal()).index;
  const double b = maslov_index(LagrangianPath(touch, 0.0, 1.0, 0.01), horizontal()).index;
  CHECK(a == -b);
  CHECK(std::abs(a) == 0.5);
  CHECK(maslov_index(LagrangianPath(touch, -1.0, 0.0, 0.01), horizontal()).signature_index == a);
}

TEST_CASE("maslov index counts eigenvalue sign changes of a graph path") {
  // For graph(S(t)) against the horizontal plane the index is
  // n+(S(b)) - n+(S(a)); both counts must reproduce it, in any symplectic
  // coordinates for the signature count.
  std::mt19937 rng(46);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto npos = [](const Eigen::Matrix2d& S) {
    return static_cast<int>((Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(S).eigenvalues().array() > 0).count());
  };
  for (int rep = 0; rep < 24; ++rep) {
    const double c0 = U(rng), c1 = U(rng), c3 = U(rng), d0 = 2 * U(rng), d1 = U(rng);
    const double th0 = U(rng), th1 = U(rng);
    const bool degenerate = rep % 2;
    auto S = [=](double t) {
      const double a = degenerate ? c3 * t * t * t : c1 * t + c3 * t * t * t;
      const double b = degenerate ? c0 * t : 0.0;
      Eigen::Matrix2d R, D;
      R << std::cos(th0 + th1 * t), -std::sin(th0 + th1 * t), std::sin(th0 + th1 * t),
          std::cos(th0 + th1 * t);
      D << a, b, b, d0 + d1 * t;
      return Eigen::Matrix2d(R * D * R.transpose());
    };
    const LagrangianPath path = graph_path(S, -0.7, 0.9);
    const double want = npos(S(0.9)) - npos(S(-0.7));
    const MaslovResult m = maslov_index(path, horizontal());
    CHECK(m.index == want);
    CHECK(m.signature_index == want);

    const Eigen::MatrixXd Psi = testing::random_symplectic(rng, 2);
    CHECK(maslov_index(transformed(path, Psi), Frame(Psi * horizontal().M)).signature_index == want);
  }

  const LagrangianPath up = graph_path(
      [](double t) { return Eigen::Matrix2d(Eigen::Vector2d(t - 0.3, t + 0.45).asDiagonal()); }, -1, 1);
  CHECK(maslov_index(up, horizontal()).index == 2.0);
}

TEST_CASE("signature helper") {
  CHECK(signature(Eigen::Vector3d(1.0, -2.0, 3.0).asDiagonal().toDenseMatrix()) == 1);
  CHECK(signature(Eigen::Vector3d(1e-12, -2.0, 3.0).asDiagonal().toDenseMatrix(), 1) == 0);
}
