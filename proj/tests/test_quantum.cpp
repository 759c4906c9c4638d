#include "dflab/axioms.hpp"
#include "dflab/bell.hpp"
#include "dflab/compose.hpp"
#include "dflab/quantum.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

using namespace dflab;

namespace {

/// Entry-by-entry trace formula with explicit operator products; `reverse`
/// multiplies each side's projectors in descending setting order.
Matrix oracle_quantum_df(const QuantumModel& model, bool reverse) {
  const auto d = model.hilbert_dim();
  std::vector<std::size_t> radix;
  for (const auto& f : model.alice) radix.push_back(f.projectors.size());
  for (const auto& f : model.bob) radix.push_back(f.projectors.size());
  std::size_t total = 1;
  for (auto r : radix) total *= r;
  auto ops = [&](std::size_t index) {
    std::vector<std::size_t> digits(radix.size());
    for (std::size_t k = radix.size(); k-- > 0;) {
      digits[k] = index % radix[k];
      index /= radix[k];
    }
    Matrix e = Matrix::Identity(d, d), f = Matrix::Identity(d, d);
    const auto na = model.alice.size(), nb = model.bob.size();
    for (std::size_t x = 0; x < na; ++x) {
      const auto xi = reverse ? na - 1 - x : x;
      e = e * model.alice[xi].projectors[digits[xi]];
    }
    for (std::size_t y = 0; y < nb; ++y) {
      const auto yi = reverse ? nb - 1 - y : y;
      f = f * model.bob[yi].projectors[digits[na + yi]];
    }
    return Matrix(e * f);
  };
  Matrix out(total, total);
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = 0; j < total; ++j) {
      const Matrix k = ops(i), kp = ops(j);
      out(i, j) = (k * model.rho * kp.adjoint()).trace();
    }
  return out;
}

}  // namespace

TEST_CASE("quantum_df matches the trace formula and is strongly positive") {
  testing::Rng rng(7);
  for (int trial = 0; trial < 15; ++trial) {
    const auto model = testing::random_product_model(rng, 2, trial % 2 ? 4 : 2);
    auto d = quantum_df(model);
    CHECK((d.matrix() - oracle_quantum_df(model, false)).norm() < 1e-12);
    CHECK(check_hermiticity(d, 1e-12).ok);
    const auto v = validate_df(d);
    CHECK(v.level == ValidationLevel::StronglyPositive);
  }
}

TEST_CASE("quantum_df is order independent when same-side projectors commute") {
  testing::Rng rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    // Alice's two settings are diagonal in one shared basis, Bob's in another.
    QuantumModel model;
    const Eigen::Index da = 4, db = 2;
    model.rho = rng.density(da * db);
    const Matrix ua = rng.unitary(da), ub = rng.unitary(db);
    const Matrix ia = Matrix::Identity(da, da), ib = Matrix::Identity(db, db);
    for (int x = 0; x < 2; ++x) {
      Matrix pa = Matrix::Zero(da, da);
      for (Eigen::Index k = 0; k < da; ++k)
        if (rng.integer(0, 1)) pa += ua.col(k) * ua.col(k).adjoint();
      model.alice.push_back({"x", {kron(pa, ib), kron(Matrix(ia - pa), ib)}});
      Matrix pb = Matrix::Zero(db, db);
      pb += ub.col(x % 2) * ub.col(x % 2).adjoint();
      model.bob.push_back({"y", {kron(ia, pb), kron(ia, Matrix(ib - pb))}});
    }
    auto d = quantum_df(model);
    CHECK((d.matrix() - oracle_quantum_df(model, true)).norm() < 1e-12);
  }
}

TEST_CASE("quantum_df on a pure product state with rank-1 projectors is diagonal") {
  QuantumModel model;
  Vector psi = Vector::Zero(4);
  psi(0) = std::sqrt(0.3);
  psi(1) = std::sqrt(0.7);  // |0>(sqrt(.3)|0> + sqrt(.7)|1>)
  model.rho = psi * psi.adjoint();
  const Matrix i2 = Matrix::Identity(2, 2);
  Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  model.alice.push_back({"x", {kron(p0, i2), kron(p1, i2)}});
  model.bob.push_back({"y", {kron(i2, p0), kron(i2, p1)}});
  auto d = quantum_df(model);
  Matrix off = d.matrix();
  off.diagonal().setZero();
  CHECK(off.norm() < 1e-14);
  CHECK(d.matrix()(0, 0).real() == doctest::Approx(0.3));
  CHECK(d.matrix()(1, 1).real() == doctest::Approx(0.7));
}

TEST_CASE("model validation rejects broken inputs") {
  testing::Rng rng(3);
  auto model = testing::random_product_model(rng, 2, 2);
  CHECK_NOTHROW(model.validate());
  auto bad = model;
  bad.rho *= 2.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = model;
  bad.alice[0].projectors[0] *= 0.5;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = model;
  // Alice acting on Bob's factor breaks commutation with Bob's projectors.
  bad.alice[0] = bad.bob[1];
  const Matrix u = rng.unitary(4);
  for (auto& p : bad.alice[0].projectors) p = u * p * u.adjoint();
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("dv_family examples") {
  Vector v(2);
  v << 1, 0;
  auto d = dv_family(v);
  Matrix expect = Matrix::Zero(4, 4);
  expect(0, 0) = 0.5;
  expect(1, 1) = 0.5;
  CHECK((d.matrix() - expect).norm() < 1e-15);
  CHECK((dv_closed_form(v) - expect).norm() < 1e-15);
  CHECK(std::abs(d.matrix().sum() - Complex(1.0)) < 1e-15);

  const auto f = dv_uniform_family(5);
  CHECK_NOTHROW(f.validate(1e-12));
  CHECK_NOTHROW(dv_position_family(5).validate(1e-12));

  Vector u = Vector::Constant(3, 1.0 / std::sqrt(3.0));
  const Matrix c = dv_closed_form(u);
  const Matrix vv = u * u.adjoint() / 3.0;
  for (Eigen::Index a = 0; a < 3; ++a)
    for (Eigen::Index b = 0; b < 3; ++b) {
      CHECK(std::abs(c(2 * a, 2 * b) - vv(a, b)) < 1e-15);
      const Complex second = (a == b ? Complex(1.0 / 3) : Complex(0.0)) - vv(a, b);
      CHECK(std::abs(c(2 * a + 1, 2 * b + 1) - second) < 1e-15);
    }

  Vector un(2);
  un << 1, 1;
  CHECK_THROWS_AS(dv_family(un), InvalidArgument);
  Vector tiny(1);
  tiny << 1;
  CHECK_THROWS_AS(dv_family(tiny), InvalidArgument);
}

TEST_CASE("dv_family equals its closed form and is strongly positive") {
  testing::Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = rng.unit_vector(rng.integer(2, 6));
    auto d = dv_family(v);
    CHECK((d.matrix() - dv_closed_form(v)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(check_strong_positivity(d).is_sp);
    CHECK(std::abs(d.matrix().sum() - Complex(1.0)) < 1e-12);
  }
}

TEST_CASE("contraction identity") {
  Vector v(2);
  v << 1, 0;
  const auto r = contraction_check(v);
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 0.5;
  CHECK((r.reduced - expect).norm() < 1e-15);
  CHECK(r.matches);

  testing::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = rng.integer(2, 6);
    Vector real(m);
    for (Eigen::Index i = 0; i < m; ++i) real(i) = rng.normal();
    real /= real.norm();
    const auto rr = contraction_check(real);
    CHECK(rr.matches);
    CHECK((rr.reduced - rr.reduced.transpose()).norm() < 1e-12);
    CHECK(std::abs(rr.reduced.trace() - Complex(1.0 / m)) < 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(rr.reduced);
    CHECK(es.eigenvalues()(m - 2) < 1e-12);

    const auto c = contraction_check(rng.unit_vector(4));
    CHECK(c.deviation <= 1e-12);
  }
  CHECK(contraction_witness_indices(3) == std::vector<std::size_t>{0, 8, 16});
}
