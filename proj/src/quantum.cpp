#include "dflab/quantum.hpp"

#include "dflab/compose.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace dflab {

namespace {

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void require_unit(const Vector& v, const Tolerances& tol) {
  if (v.size() < 2) throw InvalidArgument("D_v needs a vector of dimension at least 2");
  if (!v.allFinite()) throw InvalidArgument("vector has non-finite entries");
  if (std::abs(v.squaredNorm() - 1.0) > tol.eq) {
    std::ostringstream os;
    os << "vector is not normalized (norm^2 = " << v.squaredNorm() << ")";
    throw InvalidArgument(os.str());
  }
}

}  // namespace

void ProjectorFamily::validate(double tol) const {
  if (projectors.empty()) throw InvalidArgument("projector family '" + setting + "' is empty");
  const auto d = projectors.front().rows();
  Matrix sum = Matrix::Zero(d, d);
  for (std::size_t k = 0; k < projectors.size(); ++k) {
    const auto& p = projectors[k];
    if (p.rows() != d || p.cols() != d)
      throw InvalidArgument("projector " + std::to_string(k) + " of '" + setting + "' has the wrong shape");
    if (max_abs(p - p.adjoint()) > tol)
      throw InvalidArgument("projector " + std::to_string(k) + " of '" + setting + "' is not Hermitian");
    if (max_abs(p * p - p) > tol)
      throw InvalidArgument("projector " + std::to_string(k) + " of '" + setting + "' is not idempotent");
    sum += p;
  }
  if (max_abs(sum - Matrix::Identity(d, d)) > tol)
    throw InvalidArgument("projectors of '" + setting + "' do not sum to the identity");
}

void QuantumModel::validate(const Tolerances& tol) const {
  const auto d = rho.rows();
  if (d == 0 || rho.cols() != d) throw InvalidArgument("density matrix must be square and non-empty");
  if (max_abs(rho - rho.adjoint()) > tol.eq) throw InvalidArgument("density matrix is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0)) > tol.eq) throw InvalidArgument("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || es.eigenvalues()(0) < -tol.pos)
    throw InvalidArgument("density matrix is not positive semidefinite");
  if (alice.empty() || bob.empty()) throw InvalidArgument("each party needs at least one setting");
  for (const auto* side : {&alice, &bob})
    for (const auto& fam : *side) {
      fam.validate(tol.eq);
      if (fam.projectors.front().rows() != d)
        throw InvalidArgument("projectors of '" + fam.setting + "' do not match the state dimension");
    }
  for (const auto& e : alice)
    for (const auto& f : bob)
      for (const auto& pe : e.projectors)
        for (const auto& pf : f.projectors)
          if (max_abs(pe * pf - pf * pe) > tol.eq)
            throw InvalidArgument("settings '" + e.setting + "' and '" + f.setting + "' do not commute");
}

SpacePtr model_history_space(const QuantumModel& model) {
  std::vector<Factor> factors;
  for (std::size_t x = 0; x < model.alice.size(); ++x)
    factors.push_back({"a" + std::to_string(x + 1), model.alice[x].projectors.size()});
  for (std::size_t y = 0; y < model.bob.size(); ++y)
    factors.push_back({"b" + std::to_string(y + 1), model.bob[y].projectors.size()});
  std::size_t size = 1;
  for (const auto& f : factors) {
    size *= f.cardinality;
    if (size > kDenseCap) throw DimensionOverflow("model history space exceeds the dense cap");
  }
  return make_factored_space(factors);
}

DecoherenceFunctional quantum_df(const QuantumModel& model, const Tolerances& tol) {
  model.validate(tol);
  const SpacePtr space = model_history_space(model);
  const auto d = static_cast<Eigen::Index>(model.hilbert_dim());
  const auto h = static_cast<Eigen::Index>(space->size());
  const std::size_t na = model.alice.size();

  // Row w of `ops` is vec(K_w) with K_w = E(a) F(b); row w of `evolved` is
  // vec(K_w rho). Then D(w, w') = <vec(K_w'), vec(K_w rho)>.
  Matrix ops(h, d * d), evolved(h, d * d);
  for (Eigen::Index w = 0; w < h; ++w) {
    const auto tuple = space->decode(static_cast<std::size_t>(w));
    Matrix k = Matrix::Identity(d, d);
    for (std::size_t x = 0; x < na; ++x) k = k * model.alice[x].projectors[tuple[x]];
    for (std::size_t y = 0; y < model.bob.size(); ++y) k = k * model.bob[y].projectors[tuple[na + y]];
    const Matrix kr = k * model.rho;
    ops.row(w) = Eigen::Map<const Eigen::RowVectorXcd>(k.data(), d * d);
    evolved.row(w) = Eigen::Map<const Eigen::RowVectorXcd>(kr.data(), d * d);
  }
  const Matrix dmat = evolved * ops.adjoint();
  return df_from_matrix(dmat, space, true, tol);
}

ProjectorFamily dv_position_family(std::size_t m) {
  ProjectorFamily fam{"E", {}};
  const auto n = static_cast<Eigen::Index>(m);
  for (Eigen::Index a = 0; a < n; ++a) {
    Matrix e = Matrix::Zero(n, n);
    e(a, a) = 1.0;
    fam.projectors.push_back(std::move(e));
  }
  return fam;
}

ProjectorFamily dv_uniform_family(std::size_t m) {
  const auto n = static_cast<Eigen::Index>(m);
  const Matrix f0 = Matrix::Constant(n, n, Complex(1.0 / static_cast<double>(m)));
  return {"F", {f0, Matrix::Identity(n, n) - f0}};
}

DecoherenceFunctional dv_family(const Vector& v, const Tolerances& tol) {
  require_unit(v, tol);
  const auto m = static_cast<std::size_t>(v.size());
  const auto e = dv_position_family(m);
  const auto f = dv_uniform_family(m);
  const auto n = static_cast<Eigen::Index>(2 * m);
  Matrix dmat(n, n);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t ap = 0; ap < m; ++ap)
        for (std::size_t bp = 0; bp < 2; ++bp) {
          const Matrix op = e.projectors[ap] * f.projectors[bp] * f.projectors[b] * e.projectors[a];
          dmat(static_cast<Eigen::Index>(2 * a + b), static_cast<Eigen::Index>(2 * ap + bp)) =
              v.dot(op * v);
        }
  return df_from_matrix(dmat, make_factored_space({{"a", m}, {"b", 2}}), true, tol);
}

Matrix dv_closed_form(const Vector& v, const Tolerances& tol) {
  require_unit(v, tol);
  const auto m = v.size();
  const double inv = 1.0 / static_cast<double>(m);
  const Matrix vv = v * v.adjoint();
  const Matrix second = Matrix(v.cwiseAbs2().cast<Complex>().asDiagonal()) - inv * vv;
  Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  return inv * kron(vv, p0) + kron(second, p1);
}

std::vector<std::size_t> contraction_witness_indices(std::size_t m) {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < m; ++a) out.push_back(a * 2 * m + 2 * a);
  return out;
}

ContractionResult contraction_check(const Vector& v, const Tolerances& tol) {
  const auto dv = dv_family(v, tol);
  const auto m = v.size();
  const auto nb = 2 * m;
  Vector w = Vector::Zero(m * nb);
  for (auto i : contraction_witness_indices(static_cast<std::size_t>(m))) w(static_cast<Eigen::Index>(i)) = 1.0;
  const Matrix x = w * w.adjoint() * kron(Matrix::Identity(m, m), dv.matrix());

  ContractionResult out;
  out.reduced = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = 0; k < nb; ++k) out.reduced(i, j) += x(i * nb + k, j * nb + k);
  const Vector vc = v.conjugate();
  out.expected = (1.0 / static_cast<double>(m)) * vc * vc.adjoint();
  out.deviation = max_abs(out.reduced - out.expected);
  out.matches = out.deviation <= tol.eq;
  return out;
}

}  // namespace dflab
