#include "dflab/axioms.hpp"

#include "dflab/compose.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dflab {

std::size_t BlockStructure::dim() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.indices.size();
  return n;
}

void verify_blocks(const Matrix& m, const BlockStructure& blocks, double tol) {
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<int> owner(n, -1);
  for (std::size_t b = 0; b < blocks.blocks.size(); ++b) {
    if (blocks.blocks[b].indices.empty()) throw InvalidArgument("empty block in block structure");
    for (auto i : blocks.blocks[b].indices) {
      if (i >= n) throw InvalidArgument("block index out of range");
      if (owner[i] != -1) throw InvalidArgument("blocks overlap at index " + std::to_string(i));
      owner[i] = static_cast<int>(b);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (owner[i] == -1) throw InvalidArgument("blocks do not cover index " + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (owner[i] != owner[j] && std::abs(m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) > tol) {
        std::ostringstream os;
        os << "declared block structure violated: entry (" << i << "," << j << ") = "
           << std::abs(m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        throw InvalidArgument(os.str());
      }
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "Pass";
    case Verdict::Fail: return "Fail";
    case Verdict::Certified: return "Certified";
  }
  return "?";
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::BruteForce: return "BruteForce";
    case Strategy::BlockReduced: return "BlockReduced";
    case Strategy::NormBound: return "NormBound";
  }
  return "?";
}

const char* to_string(DecoherenceMode m) {
  return m == DecoherenceMode::Weak ? "Weak" : "Strong";
}

HermiticityResult check_hermiticity(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw InvalidArgument("matrix is not square");
  const double dev = m.size() ? (m - m.adjoint()).cwiseAbs().maxCoeff() : 0.0;
  return {dev <= tol, dev};
}

HermiticityResult check_hermiticity(const DecoherenceFunctional& d, double tol) {
  return check_hermiticity(d.matrix(), tol);
}

NormalizationResult check_normalization(const DecoherenceFunctional& d, double tol) {
  const Complex value = d.matrix().sum();
  return {std::abs(value - Complex(1.0)) <= tol, value};
}

RealMatrix binary_form_matrix(const Matrix& m) {
  return (0.5 * (m + m.adjoint())).real();
}

namespace {

std::vector<std::size_t> key_indices(unsigned n, std::uint64_t key) {
  std::vector<std::size_t> out;
  for (unsigned i = 0; i < n; ++i)
    if (key & history_bit(n, i)) out.push_back(i);
  return out;
}

PositivityReport brute_force(const DecoherenceFunctional& d, const RealMatrix& r,
                             const Tolerances& tol, const PositivityOptions& options) {
  BinaryScanOptions scan;
  scan.budget = options.budget;
  scan.workers = options.workers;
  const auto res = scan_binary_forms(r, -tol.pos, scan);
  if (!res.complete)
    throw BudgetExhausted("weak positivity budget of " + std::to_string(options.budget) +
                          " vectors exhausted without a verdict");
  PositivityReport rep;
  rep.strategy = Strategy::BruteForce;
  rep.vectors_checked = res.vectors_checked;
  rep.tolerance = tol.pos;
  if (res.witness_key) {
    rep.verdict = Verdict::Fail;
    rep.witness = Event::from_indices(d.space(), key_indices(static_cast<unsigned>(r.rows()), *res.witness_key));
    rep.witness_value = res.witness_value;
  }
  return rep;
}

PositivityReport block_reduced(const DecoherenceFunctional& d, const RealMatrix& r,
                               const Tolerances& tol, const PositivityOptions& options) {
  if (!options.blocks) throw InvalidArgument("block-reduced strategy needs a block structure");
  verify_blocks(d.matrix(), *options.blocks, tol.eq);
  PositivityReport rep;
  rep.strategy = Strategy::BlockReduced;
  rep.tolerance = tol.pos;
  std::uint64_t remaining = options.budget;
  const auto& blocks = options.blocks->blocks;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& idx = blocks[b].indices;
    const auto k = static_cast<Eigen::Index>(idx.size());
    RealMatrix sub(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        sub(i, j) = r(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]),
                      static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
    BinaryScanOptions scan;
    scan.budget = remaining;
    scan.workers = options.workers;
    const auto res = scan_binary_forms(sub, -tol.pos, scan);
    rep.vectors_checked += res.vectors_checked;
    if (res.witness_key) {
      std::vector<std::size_t> global;
      for (auto local : key_indices(static_cast<unsigned>(k), *res.witness_key)) global.push_back(idx[local]);
      std::sort(global.begin(), global.end());
      rep.verdict = Verdict::Fail;
      rep.witness = Event::from_indices(d.space(), global);
      rep.witness_value = res.witness_value;
      rep.witness_block = std::vector<std::size_t>{b};
      return rep;
    }
    if (!res.complete)
      throw BudgetExhausted("weak positivity budget exhausted in block " + blocks[b].label);
    remaining -= res.vectors_checked;
  }
  return rep;
}

// For u binary, u^T R u >= sum_{i in S} (R_ii + sum_{j != i} min(0, R_ij)).
bool row_certificate(const RealMatrix& r, double tol) {
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    double row = r(i, i);
    for (Eigen::Index j = 0; j < r.cols(); ++j)
      if (j != i) row += std::min(0.0, r(i, j));
    if (row < -tol) return false;
  }
  return true;
}

}  // namespace

PositivityReport check_weak_positivity(const DecoherenceFunctional& d, const Tolerances& tol,
                                       Strategy strategy, const PositivityOptions& options) {
  const RealMatrix r = binary_form_matrix(d.matrix());
  switch (strategy) {
    case Strategy::BruteForce:
      return brute_force(d, r, tol, options);
    case Strategy::BlockReduced:
      return block_reduced(d, r, tol, options);
    case Strategy::NormBound: {
      const auto spec = spectral_report(d.matrix(), tol);
      if (spec.min_eigenvalue >= -tol.pos || row_certificate(r, tol.pos)) {
        PositivityReport rep;
        rep.verdict = Verdict::Certified;
        rep.strategy = Strategy::NormBound;
        rep.tolerance = tol.pos;
        return rep;
      }
      if (d.dim() > kMaxBruteForceDim)
        throw InvalidArgument("no norm certificate and dimension too large for enumeration");
      return brute_force(d, r, tol, options);
    }
  }
  throw InvalidArgument("unknown strategy");
}

SpectralReport spectral_report(const Matrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols() || m.rows() == 0) throw InvalidArgument("spectral check needs a square matrix");
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw Error("Hermitian eigensolver did not converge within its iteration cap");
  SpectralReport rep;
  rep.min_eigenvalue = es.eigenvalues()(0);
  Vector v = es.eigenvectors().col(0);
  v.normalize();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > tol.eq) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = std::abs(v(i));
      break;
    }
  }
  rep.min_eigenvector = v;
  rep.residual = (h * v - rep.min_eigenvalue * v).norm();
  rep.is_sp = rep.min_eigenvalue >= -tol.pos;
  const double bound = tol.spec * std::max(h.norm(), 1e-300);
  if (rep.residual > bound && rep.residual > tol.eq) {
    std::ostringstream os;
    os << "eigen residual " << rep.residual << " exceeds " << bound;
    throw Error(os.str());
  }
  return rep;
}

SpectralReport check_strong_positivity(const DecoherenceFunctional& d, const Tolerances& tol) {
  const auto herm = check_hermiticity(d, tol.eq);
  if (!herm.ok) throw InvalidArgument("strong positivity needs a Hermitian matrix");
  return spectral_report(d.matrix(), tol);
}

DecoherenceReport check_partition_decoherence(const DecoherenceFunctional& d,
                                              const Partition& partition, DecoherenceMode mode,
                                              const Tolerances& tol) {
  if (!same_space(partition.space(), d.space()))
    throw InvalidArgument("partition is over a different history space");
  const auto n = static_cast<Eigen::Index>(d.dim());
  const auto k = static_cast<Eigen::Index>(partition.size());
  RealMatrix cells = RealMatrix::Zero(n, k);
  for (Eigen::Index c = 0; c < k; ++c) cells.col(c) = partition.cells()[static_cast<std::size_t>(c)].vector();
  const Matrix gram = cells.transpose().cast<Complex>() * d.matrix() * cells.cast<Complex>();

  DecoherenceReport rep;
  rep.mode = mode;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      if (i == j) continue;
      const double off = mode == DecoherenceMode::Weak ? std::abs(gram(i, j).real()) : std::abs(gram(i, j));
      rep.max_off_diagonal = std::max(rep.max_off_diagonal, off);
    }
  if (rep.max_off_diagonal > tol.eq) return rep;

  std::vector<double> p(static_cast<std::size_t>(k));
  double total = 0.0;
  bool nonneg = true;
  for (Eigen::Index i = 0; i < k; ++i) {
    p[static_cast<std::size_t>(i)] = gram(i, i).real();
    total += gram(i, i).real();
    nonneg = nonneg && gram(i, i).real() >= -tol.pos;
  }
  rep.probabilities = std::move(p);
  rep.verdict = nonneg && std::abs(total - 1.0) <= tol.eq;
  return rep;
}

ValidationReport validate_df(const DecoherenceFunctional& d, const Tolerances& tol,
                             const PositivityOptions& options) {
  ValidationReport rep;
  rep.tolerances = tol;
  rep.hermiticity = check_hermiticity(d, tol.eq);
  rep.normalization = check_normalization(d, tol.eq);
  if (!rep.hermiticity.ok) return rep;

  if (d.dim() <= kMaxBruteForceDim) {
    rep.weak_positivity = check_weak_positivity(d, tol, Strategy::BruteForce, options);
  } else {
    auto blocks = detect_blocks(d, tol);
    bool small = std::all_of(blocks.blocks.begin(), blocks.blocks.end(),
                             [](const Block& b) { return b.indices.size() <= kMaxBruteForceDim; });
    if (small) {
      PositivityOptions opt = options;
      opt.blocks = std::move(blocks);
      rep.weak_positivity = check_weak_positivity(d, tol, Strategy::BlockReduced, opt);
    } else {
      rep.weak_positivity = check_weak_positivity(d, tol, Strategy::NormBound, options);
    }
  }
  rep.strong_positivity = spectral_report(d.matrix(), tol);

  rep.level = ValidationLevel::Hermitian;
  if (rep.normalization.ok) {
    rep.level = ValidationLevel::Normalized;
    if (rep.weak_positivity->passed()) {
      rep.level = ValidationLevel::WeaklyPositive;
      if (rep.strong_positivity->is_sp) rep.level = ValidationLevel::StronglyPositive;
    }
  }
  return rep;
}

}  // namespace dflab
