#include "dflab/maximality.hpp"

#include "dflab/compose.hpp"
#include "dflab/quantum.hpp"

#include <algorithm>
#include <cmath>

namespace dflab {

std::pair<double, Vector> min_eig_witness(const DecoherenceFunctional& d, const Tolerances& tol) {
  const auto rep = check_strong_positivity(d, tol);
  return {rep.min_eigenvalue, rep.min_eigenvector};
}

Lemma2Partner counterexample_partner(const DecoherenceFunctional& d, const Tolerances& tol) {
  auto [lambda_min, v] = min_eig_witness(d, tol);
  if (lambda_min >= -tol.pos) throw InvalidArgument("functional is strongly positive; no partner exists");
  const std::size_t m = d.dim();
  if (m < 2) throw InvalidArgument("partner construction needs at least two histories");
  auto partner = dv_family(v.conjugate(), tol);
  const auto space = space_product(d.space(), partner.space());
  std::vector<std::size_t> ones = contraction_witness_indices(m);
  return {std::move(partner), Event::from_indices(space, ones), std::move(v), lambda_min};
}

Lemma2Report verify_lemma2(const DecoherenceFunctional& d, const Tolerances& tol,
                           const PositivityOptions& options) {
  auto p = counterexample_partner(d, tol);
  const auto composed = tensor(d, p.partner);
  const std::size_t m = d.dim();

  Lemma2Report rep{m, p.min_eigenvalue, p.v, p.partner, p.witness, 0.0, 0.0, false, false, std::nullopt, tol};
  rep.lhs = df_evaluate(composed, p.witness, p.witness).real();
  rep.rhs = (p.v.dot(d.matrix() * p.v)).real() / static_cast<double>(m);
  rep.matched = std::abs(rep.lhs - rep.rhs) <= tol.eq;
  rep.violated = rep.lhs < -tol.pos;

  auto blocks = detect_blocks(composed, tol);
  const bool small = std::all_of(blocks.blocks.begin(), blocks.blocks.end(),
                                 [](const Block& b) { return b.indices.size() <= kMaxBruteForceDim; });
  if (small) {
    PositivityOptions opt = options;
    opt.blocks = std::move(blocks);
    rep.composed_positivity = check_weak_positivity(composed, tol, Strategy::BlockReduced, opt);
  }
  return rep;
}

bool is_nonneg_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (!check_hermiticity(m, tol).ok) return false;
  return (m.imag().array().abs() <= tol).all() && (m.real().array() >= -tol).all();
}

bool is_nonneg_hermitian(const DecoherenceFunctional& d, const Tolerances& tol) {
  return is_nonneg_hermitian(d.matrix(), tol.eq);
}

Partition property_partition(const SpacePtr& space, std::size_t property) {
  if (!space->factored()) throw InvalidArgument("space is not factored into properties");
  const auto& factors = *space->factors();
  if (property >= factors.size()) throw InvalidArgument("property index out of range");
  std::vector<std::vector<bool>> cells(factors[property].cardinality, std::vector<bool>(space->size(), false));
  for (std::size_t i = 0; i < space->size(); ++i) cells[space->decode(i)[property]][i] = true;
  std::vector<Event> events;
  for (auto& c : cells) events.emplace_back(space, std::move(c));
  return Partition(space, std::move(events));
}

std::optional<NondecoheringPartition> nondecohering_property_partition(const DecoherenceFunctional& d,
                                                                       const Tolerances& tol) {
  if (!d.space()->factored()) throw InvalidArgument("space is not factored into properties");
  if (!is_nonneg_hermitian(d, tol)) throw InvalidArgument("functional has entries outside the non-negative class");
  const auto& m = d.matrix();
  const auto n = d.dim();
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t c = 0; c < n; ++c) {
      if (b == c || m(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c)).real() <= tol.eq) continue;
      const auto tb = d.space()->decode(b);
      const auto tc = d.space()->decode(c);
      std::size_t k = 0;
      while (tb[k] == tc[k]) ++k;
      auto partition = property_partition(d.space(), k);
      const auto cross = df_evaluate(d, partition.cells()[tb[k]], partition.cells()[tc[k]]);
      return NondecoheringPartition{k, std::move(partition), {tb[k], tc[k]}, {b, c}, cross};
    }
  return std::nullopt;
}

std::optional<PnnViolation> pnn_violation_search(const Matrix& m, const Tolerances& tol,
                                                 const PnnSearchOptions& options) {
  if (!check_hermiticity(m, tol.eq).ok) throw InvalidArgument("matrix is not Hermitian");
  if (is_nonneg_hermitian(m, tol.eq)) throw InvalidArgument("matrix already has non-negative entries");
  if (2 * static_cast<std::size_t>(m.rows()) > kMaxBruteForceDim)
    throw InvalidArgument("matrix too large for the enumeration search");

  std::uint64_t remaining = options.budget;
  for (int kt = options.min_exponent; kt <= options.max_exponent; ++kt)
    for (int ks = options.min_exponent; ks <= options.max_exponent; ++ks) {
      if (remaining == 0) return std::nullopt;
      const double t = std::ldexp(1.0, kt), s = std::ldexp(1.0, ks);
      Matrix partner(2, 2);
      partner << 1.0, t, t, s;
      const RealMatrix r = binary_form_matrix(kron(m, partner));
      BinaryScanOptions scan;
      scan.budget = remaining;
      scan.workers = options.workers;
      const auto res = scan_binary_forms(r, -tol.pos, scan);
      if (res.witness_key) {
        PnnViolation out{partner, t, s, {}, res.witness_value};
        const auto dim = static_cast<unsigned>(r.rows());
        for (unsigned i = 0; i < dim; ++i)
          if (*res.witness_key & history_bit(dim, i)) out.indices.push_back(i);
        return out;
      }
      remaining -= res.vectors_checked;
    }
  return std::nullopt;
}

}  // namespace dflab
