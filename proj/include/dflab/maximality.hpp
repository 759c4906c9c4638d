#pragma once

#include "dflab/axioms.hpp"
#include "dflab/core.hpp"

#include <cstdint>
#include <optional>
#include <utility>

namespace dflab {

/// Minimal eigenpair; the eigenvector's first non-negligible component is
/// real positive.
std::pair<double, Vector> min_eig_witness(const DecoherenceFunctional& d, const Tolerances& tol = {});

struct Lemma2Partner {
  DecoherenceFunctional partner;  // D_{v*}, 2m histories
  Event witness;                  // ones at (a, (a,0)) on space(D) x space(D_{v*})
  Vector v;                       // canonical minimal eigenvector of D
  double min_eigenvalue = 0.0;
};

/// Quantum partner D_{v*} whose composition with a non-SP D breaks positivity.
/// Throws InvalidArgument when D is strongly positive.
Lemma2Partner counterexample_partner(const DecoherenceFunctional& d, const Tolerances& tol = {});

struct Lemma2Report {
  std::size_t input_dim = 0;
  double min_eigenvalue = 0.0;
  Vector v;
  DecoherenceFunctional partner;
  Event witness;
  double lhs = 0.0;  // <w|D (x) D'|w> on the materialized composition
  double rhs = 0.0;  // (1/m) <v|D|v>
  bool matched = false;
  bool violated = false;
  /// Block-reduced weak positivity of the composition when its blocks are
  /// small enough to enumerate.
  std::optional<PositivityReport> composed_positivity;
  Tolerances tolerances;
};

Lemma2Report verify_lemma2(const DecoherenceFunctional& d, const Tolerances& tol = {},
                           const PositivityOptions& options = {});

/// Hermitian with real, non-negative entries.
bool is_nonneg_hermitian(const Matrix& m, double tol);
bool is_nonneg_hermitian(const DecoherenceFunctional& d, const Tolerances& tol = {});

struct NondecoheringPartition {
  std::size_t property = 0;
  Partition partition;
  std::pair<std::size_t, std::size_t> values;  // (b_k, c_k)
  std::pair<std::size_t, std::size_t> histories;  // (b, c)
  Complex cross_term;  // D(A_{b_k} | A_{c_k})
};

/// For D with non-negative entries on a factored space: the first off-diagonal
/// entry D(b|c) > tol.eq in row-major order, the first property k where b and c
/// differ, and the single-property partition on k, whose cells A_{b_k} and
/// A_{c_k} cannot decohere. Empty iff D is diagonal.
std::optional<NondecoheringPartition> nondecohering_property_partition(const DecoherenceFunctional& d,
                                                                       const Tolerances& tol = {});

/// Partition of a factored space by the value of one property.
Partition property_partition(const SpacePtr& space, std::size_t property);

struct PnnViolation {
  Matrix partner;  // [[1, t], [t, s]]
  double t = 0.0;
  double s = 0.0;
  std::vector<std::size_t> indices;  // binary vector on the product space
  double value = 0.0;
};

struct PnnSearchOptions {
  int min_exponent = -6;
  int max_exponent = 12;
  std::uint64_t budget = 1'000'000;
  unsigned workers = 1;
};

/// Best-effort search for a partner [[1, t], [t, s]] in the non-negative class
/// making M (x) partner fail binary-vector positivity. t runs over the grid in
/// the outer loop, s in the inner loop; the first hit is reported. Empty when
/// the grid or budget runs out.
std::optional<PnnViolation> pnn_violation_search(const Matrix& m, const Tolerances& tol = {},
                                                 const PnnSearchOptions& options = {});

}  // namespace dflab
