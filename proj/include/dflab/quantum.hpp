#pragma once

#include "dflab/core.hpp"

#include <string>
#include <vector>

namespace dflab {

/// Projective measurement for one setting: projectors indexed by outcome.
struct ProjectorFamily {
  std::string setting;
  std::vector<Matrix> projectors;

  /// Throws InvalidArgument unless every P is a Hermitian idempotent and the
  /// family sums to the identity.
  void validate(double tol) const;
};

/// State plus one projector family per setting for each party. Alice's and
/// Bob's projectors must commute pairwise.
struct QuantumModel {
  Matrix rho;
  std::vector<ProjectorFamily> alice;
  std::vector<ProjectorFamily> bob;

  std::size_t hilbert_dim() const { return static_cast<std::size_t>(rho.rows()); }
  void validate(const Tolerances& tol = {}) const;
};

/// History space (a_1..a_n, b_1..b_m) of a model: one property per setting.
SpacePtr model_history_space(const QuantumModel& model);

/// D(w|w') = tr{E(a) F(b) rho F(b')^dagger E(a')^dagger}, with E(a) the
/// product of Alice's projectors in ascending setting order (likewise F).
DecoherenceFunctional quantum_df(const QuantumModel& model, const Tolerances& tol = {});

/// E_a = |a><a| (a < m) and F_0 = (1/m) sum_jk |j><k|, F_1 = I - F_0.
ProjectorFamily dv_position_family(std::size_t m);
ProjectorFamily dv_uniform_family(std::size_t m);

/// D_v(a,b|a',b') = <v|E_a' F_b' F_b E_a|v> over histories (a, b), index 2a+b.
/// Built from the operator products, never from the closed form.
DecoherenceFunctional dv_family(const Vector& v, const Tolerances& tol = {});

/// (1/m)|v><v| (x) |0><0| + (sum_a |<v|a>|^2 |a><a| - (1/m)|v><v|) (x) |1><1|.
Matrix dv_closed_form(const Vector& v, const Tolerances& tol = {});

struct ContractionResult {
  Matrix reduced;      // tr_B{|w><w| (I_A (x) D_v)}, m x m
  Matrix expected;     // (1/m)|v*><v*|
  double deviation = 0.0;
  bool matches = false;
};

/// Partial trace over B of |w><w| (I_A (x) D_v) with |w> = sum_a |a>_A |a,0>_B.
ContractionResult contraction_check(const Vector& v, const Tolerances& tol = {});

/// Flat index of history (a, (a,0)) in the product of an m-history space with
/// the 2m histories of D_v.
std::vector<std::size_t> contraction_witness_indices(std::size_t m);

}  // namespace dflab
