#pragma once

#include "dflab/axioms.hpp"
#include "dflab/core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace dflab {

/// Parameters of the 4x4 family: lambda > 1, 0 < epsilon <= 1/(1+lambda),
/// and the number n of copies claimed to coexist.
struct Lemma1Params {
  double lambda = 2.0;
  double epsilon = 0.0;
  unsigned n = 1;

  void validate() const;
};

/// (1/2) eps A (x) |0><0| + (1/2)(I - eps A) (x) |1><1| with A = [[1, l], [l, 1]],
/// no parameter checks. History (a, b) sits at index 2a + b.
Matrix lemma1_matrix(double lambda, double epsilon);

/// Validated family member over the factored space {a, b}.
DecoherenceFunctional lemma1_df(double lambda, double epsilon, const Tolerances& tol = {});

/// 1 / (lambda^(n + 1/2) + 1).
double lemma1_epsilon(double lambda, unsigned n);

/// Flat indices of ((0,0)^n, (0,1)) and ((1,0)^n, (1,1)) in the (n+1)-copy space.
std::vector<std::uint64_t> lemma1_witness_indices(unsigned n);

/// The same witness as an event; materializes the 4^(n+1) history labels.
Event lemma1_witness(unsigned n);

/// (1/2^n) eps^n [1 - eps (1 + lambda^(n+1))].
double lemma1_witness_value(double lambda, double epsilon, unsigned n);

/// <V|D^(x)(n+1)|V> from per-copy products of the 4x4 matrix entries.
double lemma1_witness_value_factorized(double lambda, double epsilon, unsigned n);

/// Lower bound 1 - ||A||^n1 ||B^(x)n2 - I|| on the normalized binary form of
/// A^(x)n1 (x) B^(x)n2, with B = I - eps A and both norms taken from the exact
/// 2x2 spectra (A: 1 +- lambda; B: 1 - eps(1 +- lambda)). Positive values
/// certify the block.
double norm_bound(double lambda, double epsilon, unsigned n1, unsigned n2);

/// Binary-form positivity of D^(x)n through its blocks A^(x)n1 (x) B^(x)n2,
/// one per A/B sequence with at least one B (scalars dropped). Each block is
/// certified by norm_bound when possible, otherwise enumerated. witness_block
/// holds the failing sequence (0 = A, 1 = B); the witness is mapped into the
/// n-copy space and witness_value is the unscaled block value.
PositivityReport block_positivity_check(double lambda, double epsilon, unsigned n,
                                        const Tolerances& tol = {},
                                        const PositivityOptions& options = {});

/// Doubles lambda from lambda0 until the n-copy blocks pass and the
/// (n+1)-copy witness is negative; throws Error beyond lambda_max.
Lemma1Params find_lambda(unsigned n, double lambda0 = 2.0, double lambda_max = 1048576.0,
                         const Tolerances& tol = {}, const PositivityOptions& options = {});

struct Lemma1Report {
  Lemma1Params params;
  ValidationReport single_copy;
  PositivityReport n_copy_verdict;
  /// Full enumeration of D^(x)n when it fits (4^n <= 30).
  std::optional<PositivityReport> n_copy_brute_force;
  /// Full enumeration of D^(x)(n+1) when it fits.
  std::optional<PositivityReport> next_copy_brute_force;
  std::vector<std::uint64_t> witness_indices;
  double witness_value = 0.0;
  double witness_value_numeric = 0.0;
  double witness_value_factorized = 0.0;
  bool numeric_materialized = false;
  bool lemma_holds = false;
  Tolerances tolerances;
};

/// Runs the whole experiment. Missing lambda comes from find_lambda, missing
/// epsilon from lemma1_epsilon.
Lemma1Report run_lemma1(unsigned n, std::optional<double> lambda = std::nullopt,
                        std::optional<double> epsilon = std::nullopt, const Tolerances& tol = {},
                        const PositivityOptions& options = {});

}  // namespace dflab
