#pragma once

#include "dflab/binary_forms.hpp"
#include "dflab/core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dflab {

/// Index sets partitioning a matrix such that every cross-block entry is zero.
struct Block {
  std::string label;
  std::vector<std::size_t> indices;
};

struct BlockStructure {
  std::vector<Block> blocks;

  std::size_t dim() const;
};

/// Throws InvalidArgument unless `blocks` partitions the indices of `m` and all
/// cross-block entries are within `tol`.
void verify_blocks(const Matrix& m, const BlockStructure& blocks, double tol);

enum class Verdict { Pass, Fail, Certified };
enum class Strategy { BruteForce, BlockReduced, NormBound };

const char* to_string(Verdict v);
const char* to_string(Strategy s);

struct PositivityReport {
  Verdict verdict = Verdict::Pass;
  std::optional<Event> witness;
  std::optional<double> witness_value;
  std::uint64_t vectors_checked = 0;
  Strategy strategy = Strategy::BruteForce;
  /// Block-reduced checks: type vector of the failing block.
  std::optional<std::vector<std::size_t>> witness_block;
  double tolerance = 0.0;

  bool passed() const { return verdict != Verdict::Fail; }
};

/// Raised when an enumeration budget runs out before a verdict is reached.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

struct PositivityOptions {
  std::uint64_t budget = UINT64_MAX;
  unsigned workers = 1;
  /// Required by Strategy::BlockReduced; verified against the matrix.
  std::optional<BlockStructure> blocks;
};

struct HermiticityResult {
  bool ok = false;
  double max_deviation = 0.0;
};

struct NormalizationResult {
  bool ok = false;
  Complex value;
};

struct SpectralReport {
  double min_eigenvalue = 0.0;
  Vector min_eigenvector;
  bool is_sp = false;
  double residual = 0.0;
};

enum class DecoherenceMode { Weak, Strong };

const char* to_string(DecoherenceMode m);

struct DecoherenceReport {
  DecoherenceMode mode = DecoherenceMode::Strong;
  bool verdict = false;
  std::optional<std::vector<double>> probabilities;
  double max_off_diagonal = 0.0;
};

struct ValidationReport {
  HermiticityResult hermiticity;
  NormalizationResult normalization;
  std::optional<PositivityReport> weak_positivity;
  std::optional<SpectralReport> strong_positivity;
  ValidationLevel level = ValidationLevel::Raw;
  Tolerances tolerances;
};

HermiticityResult check_hermiticity(const Matrix& m, double tol);
HermiticityResult check_hermiticity(const DecoherenceFunctional& d, double tol);

NormalizationResult check_normalization(const DecoherenceFunctional& d, double tol);

/// Real part of the Hermitian part; binary quadratic forms of a Hermitian
/// matrix only see this.
RealMatrix binary_form_matrix(const Matrix& m);

PositivityReport check_weak_positivity(const DecoherenceFunctional& d, const Tolerances& tol = {},
                                       Strategy strategy = Strategy::BruteForce,
                                       const PositivityOptions& options = {});

/// Minimal eigenpair of a Hermitian matrix via a tridiagonal QR solver with a
/// capped iteration count. The eigenvector is phase-canonicalized so its first
/// component of modulus above tol.eq is real positive.
SpectralReport spectral_report(const Matrix& m, const Tolerances& tol = {});

SpectralReport check_strong_positivity(const DecoherenceFunctional& d, const Tolerances& tol = {});

DecoherenceReport check_partition_decoherence(const DecoherenceFunctional& d,
                                              const Partition& partition, DecoherenceMode mode,
                                              const Tolerances& tol = {});

/// Hermiticity, normalization, weak positivity and strong positivity in one
/// pass. Weak positivity falls back to automatic block reduction above
/// kMaxBruteForceDim.
ValidationReport validate_df(const DecoherenceFunctional& d, const Tolerances& tol = {},
                             const PositivityOptions& options = {});

}  // namespace dflab
