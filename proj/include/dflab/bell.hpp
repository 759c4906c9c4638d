#pragma once

#include "dflab/axioms.hpp"
#include "dflab/core.hpp"
#include "dflab/quantum.hpp"

#include <string>
#include <vector>

namespace dflab {

/// Joint outcome table P(a,b|x,y) for m settings and d outcomes per party.
class Behavior {
 public:
  Behavior(std::size_t m, std::size_t d, std::vector<double> table);

  std::size_t settings() const { return m_; }
  std::size_t outcomes() const { return d_; }
  double operator()(std::size_t x, std::size_t y, std::size_t a, std::size_t b) const {
    return table_[((x * m_ + y) * d_ + a) * d_ + b];
  }
  const std::vector<double>& table() const { return table_; }

  /// Non-negative entries summing to one for every setting pair.
  void validate(const Tolerances& tol = {}) const;

 private:
  std::size_t m_, d_;
  std::vector<double> table_;
};

/// P(a,b|x,y) = tr(rho E(x,a) F(y,b)); needs m settings with d outcomes each
/// on both sides.
Behavior quantum_behavior(const QuantumModel& model);

/// Histories (a_1..a_m, b_1..b_m) with values in {0..d-1}, Alice's properties
/// first.
SpacePtr bell_history_space(std::size_t m, std::size_t d);

/// Cells A_{x,y,a,b} = {w : a_x = a, b_y = b}, cell index a*d + b.
Partition fixed_setting_partition(const SpacePtr& space, std::size_t x, std::size_t y);

enum class AdaptiveSide { AliceFirst, BobFirst };

/// AliceFirst: Alice measures `first`, Bob measures g(a); cells
/// {w : a_first = a, b_{g(a)} = b}. BobFirst is the mirror image with cells
/// {w : b_first = b, a_{g(b)} = a}. Cell index a*d + b either way.
Partition adaptive_partition(const SpacePtr& space, std::size_t first, const std::vector<std::size_t>& g,
                             AdaptiveSide side = AdaptiveSide::AliceFirst);

struct PartitionCheck {
  std::string kind;  // "fixed", "alice-first", "bob-first"
  std::size_t first = 0;
  std::size_t second = 0;       // fixed partitions: Bob's setting
  std::vector<std::size_t> map; // adaptive partitions: outcome -> setting
  double max_off_diagonal = 0.0;
  double max_diagonal_deviation = 0.0;
  bool passed = false;
};

struct BellConsistencyReport {
  DecoherenceMode mode = DecoherenceMode::Strong;
  std::vector<PartitionCheck> checks;
  double worst_deviation = 0.0;
  bool passed = false;
  Tolerances tolerances;
};

/// All fixed-setting partitions plus every one-step adaptive partition in both
/// directions (non-constant maps only; constant maps coincide with fixed
/// partitions).
BellConsistencyReport check_behavior_consistency(const DecoherenceFunctional& d, const Behavior& behavior,
                                                 DecoherenceMode mode = DecoherenceMode::Strong,
                                                 const Tolerances& tol = {});

}  // namespace dflab
