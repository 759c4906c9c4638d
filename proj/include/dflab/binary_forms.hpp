#pragma once

// Enumeration kernel for quadratic forms on binary vectors.
//
// A subset S of {0..n-1} is keyed by the integer whose bit (n-1-i) is set iff
// i is in S, so history 0 is the most significant bit and ascending keys are
// the canonical enumeration order. The scan splits keys into a high prefix and
// a low suffix; each prefix block is walked in Gray-code order with O(n)
// incremental updates, and blocks are consumed in ascending prefix order so
// the first block containing a violation holds the minimum violating key.

#include <Eigen/Core>

#include <cstdint>
#include <optional>

namespace dflab {

struct BinaryScanOptions {
  /// Largest key that may be examined; keys beyond it are never accepted.
  std::uint64_t budget = UINT64_MAX;
  unsigned workers = 1;
  /// log2 of the Gray-code block length.
  unsigned block_bits = 16;
};

struct BinaryScanResult {
  std::optional<std::uint64_t> witness_key;
  double witness_value = 0.0;
  /// Number of non-empty subsets covered in canonical order: up to the witness
  /// on failure, all of them (or the budget) otherwise.
  std::uint64_t vectors_checked = 0;
  bool complete = false;
};

inline constexpr unsigned kMaxBruteForceDim = 30;

/// Finds the smallest key whose form value u^T R u is below `threshold`.
/// R must be real symmetric with at most kMaxBruteForceDim rows.
BinaryScanResult scan_binary_forms(const Eigen::MatrixXd& r, double threshold,
                                   const BinaryScanOptions& options = {});

/// Exact u^T R u for the subset encoded by `key`.
double binary_form_value(const Eigen::MatrixXd& r, std::uint64_t key);

/// Bit index (from the most significant end) helpers.
inline std::uint64_t history_bit(unsigned n, unsigned history) {
  return std::uint64_t{1} << (n - 1 - history);
}

}  // namespace dflab
