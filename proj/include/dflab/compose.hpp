#pragma once

#include "dflab/axioms.hpp"
#include "dflab/core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace dflab {

/// Kronecker product with the first factor most significant:
/// result(i*rb + k, j*cb + l) = a(i, j) * b(k, l).
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  const auto rb = b.rows(), cb = b.cols();
  Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * rb,
                                                                                a.cols() * cb);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
  return out;
}

/// Product-rule composition D1 (x) D2 over space_product(s1, s2).
DecoherenceFunctional tensor(const DecoherenceFunctional& d1, const DecoherenceFunctional& d2,
                             std::size_t cap = kDenseCap);

/// n-fold tensor power; n = 0 gives the singleton DF [1].
DecoherenceFunctional tensor_power(const DecoherenceFunctional& d, unsigned n,
                                   std::size_t cap = kDenseCap);

/// History space of n copies, without materializing any matrix.
SpacePtr power_space(const SpacePtr& s, unsigned n);

/// <u|D^(x)n|u> for the binary vector with ones at `indices`, evaluated factor
/// by factor without forming the power.
Complex tensor_power_form(const Matrix& d, unsigned n, const std::vector<std::uint64_t>& indices);

/// Connected components of the graph with an edge wherever |D_ij| > tol.eq.
/// Blocks are ordered by smallest member; indices ascend within a block.
BlockStructure detect_blocks(const DecoherenceFunctional& d, const Tolerances& tol = {});
BlockStructure detect_blocks(const Matrix& m, double tol);

/// Weak positivity of D^(x)n. BruteForce materializes the power.
/// BlockReduced visits type vectors (n_1, ..., n_k) over the detected blocks
/// of D in lexicographic order and enumerates one representative tensor
/// product of blocks per type; permuting tensor factors maps binary vectors to
/// binary vectors, so the other orderings share its verdict. A failing report
/// carries the type vector in witness_block and a witness over D^(x)n.
PositivityReport check_composability(const DecoherenceFunctional& d, unsigned n, Strategy strategy,
                                     const Tolerances& tol = {},
                                     const PositivityOptions& options = {});

}  // namespace dflab
