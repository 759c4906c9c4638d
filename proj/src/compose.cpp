#include "dflab/compose.hpp"

#include <algorithm>
#include <numeric>

namespace dflab {

namespace {

std::size_t checked_power(std::size_t base, unsigned n, std::size_t cap) {
  std::size_t out = 1;
  for (unsigned i = 0; i < n; ++i) {
    if (out > cap / base) throw DimensionOverflow("tensor power dimension exceeds cap " + std::to_string(cap));
    out *= base;
  }
  return out;
}

void require_hermitian(const DecoherenceFunctional& d) {
  if (d.level() >= ValidationLevel::Hermitian) return;
  if (!check_hermiticity(d, Tolerances{}.eq).ok) throw InvalidArgument("composition needs Hermitian functionals");
}

ValidationLevel composed_level(ValidationLevel a, ValidationLevel b) {
  return std::min({a, b, ValidationLevel::Normalized});
}

}  // namespace

DecoherenceFunctional tensor(const DecoherenceFunctional& d1, const DecoherenceFunctional& d2,
                             std::size_t cap) {
  require_hermitian(d1);
  require_hermitian(d2);
  if (d1.dim() > cap / d2.dim())
    throw DimensionOverflow("product dimension " + std::to_string(d1.dim()) + "x" +
                            std::to_string(d2.dim()) + " exceeds cap " + std::to_string(cap));
  return DecoherenceFunctional(space_product(d1.space(), d2.space()), kron(d1.matrix(), d2.matrix()),
                               composed_level(std::max(d1.level(), ValidationLevel::Hermitian),
                                              std::max(d2.level(), ValidationLevel::Hermitian)));
}

DecoherenceFunctional tensor_power(const DecoherenceFunctional& d, unsigned n, std::size_t cap) {
  require_hermitian(d);
  checked_power(d.dim(), n, cap);
  DecoherenceFunctional out = unit_df();
  if (n == 0) return out;
  out = d;
  for (unsigned i = 1; i < n; ++i) out = tensor(out, d, cap);
  return out.with_level(composed_level(std::max(d.level(), ValidationLevel::Hermitian),
                                       ValidationLevel::Normalized));
}

SpacePtr power_space(const SpacePtr& s, unsigned n) {
  if (n == 0) return unit_df().space();
  SpacePtr out = s;
  for (unsigned i = 1; i < n; ++i) out = space_product(out, s);
  return out;
}

Complex tensor_power_form(const Matrix& d, unsigned n, const std::vector<std::uint64_t>& indices) {
  const auto dim = static_cast<std::uint64_t>(d.rows());
  std::vector<std::vector<Eigen::Index>> digits;
  digits.reserve(indices.size());
  for (auto idx : indices) {
    std::vector<Eigen::Index> ds(n);
    for (unsigned f = n; f-- > 0;) {
      ds[f] = static_cast<Eigen::Index>(idx % dim);
      idx /= dim;
    }
    if (idx != 0) throw InvalidArgument("index out of range for the tensor power");
    digits.push_back(std::move(ds));
  }
  Complex total(0.0);
  for (const auto& p : digits)
    for (const auto& q : digits) {
      Complex term(1.0);
      for (unsigned f = 0; f < n; ++f) term *= d(p[f], q[f]);
      total += term;
    }
  return total;
}

BlockStructure detect_blocks(const Matrix& m, double tol) {
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) > tol ||
          std::abs(m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))) > tol) {
        auto a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  BlockStructure out;
  std::vector<long> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<long>(out.blocks.size());
      out.blocks.push_back({"block" + std::to_string(out.blocks.size()), {}});
    }
    out.blocks[static_cast<std::size_t>(slot[root])].indices.push_back(i);
  }
  return out;
}

BlockStructure detect_blocks(const DecoherenceFunctional& d, const Tolerances& tol) {
  return detect_blocks(d.matrix(), tol.eq);
}

namespace {

// Type vectors (n_1, ..., n_k) with sum n in lexicographic order.
void type_vectors(std::size_t k, unsigned n, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() + 1 == k) {
    cur.push_back(n);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (unsigned c = 0; c <= n; ++c) {
    cur.push_back(c);
    type_vectors(k, n - c, cur, out);
    cur.pop_back();
  }
}

PositivityReport composability_blocks(const DecoherenceFunctional& d, unsigned n,
                                      const Tolerances& tol, const PositivityOptions& options) {
  const BlockStructure blocks = options.blocks ? *options.blocks : detect_blocks(d, tol);
  if (options.blocks) verify_blocks(d.matrix(), blocks, tol.eq);
  const RealMatrix r = binary_form_matrix(d.matrix());
  const auto dim = static_cast<std::uint64_t>(d.dim());

  std::vector<RealMatrix> subs;
  for (const auto& b : blocks.blocks) {
    const auto k = static_cast<Eigen::Index>(b.indices.size());
    RealMatrix sub(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        sub(i, j) = r(static_cast<Eigen::Index>(b.indices[static_cast<std::size_t>(i)]),
                      static_cast<Eigen::Index>(b.indices[static_cast<std::size_t>(j)]));
    subs.push_back(std::move(sub));
  }

  std::vector<std::vector<std::size_t>> types;
  std::vector<std::size_t> cur;
  type_vectors(blocks.blocks.size(), n, cur, types);

  PositivityReport rep;
  rep.strategy = Strategy::BlockReduced;
  rep.tolerance = tol.pos;
  std::uint64_t remaining = options.budget;
  for (const auto& type : types) {
    std::vector<std::size_t> seq;
    for (std::size_t b = 0; b < type.size(); ++b) seq.insert(seq.end(), type[b], b);

    // Non-negative factors give a non-negative block, whose binary forms are
    // all non-negative.
    const bool nonneg = std::all_of(seq.begin(), seq.end(),
                                    [&](std::size_t b) { return (subs[b].array() >= 0).all(); });
    if (nonneg) continue;
    std::size_t block_dim = 1;
    for (auto b : seq)
      if ((block_dim *= blocks.blocks[b].indices.size()) > kMaxBruteForceDim) break;
    if (block_dim > kMaxBruteForceDim)
      throw InvalidArgument("tensor block of dimension " + std::to_string(block_dim) +
                            " exceeds the enumeration limit of " + std::to_string(kMaxBruteForceDim));
    RealMatrix block = RealMatrix::Ones(1, 1);
    for (auto b : seq) block = kron(block, subs[b]);

    BinaryScanOptions scan;
    scan.budget = remaining;
    scan.workers = options.workers;
    const auto res = scan_binary_forms(block, -tol.pos, scan);
    rep.vectors_checked += res.vectors_checked;
    if (res.witness_key) {
      const auto bdim = static_cast<unsigned>(block.rows());
      std::vector<std::size_t> global;
      for (unsigned local = 0; local < bdim; ++local) {
        if (!(*res.witness_key & history_bit(bdim, local))) continue;
        // Decode the block-local multi-index factor by factor.
        std::uint64_t rest = local, g = 0;
        std::vector<std::size_t> pos(seq.size());
        for (std::size_t f = seq.size(); f-- > 0;) {
          const auto sz = blocks.blocks[seq[f]].indices.size();
          pos[f] = rest % sz;
          rest /= sz;
        }
        for (std::size_t f = 0; f < seq.size(); ++f) g = g * dim + blocks.blocks[seq[f]].indices[pos[f]];
        global.push_back(static_cast<std::size_t>(g));
      }
      std::sort(global.begin(), global.end());
      rep.verdict = Verdict::Fail;
      rep.witness = Event::from_indices(power_space(d.space(), n), global);
      rep.witness_value = res.witness_value;
      rep.witness_block = type;
      return rep;
    }
    if (!res.complete) throw BudgetExhausted("composability budget exhausted");
    remaining -= res.vectors_checked;
  }
  return rep;
}

}  // namespace

PositivityReport check_composability(const DecoherenceFunctional& d, unsigned n, Strategy strategy,
                                     const Tolerances& tol, const PositivityOptions& options) {
  require_hermitian(d);
  if (n == 0) {
    PositivityReport rep;
    rep.strategy = strategy;
    rep.tolerance = tol.pos;
    return rep;
  }
  switch (strategy) {
    case Strategy::BruteForce: {
      if (checked_power(d.dim(), n, kDenseCap) > kMaxBruteForceDim)
        throw InvalidArgument("brute-force composability limited to dimension " +
                              std::to_string(kMaxBruteForceDim));
      return check_weak_positivity(tensor_power(d, n), tol, Strategy::BruteForce, options);
    }
    case Strategy::BlockReduced:
      return composability_blocks(d, n, tol, options);
    case Strategy::NormBound:
      throw InvalidArgument("norm-bound strategy is not applicable to general composability checks");
  }
  throw InvalidArgument("unknown strategy");
}

}  // namespace dflab
