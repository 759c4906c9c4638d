#include "dflab/binary_forms.hpp"

#include "dflab/core.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <mutex>
#include <thread>
#include <vector>

namespace dflab {

double binary_form_value(const Eigen::MatrixXd& r, std::uint64_t key) {
  const auto n = static_cast<unsigned>(r.rows());
  std::vector<Eigen::Index> members;
  for (unsigned i = 0; i < n; ++i)
    if (key & history_bit(n, i)) members.push_back(i);
  double acc = 0.0;
  for (auto i : members)
    for (auto j : members) acc += r(i, j);
  return acc;
}

namespace {

struct Hit {
  std::uint64_t key;
  double value;
};

class BlockScanner {
 public:
  BlockScanner(const Eigen::MatrixXd& r, double threshold, std::uint64_t limit, unsigned low_bits)
      : r_(r),
        n_(static_cast<unsigned>(r.rows())),
        low_bits_(low_bits),
        threshold_(threshold),
        limit_(limit) {
    const double scale = std::max(1.0, r.cwiseAbs().maxCoeff() * n_);
    margin_ = 1e-9 * scale;
  }

  std::optional<Hit> scan(std::uint64_t prefix) const {
    const unsigned high_bits = n_ - low_bits_;
    const std::uint64_t base = prefix << low_bits_;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n_);
    for (unsigned i = 0; i < high_bits; ++i)
      if (prefix & (std::uint64_t{1} << (high_bits - 1 - i))) g += r_.col(i);
    double f = 0.0;
    for (unsigned i = 0; i < high_bits; ++i)
      if (prefix & (std::uint64_t{1} << (high_bits - 1 - i))) f += g(i);

    std::optional<Hit> best;
    auto consider = [&](std::uint64_t key, double value) {
      if (key == 0 || key > limit_ || value >= threshold_ + margin_) return;
      // Incremental sums drift; decide on the exact value.
      const double exact = binary_form_value(r_, key);
      if (exact < threshold_ && (!best || key < best->key)) best = Hit{key, exact};
    };

    std::uint64_t low = 0;
    consider(base, f);
    const std::uint64_t steps = std::uint64_t{1} << low_bits_;
    for (std::uint64_t t = 1; t < steps; ++t) {
      const auto b = static_cast<unsigned>(std::countr_zero(t));
      const auto h = static_cast<Eigen::Index>(n_ - 1 - b);
      const std::uint64_t bit = std::uint64_t{1} << b;
      if (low & bit) {
        f -= 2.0 * g(h) - r_(h, h);
        g -= r_.col(h);
      } else {
        f += 2.0 * g(h) + r_(h, h);
        g += r_.col(h);
      }
      low ^= bit;
      consider(base | low, f);
    }
    return best;
  }

 private:
  const Eigen::MatrixXd& r_;
  unsigned n_;
  unsigned low_bits_;
  double threshold_;
  std::uint64_t limit_;
  double margin_;
};

}  // namespace

BinaryScanResult scan_binary_forms(const Eigen::MatrixXd& r, double threshold,
                                   const BinaryScanOptions& options) {
  if (r.rows() != r.cols()) throw InvalidArgument("binary form scan needs a square matrix");
  const auto n = static_cast<unsigned>(r.rows());
  if (n == 0) throw InvalidArgument("binary form scan needs a non-empty matrix");
  if (n > kMaxBruteForceDim)
    throw InvalidArgument("brute-force enumeration limited to dimension " +
                          std::to_string(kMaxBruteForceDim) + ", got " + std::to_string(n));

  const std::uint64_t total = (std::uint64_t{1} << n) - 1;
  const std::uint64_t limit = std::min(total, options.budget);
  const unsigned low_bits = std::min(n, std::max(1u, options.block_bits));
  const std::uint64_t prefixes = std::uint64_t{1} << (n - low_bits);
  const BlockScanner scanner(r, threshold, limit, low_bits);

  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> best_prefix{prefixes};
  std::mutex mu;
  std::vector<Hit> hits;

  auto work = [&] {
    for (;;) {
      const std::uint64_t p = next.fetch_add(1);
      if (p >= prefixes || p > best_prefix.load() || (p << low_bits) > limit) return;
      if (auto hit = scanner.scan(p)) {
        std::lock_guard lock(mu);
        hits.push_back(*hit);
        std::uint64_t cur = best_prefix.load();
        while (p < cur && !best_prefix.compare_exchange_weak(cur, p)) {
        }
      }
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::uint64_t>(options.workers, 1, prefixes));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  BinaryScanResult result;
  if (!hits.empty()) {
    const auto it = std::min_element(hits.begin(), hits.end(),
                                     [](const Hit& a, const Hit& b) { return a.key < b.key; });
    result.witness_key = it->key;
    result.witness_value = it->value;
    result.vectors_checked = it->key;
    result.complete = true;
  } else {
    result.vectors_checked = limit;
    result.complete = limit == total;
  }
  return result;
}

}  // namespace dflab
