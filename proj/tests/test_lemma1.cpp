#include "dflab/axioms.hpp"
#include "dflab/compose.hpp"
#include "dflab/lemma1.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

using namespace dflab;

TEST_CASE("lemma1_df entries") {
  const double eps = 0.261204;
  auto d = lemma1_df(2.0, eps);
  const Matrix& m = d.matrix();
  CHECK(m(0, 0).real() == doctest::Approx(0.130602).epsilon(1e-12));
  CHECK(m(0, 2).real() == doctest::Approx(0.261204).epsilon(1e-12));
  CHECK(m(1, 1).real() == doctest::Approx(0.369398).epsilon(1e-12));
  CHECK(m(1, 3).real() == doctest::Approx(-0.261204).epsilon(1e-12));
  CHECK(m(0, 1) == Complex(0.0));
  CHECK(d.space()->factored());
  CHECK_THROWS_AS(lemma1_df(1.0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(lemma1_df(2.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(lemma1_df(2.0, 0.34), InvalidArgument);
  CHECK_NOTHROW(lemma1_df(2.0, 1.0 / 3.0));
}

TEST_CASE("lemma1_df single-property partitions strongly decohere") {
  for (double lambda : {1.5, 2.0, 3.0, 4.0, 8.0})
    for (double f : {0.2, 0.6, 1.0}) {
      auto d = lemma1_df(lambda, f / (1 + lambda));
      const auto s = d.space();
      Partition by_a(s, {Event::from_indices(s, {0, 1}), Event::from_indices(s, {2, 3})});
      Partition by_b(s, {Event::from_indices(s, {0, 2}), Event::from_indices(s, {1, 3})});
      CHECK(check_partition_decoherence(d, by_a, DecoherenceMode::Strong).verdict);
      CHECK(check_partition_decoherence(d, by_b, DecoherenceMode::Strong).verdict);
      const auto v = validate_df(d);
      CHECK(v.level == ValidationLevel::WeaklyPositive);
      CHECK(v.strong_positivity->min_eigenvalue == doctest::Approx(f / (1 + lambda) * (1 - lambda) / 2));
    }
}

TEST_CASE("lemma1_epsilon") {
  CHECK(lemma1_epsilon(2.0, 1) == doctest::Approx(0.26120387496374).epsilon(1e-13));
  CHECK(lemma1_epsilon(4.0, 2) == doctest::Approx(1.0 / 33).epsilon(1e-14));
  CHECK(lemma1_epsilon(1e6, 3) < 1e-20);
  for (double lambda : {1.1, 2.0, 10.0})
    for (unsigned n : {1u, 2u, 5u}) CHECK(lemma1_epsilon(lambda, n) <= 1 / (1 + lambda));
}

TEST_CASE("lemma1_witness") {
  const auto w1 = lemma1_witness(1);
  CHECK(w1.space()->size() == 16);
  CHECK(w1.indices() == std::vector<std::size_t>{1, 11});
  for (unsigned n = 1; n <= 6; ++n) {
    CHECK(lemma1_witness(n).weight() == 2);
    const auto idx = lemma1_witness_indices(n);
    REQUIRE(idx.size() == 2);
    // ((0,0)^n,(0,1)) and ((1,0)^n,(1,1)) in base 4.
    std::uint64_t lo = 1, hi = 0;
    for (unsigned k = 0; k < n; ++k) hi = hi * 4 + 2;
    hi = hi * 4 + 3;
    CHECK(idx[0] == lo);
    CHECK(idx[1] == hi);
  }
}

TEST_CASE("lemma1 witness value: closed form, materialized and factorized agree") {
  CHECK(lemma1_witness_value(2.0, 0.261204, 1) == doctest::Approx(0.5 * 0.261204 * (1 - 0.261204 * 5)));
  CHECK(lemma1_witness_value(4.0, 1.0 / 33, 2) == doctest::Approx(-2.2258e-4).epsilon(1e-4));
  CHECK(lemma1_witness_value(3.0, 1.0 / 28, 2) == 0.0);
  for (double lambda : {1.5, 2.0, 3.0, 4.0, 8.0})
    for (double f : {0.1, 0.4, 0.7, 1.0})
      for (unsigned n : {1u, 2u, 3u}) {
        const double eps = f / (1 + lambda);
        const double closed = lemma1_witness_value(lambda, eps, n);
        const auto big = tensor_power(lemma1_df(lambda, eps), n + 1);
        const auto w = lemma1_witness(n);
        const double numeric = df_evaluate(big, Event(big.space(), w.indicator()), Event(big.space(), w.indicator())).real();
        CHECK(std::abs(closed - numeric) <= 1e-10);
        CHECK(std::abs(closed - lemma1_witness_value_factorized(lambda, eps, n)) <= 1e-10);
      }
}

TEST_CASE("lemma1 witness value is negative exactly above the threshold") {
  for (double lambda : {1.5, 2.0, 3.0, 4.0, 8.0})
    for (unsigned n : {1u, 2u, 3u}) {
      const double threshold = 1 / (std::pow(lambda, n + 1) + 1);
      for (int k = 1; k <= 20; ++k) {
        const double eps = k / 20.0 / (1 + lambda);
        if (std::abs(eps - threshold) < 1e-9) continue;
        CHECK((lemma1_witness_value(lambda, eps, n) < 0) == (eps > threshold));
      }
    }
}

TEST_CASE("norm_bound") {
  CHECK(norm_bound(4.0, 1.0 / 33, 0, 1) == doctest::Approx(1 - 5.0 / 33));
  double prev = -1e9;
  for (double lambda : {4.0, 16.0, 64.0, 256.0, 1024.0, 4096.0}) {
    const double b = norm_bound(lambda, lemma1_epsilon(lambda, 3), 2, 1);
    CHECK(b >= prev - 1e-12);
    prev = b;
  }
  CHECK(prev > 0.9);
  CHECK(norm_bound(2.0, 1.0 / 3, 3, 1) <= 0);
}

TEST_CASE("norm_bound certificates are sound against block enumeration") {
  for (double lambda : {1.5, 2.0, 3.0, 4.0, 8.0, 64.0})
    for (double f : {0.05, 0.2, 0.5, 1.0})
      for (unsigned n = 1; n <= 4; ++n)
        for (unsigned n2 = 1; n2 <= n; ++n2) {
          const unsigned n1 = n - n2;
          const double eps = f / (1 + lambda);
          if (norm_bound(lambda, eps, n1, n2) <= 0) continue;
          Eigen::Matrix2d a, b;
          a << 1, lambda, lambda, 1;
          b = Eigen::Matrix2d::Identity() - eps * a;
          Eigen::MatrixXd blk = Eigen::MatrixXd::Ones(1, 1);
          for (unsigned k = 0; k < n1; ++k) blk = kron(blk, a);
          for (unsigned k = 0; k < n2; ++k) blk = kron(blk, b);
          CHECK_MESSAGE(!testing::naive_first_violation(blk.cast<Complex>(), 1e-10),
                        "lambda=" << lambda << " eps=" << eps << " n1=" << n1 << " n2=" << n2);
        }
}

TEST_CASE("block_positivity_check examples") {
  const auto r4 = block_positivity_check(4.0, 1.0 / 33, 2);
  CHECK(r4.passed());
  const auto r2 = block_positivity_check(2.0, lemma1_epsilon(2.0, 1), 1);
  CHECK(r2.passed());
  const auto rf = block_positivity_check(2.0, lemma1_epsilon(2.0, 1), 2);
  CHECK(rf.verdict == Verdict::Fail);
}

TEST_CASE("block_positivity_check agrees with brute force on the full power") {
  for (double lambda : {1.5, 2.0, 3.0, 4.0, 8.0})
    for (int k = 1; k <= 5; ++k) {
      const double eps = k / 5.0 / (1 + lambda);
      auto d = lemma1_df(lambda, eps);
      for (unsigned n : {1u, 2u}) {
        const auto block = block_positivity_check(lambda, eps, n);
        const auto brute = check_weak_positivity(tensor_power(d, n));
        CHECK_MESSAGE(block.passed() == brute.passed(), "lambda=" << lambda << " eps=" << eps << " n=" << n);
      }
    }
}

TEST_CASE("find_lambda") {
  const auto p1 = find_lambda(1);
  CHECK(p1.lambda == 2.0);
  CHECK(p1.epsilon == doctest::Approx(lemma1_epsilon(2.0, 1)));
  // For n = 2 and 3 the doubling search already succeeds at lambda = 2: the
  // n-copy blocks stay positive while the (n+1)-copy witness is negative.
  const auto p2 = find_lambda(2);
  CHECK(p2.lambda == 2.0);
  CHECK(block_positivity_check(2.0, p2.epsilon, 2).passed());
  CHECK(lemma1_witness_value(2.0, p2.epsilon, 2) < 0);
  const auto p3 = find_lambda(3);
  CHECK(p3.lambda <= 64.0);
  CHECK(lemma1_witness_value(p3.lambda, p3.epsilon, 3) < 0);
  CHECK_THROWS_AS(find_lambda(2, 2.0, 1.0), Error);
}

TEST_CASE("run_lemma1 report invariants") {
  const auto r = run_lemma1(1, 2.0);
  CHECK(r.lemma_holds);
  CHECK(r.n_copy_verdict.passed());
  REQUIRE(r.n_copy_brute_force);
  CHECK(r.n_copy_brute_force->verdict == Verdict::Pass);
  REQUIRE(r.next_copy_brute_force);
  CHECK(r.next_copy_brute_force->verdict == Verdict::Fail);
  CHECK(r.numeric_materialized);
  CHECK(std::abs(r.witness_value - r.witness_value_numeric) <= 1e-10);
  CHECK(r.lemma_holds == (r.n_copy_verdict.passed() && r.witness_value < -1e-10));

  const auto safe = run_lemma1(1, 2.0, 0.1);
  CHECK_FALSE(safe.lemma_holds);
  CHECK(safe.witness_value > 0);
}
