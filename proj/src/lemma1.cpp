#include "dflab/lemma1.hpp"

#include "dflab/compose.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dflab {

void Lemma1Params::validate() const {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be a finite value > 1");
  if (!(epsilon > 0.0) || epsilon > 1.0 / (1.0 + lambda)) {
    std::ostringstream os;
    os << "epsilon must lie in (0, 1/(1+lambda)] = (0, " << 1.0 / (1.0 + lambda) << "], got " << epsilon;
    throw InvalidArgument(os.str());
  }
  if (n < 1) throw InvalidArgument("n must be at least 1");
}

namespace {

RealMatrix a_matrix(double lambda) {
  RealMatrix a(2, 2);
  a << 1.0, lambda, lambda, 1.0;
  return a;
}

RealMatrix b_matrix(double lambda, double epsilon) {
  return RealMatrix::Identity(2, 2) - epsilon * a_matrix(lambda);
}

}  // namespace

Matrix lemma1_matrix(double lambda, double epsilon) {
  RealMatrix p0 = RealMatrix::Zero(2, 2), p1 = RealMatrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  const RealMatrix d = 0.5 * epsilon * kron(a_matrix(lambda), p0) + 0.5 * kron(b_matrix(lambda, epsilon), p1);
  return d.cast<Complex>();
}

DecoherenceFunctional lemma1_df(double lambda, double epsilon, const Tolerances& tol) {
  Lemma1Params{lambda, epsilon, 1}.validate();
  return df_from_matrix(lemma1_matrix(lambda, epsilon), make_factored_space({{"a", 2}, {"b", 2}}), true, tol);
}

double lemma1_epsilon(double lambda, unsigned n) {
  return 1.0 / (std::pow(lambda, static_cast<double>(n) + 0.5) + 1.0);
}

std::vector<std::uint64_t> lemma1_witness_indices(unsigned n) {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  if (2 * (n + 1) > 63) throw DimensionOverflow("witness index does not fit 64 bits");
  // Each copy contributes one base-4 digit 2a + b.
  std::uint64_t first = 0, second = 0;
  for (unsigned k = 0; k < n; ++k) {
    first = first * 4 + 0;   // (0,0)
    second = second * 4 + 2;  // (1,0)
  }
  first = first * 4 + 1;   // (0,1)
  second = second * 4 + 3;  // (1,1)
  return {first, second};
}

Event lemma1_witness(unsigned n) {
  const auto idx = lemma1_witness_indices(n);
  const auto space = power_space(make_factored_space({{"a", 2}, {"b", 2}}), n + 1);
  return Event::from_indices(space, {static_cast<std::size_t>(idx[0]), static_cast<std::size_t>(idx[1])});
}

double lemma1_witness_value(double lambda, double epsilon, unsigned n) {
  const double nd = static_cast<double>(n);
  return std::pow(epsilon / 2.0, nd) * (1.0 - epsilon * (1.0 + std::pow(lambda, nd + 1.0)));
}

double lemma1_witness_value_factorized(double lambda, double epsilon, unsigned n) {
  return tensor_power_form(lemma1_matrix(lambda, epsilon), n + 1, lemma1_witness_indices(n)).real();
}

double norm_bound(double lambda, double epsilon, unsigned n1, unsigned n2) {
  if (n2 < 1) throw InvalidArgument("norm bound needs at least one B factor");
  const double mu_minus = 1.0 - epsilon * (1.0 + lambda);
  const double mu_plus = 1.0 - epsilon * (1.0 - lambda);
  double deviation = 0.0;
  for (unsigned k = 0; k <= n2; ++k)
    deviation = std::max(deviation, std::abs(std::pow(mu_minus, k) * std::pow(mu_plus, n2 - k) - 1.0));
  return 1.0 - std::pow(1.0 + lambda, static_cast<double>(n1)) * deviation;
}

PositivityReport block_positivity_check(double lambda, double epsilon, unsigned n, const Tolerances& tol,
                                        const PositivityOptions& options) {
  Lemma1Params{lambda, epsilon, n}.validate();
  if (n > 20) throw DimensionOverflow("too many copies for per-block checks");
  const RealMatrix a = a_matrix(lambda);
  const RealMatrix b = b_matrix(lambda, epsilon);
  // Flat indices of the A-sector (b = 0) and B-sector (b = 1) inside one copy.
  const std::size_t sector[2][2] = {{0, 2}, {1, 3}};

  PositivityReport rep;
  rep.strategy = Strategy::NormBound;
  rep.verdict = Verdict::Certified;
  rep.tolerance = tol.pos;
  std::uint64_t remaining = options.budget;
  const std::uint64_t sequences = std::uint64_t{1} << n;
  for (std::uint64_t s = 1; s < sequences; ++s) {
    std::vector<std::size_t> seq(n);
    unsigned n2 = 0;
    for (unsigned f = 0; f < n; ++f) {
      seq[f] = (s >> (n - 1 - f)) & 1u;
      n2 += static_cast<unsigned>(seq[f]);
    }
    if (norm_bound(lambda, epsilon, n - n2, n2) > 0.0) continue;

    if ((std::uint64_t{1} << n) > kMaxBruteForceDim)
      throw InvalidArgument("block of dimension 2^" + std::to_string(n) +
                            " has no certificate and exceeds the enumeration limit");
    rep.strategy = Strategy::BlockReduced;
    if (rep.verdict == Verdict::Certified) rep.verdict = Verdict::Pass;
    RealMatrix block = RealMatrix::Ones(1, 1);
    for (auto f : seq) block = kron(block, f ? b : a);
    BinaryScanOptions scan;
    scan.budget = remaining;
    scan.workers = options.workers;
    const auto res = scan_binary_forms(block, -tol.pos, scan);
    rep.vectors_checked += res.vectors_checked;
    if (res.witness_key) {
      std::vector<std::size_t> global;
      const auto bdim = static_cast<unsigned>(block.rows());
      for (unsigned local = 0; local < bdim; ++local) {
        if (!(*res.witness_key & history_bit(bdim, local))) continue;
        std::uint64_t g = 0;
        for (unsigned f = 0; f < n; ++f) {
          const unsigned bitpos = (local >> (n - 1 - f)) & 1u;
          g = g * 4 + sector[seq[f]][bitpos];
        }
        global.push_back(static_cast<std::size_t>(g));
      }
      std::sort(global.begin(), global.end());
      rep.verdict = Verdict::Fail;
      rep.witness = Event::from_indices(power_space(make_factored_space({{"a", 2}, {"b", 2}}), n), global);
      rep.witness_value = res.witness_value;
      rep.witness_block = seq;
      return rep;
    }
    if (!res.complete) throw BudgetExhausted("block positivity budget exhausted");
    remaining -= res.vectors_checked;
  }
  return rep;
}

Lemma1Params find_lambda(unsigned n, double lambda0, double lambda_max, const Tolerances& tol,
                         const PositivityOptions& options) {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  if (!(lambda0 > 1.0)) throw InvalidArgument("starting lambda must exceed 1");
  for (double lambda = lambda0; lambda <= lambda_max; lambda *= 2.0) {
    const double eps = lemma1_epsilon(lambda, n);
    if (!(lemma1_witness_value(lambda, eps, n) < -tol.pos)) continue;
    try {
      if (block_positivity_check(lambda, eps, n, tol, options).passed()) return {lambda, eps, n};
    } catch (const InvalidArgument&) {
      // Uncertified block too large to enumerate at this lambda.
    }
  }
  std::ostringstream os;
  os << "no lambda in [" << lambda0 << ", " << lambda_max << "] works for n = " << n;
  throw Error(os.str());
}

Lemma1Report run_lemma1(unsigned n, std::optional<double> lambda, std::optional<double> epsilon,
                        const Tolerances& tol, const PositivityOptions& options) {
  Lemma1Report rep;
  rep.tolerances = tol;
  if (lambda) {
    rep.params = {*lambda, epsilon.value_or(lemma1_epsilon(*lambda, n)), n};
  } else if (epsilon) {
    rep.params = {find_lambda(n, 2.0, 1048576.0, tol, options).lambda, *epsilon, n};
  } else {
    rep.params = find_lambda(n, 2.0, 1048576.0, tol, options);
  }
  rep.params.validate();
  const auto& p = rep.params;

  const auto d = lemma1_df(p.lambda, p.epsilon, tol);
  rep.single_copy = validate_df(d, tol, options);
  rep.n_copy_verdict = block_positivity_check(p.lambda, p.epsilon, n, tol, options);

  const std::uint64_t n_dim = std::uint64_t{1} << (2 * n);
  if (n_dim <= kMaxBruteForceDim)
    rep.n_copy_brute_force = check_composability(d, n, Strategy::BruteForce, tol, options);
  if (4 * n_dim <= kMaxBruteForceDim)
    rep.next_copy_brute_force = check_composability(d, n + 1, Strategy::BruteForce, tol, options);

  rep.witness_indices = lemma1_witness_indices(n);
  rep.witness_value = lemma1_witness_value(p.lambda, p.epsilon, n);
  rep.witness_value_factorized = lemma1_witness_value_factorized(p.lambda, p.epsilon, n);
  if (4 * n_dim <= kDenseCap) {
    const auto power = tensor_power(d, n + 1);
    rep.witness_value_numeric = df_evaluate(power, lemma1_witness(n), lemma1_witness(n)).real();
    rep.numeric_materialized = true;
  } else {
    rep.witness_value_numeric = rep.witness_value_factorized;
  }
  rep.lemma_holds = rep.n_copy_verdict.passed() && rep.witness_value < -tol.pos;
  return rep;
}

}  // namespace dflab
