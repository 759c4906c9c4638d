#include "dflab/bell.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace dflab {

Behavior::Behavior(std::size_t m, std::size_t d, std::vector<double> table)
    : m_(m), d_(d), table_(std::move(table)) {
  if (m_ < 1 || d_ < 1) throw InvalidArgument("behavior needs at least one setting and outcome");
  if (table_.size() != m_ * m_ * d_ * d_) throw InvalidArgument("behavior table has the wrong size");
}

void Behavior::validate(const Tolerances& tol) const {
  for (std::size_t x = 0; x < m_; ++x)
    for (std::size_t y = 0; y < m_; ++y) {
      double total = 0.0;
      for (std::size_t a = 0; a < d_; ++a)
        for (std::size_t b = 0; b < d_; ++b) {
          const double p = (*this)(x, y, a, b);
          if (!(p >= -tol.pos)) throw InvalidArgument("behavior has a negative entry");
          total += p;
        }
      if (std::abs(total - 1.0) > tol.eq)
        throw InvalidArgument("behavior for settings (" + std::to_string(x) + "," + std::to_string(y) +
                              ") does not sum to 1");
    }
}

Behavior quantum_behavior(const QuantumModel& model) {
  const std::size_t m = model.alice.size();
  if (model.bob.size() != m) throw InvalidArgument("both parties need the same number of settings");
  const std::size_t d = model.alice.front().projectors.size();
  for (const auto* side : {&model.alice, &model.bob})
    for (const auto& fam : *side)
      if (fam.projectors.size() != d) throw InvalidArgument("all settings need the same number of outcomes");
  std::vector<double> table(m * m * d * d);
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t y = 0; y < m; ++y)
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
          table[((x * m + y) * d + a) * d + b] =
              (model.rho * model.alice[x].projectors[a] * model.bob[y].projectors[b]).trace().real();
  return Behavior(m, d, std::move(table));
}

SpacePtr bell_history_space(std::size_t m, std::size_t d) {
  if (m < 1) throw InvalidArgument("need at least one setting");
  if (d < 2) throw InvalidArgument("need at least two outcomes");
  std::vector<Factor> factors;
  std::size_t size = 1;
  for (std::size_t k = 0; k < 2 * m; ++k) {
    factors.push_back({(k < m ? "a" : "b") + std::to_string(k % m + 1), d});
    size *= d;
    if (size > kDenseCap) throw DimensionOverflow("Bell history space exceeds the dense cap");
  }
  return make_factored_space(factors);
}

namespace {

struct BellShape {
  std::size_t m, d;
};

BellShape bell_shape(const SpacePtr& space) {
  if (!space->factored() || space->factors()->empty() || space->factors()->size() % 2 != 0)
    throw InvalidArgument("not a Bell history space");
  const auto& f = *space->factors();
  for (const auto& x : f)
    if (x.cardinality != f.front().cardinality) throw InvalidArgument("Bell properties need equal cardinality");
  return {f.size() / 2, f.front().cardinality};
}

// Cell (a, b) collects histories for which cell_of returns a*d + b.
template <typename CellOf>
Partition build_partition(const SpacePtr& space, std::size_t d, CellOf cell_of) {
  std::vector<std::vector<bool>> cells(d * d, std::vector<bool>(space->size(), false));
  for (std::size_t i = 0; i < space->size(); ++i) cells[cell_of(space->decode(i))][i] = true;
  std::vector<Event> events;
  for (auto& c : cells) events.emplace_back(space, std::move(c));
  return Partition(space, std::move(events));
}

}  // namespace

Partition fixed_setting_partition(const SpacePtr& space, std::size_t x, std::size_t y) {
  const auto [m, d] = bell_shape(space);
  if (x >= m || y >= m) throw InvalidArgument("setting index out of range");
  return build_partition(space, d, [&, m = m, d = d](const std::vector<std::size_t>& w) {
    return w[x] * d + w[m + y];
  });
}

Partition adaptive_partition(const SpacePtr& space, std::size_t first, const std::vector<std::size_t>& g,
                             AdaptiveSide side) {
  const auto [m, d] = bell_shape(space);
  if (first >= m) throw InvalidArgument("setting index out of range");
  if (g.size() != d) throw InvalidArgument("adaptive map needs one setting per outcome");
  for (auto s : g)
    if (s >= m) throw InvalidArgument("adaptive map points to an invalid setting");
  if (side == AdaptiveSide::AliceFirst)
    return build_partition(space, d, [&, m = m, d = d](const std::vector<std::size_t>& w) {
      const auto a = w[first];
      return a * d + w[m + g[a]];
    });
  return build_partition(space, d, [&, m = m, d = d](const std::vector<std::size_t>& w) {
    const auto b = w[m + first];
    return w[g[b]] * d + b;
  });
}

namespace {

PartitionCheck check_one(const DecoherenceFunctional& df, const Partition& partition, DecoherenceMode mode,
                         const std::function<double(std::size_t, std::size_t)>& expected, std::size_t d,
                         const Tolerances& tol) {
  PartitionCheck out;
  const auto dec = check_partition_decoherence(df, partition, mode, tol);
  out.max_off_diagonal = dec.max_off_diagonal;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      const auto& cell = partition.cells()[a * d + b];
      const double diag = df_evaluate(df, cell, cell).real();
      out.max_diagonal_deviation = std::max(out.max_diagonal_deviation, std::abs(diag - expected(a, b)));
    }
  out.passed = out.max_off_diagonal <= tol.eq && out.max_diagonal_deviation <= tol.eq;
  return out;
}

}  // namespace

BellConsistencyReport check_behavior_consistency(const DecoherenceFunctional& df, const Behavior& behavior,
                                                 DecoherenceMode mode, const Tolerances& tol) {
  const auto [m, d] = bell_shape(df.space());
  if (m != behavior.settings() || d != behavior.outcomes())
    throw InvalidArgument("behavior shape does not match the history space");

  BellConsistencyReport rep;
  rep.mode = mode;
  rep.tolerances = tol;
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t y = 0; y < m; ++y) {
      auto c = check_one(df, fixed_setting_partition(df.space(), x, y), mode,
                         [&](std::size_t a, std::size_t b) { return behavior(x, y, a, b); }, d, tol);
      c.kind = "fixed";
      c.first = x;
      c.second = y;
      rep.checks.push_back(std::move(c));
    }

  // Maps {0..d-1} -> {0..m-1} in lexicographic order, constant ones skipped.
  std::vector<std::vector<std::size_t>> maps;
  std::vector<std::size_t> g(d, 0);
  for (;;) {
    if (std::any_of(g.begin(), g.end(), [&](std::size_t s) { return s != g.front(); })) maps.push_back(g);
    std::size_t k = d;
    while (k > 0 && ++g[k - 1] == m) g[--k] = 0;
    if (k == 0) break;
  }

  for (auto side : {AdaptiveSide::AliceFirst, AdaptiveSide::BobFirst})
    for (std::size_t first = 0; first < m; ++first)
      for (const auto& map : maps) {
        const bool alice = side == AdaptiveSide::AliceFirst;
        auto c = check_one(
            df, adaptive_partition(df.space(), first, map, side), mode,
            [&](std::size_t a, std::size_t b) {
              return alice ? behavior(first, map[a], a, b) : behavior(map[b], first, a, b);
            },
            d, tol);
        c.kind = alice ? "alice-first" : "bob-first";
        c.first = first;
        c.map = map;
        rep.checks.push_back(std::move(c));
      }

  rep.passed = true;
  for (const auto& c : rep.checks) {
    rep.worst_deviation = std::max({rep.worst_deviation, c.max_off_diagonal, c.max_diagonal_deviation});
    rep.passed = rep.passed && c.passed;
  }
  return rep;
}

}  // namespace dflab
