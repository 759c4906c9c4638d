#include "dflab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace dflab {

HistorySpace::HistorySpace(std::vector<std::string> labels,
                           std::optional<std::vector<Factor>> factors)
    : labels_(std::move(labels)), factors_(std::move(factors)) {
  if (labels_.empty()) throw InvalidArgument("history space needs at least one history");
  std::set<std::string> seen;
  for (const auto& l : labels_)
    if (!seen.insert(l).second) throw InvalidArgument("duplicate history label: " + l);
  if (factors_) {
    std::size_t product = 1;
    for (const auto& f : *factors_) {
      if (f.cardinality == 0) throw InvalidArgument("factor '" + f.name + "' has cardinality 0");
      product *= f.cardinality;
    }
    if (product != labels_.size())
      throw InvalidArgument("factor cardinalities multiply to " + std::to_string(product) +
                            " but the space has " + std::to_string(labels_.size()) +
                            " histories");
  }
}

std::vector<std::size_t> HistorySpace::decode(std::size_t index) const {
  if (!factors_) throw InvalidArgument("space is not factored");
  if (index >= size()) throw InvalidArgument("history index out of range");
  std::vector<std::size_t> tuple(factors_->size());
  for (std::size_t k = factors_->size(); k-- > 0;) {
    const auto card = (*factors_)[k].cardinality;
    tuple[k] = index % card;
    index /= card;
  }
  return tuple;
}

std::size_t HistorySpace::encode(const std::vector<std::size_t>& tuple) const {
  if (!factors_) throw InvalidArgument("space is not factored");
  if (tuple.size() != factors_->size()) throw InvalidArgument("tuple length mismatch");
  std::size_t index = 0;
  for (std::size_t k = 0; k < tuple.size(); ++k) {
    const auto card = (*factors_)[k].cardinality;
    if (tuple[k] >= card) throw InvalidArgument("property value out of range");
    index = index * card + tuple[k];
  }
  return index;
}

SpacePtr make_space(std::vector<std::string> labels, std::optional<std::vector<Factor>> factors) {
  return std::make_shared<const HistorySpace>(std::move(labels), std::move(factors));
}

SpacePtr make_factored_space(const std::vector<Factor>& factors) {
  std::size_t size = 1;
  for (const auto& f : factors) {
    size *= f.cardinality;
    if (size > (std::size_t{1} << 26)) throw DimensionOverflow("factored space too large");
  }
  std::vector<std::string> labels;
  labels.reserve(size);
  std::vector<std::size_t> tuple(factors.size(), 0);
  for (std::size_t i = 0; i < size; ++i) {
    std::string label = "(";
    for (std::size_t k = 0; k < tuple.size(); ++k) {
      if (k) label += ',';
      label += std::to_string(tuple[k]);
    }
    label += ')';
    labels.push_back(std::move(label));
    for (std::size_t k = tuple.size(); k-- > 0;) {
      if (++tuple[k] < factors[k].cardinality) break;
      tuple[k] = 0;
    }
  }
  return make_space(std::move(labels), factors);
}

SpacePtr space_product(const SpacePtr& s1, const SpacePtr& s2) {
  const auto n1 = s1->size(), n2 = s2->size();
  std::vector<std::string> labels;
  labels.reserve(n1 * n2);
  for (const auto& l1 : s1->labels())
    for (const auto& l2 : s2->labels()) labels.push_back(l1 + "⋈" + l2);
  // Only a product of two factored spaces stays factored; otherwise treat each
  // unfactored side as a single property.
  std::vector<Factor> factors;
  auto append = [&](const SpacePtr& s, const char* fallback) {
    if (s->factors())
      factors.insert(factors.end(), s->factors()->begin(), s->factors()->end());
    else
      factors.push_back({fallback, s->size()});
  };
  append(s1, "left");
  append(s2, "right");
  return make_space(std::move(labels), std::move(factors));
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
  return a == b || (a && b && *a == *b);
}

Event::Event(SpacePtr space, std::vector<bool> indicator)
    : space_(std::move(space)), indicator_(std::move(indicator)) {
  if (!space_) throw InvalidArgument("event needs a space");
  if (indicator_.size() != space_->size())
    throw InvalidArgument("indicator length does not match the space");
}

Event Event::empty(SpacePtr space) {
  const auto n = space->size();
  return Event(std::move(space), std::vector<bool>(n, false));
}

Event Event::full(SpacePtr space) {
  const auto n = space->size();
  return Event(std::move(space), std::vector<bool>(n, true));
}

Event Event::from_indices(SpacePtr space, const std::vector<std::size_t>& indices) {
  std::vector<bool> ind(space->size(), false);
  for (auto i : indices) {
    if (i >= ind.size()) throw InvalidArgument("event index out of range");
    ind[i] = true;
  }
  return Event(std::move(space), std::move(ind));
}

std::vector<std::size_t> Event::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < indicator_.size(); ++i)
    if (indicator_[i]) out.push_back(i);
  return out;
}

std::size_t Event::weight() const {
  return static_cast<std::size_t>(std::count(indicator_.begin(), indicator_.end(), true));
}

RealVector Event::vector() const {
  RealVector v(static_cast<Eigen::Index>(indicator_.size()));
  for (std::size_t i = 0; i < indicator_.size(); ++i) v(static_cast<Eigen::Index>(i)) = indicator_[i];
  return v;
}

Partition::Partition(SpacePtr space, std::vector<Event> cells)
    : space_(std::move(space)), cells_(std::move(cells)) {
  std::vector<int> cover(space_->size(), 0);
  for (const auto& c : cells_) {
    if (!same_space(c.space(), space_)) throw InvalidArgument("partition cell from another space");
    for (std::size_t i = 0; i < cover.size(); ++i) cover[i] += c.contains(i);
  }
  for (std::size_t i = 0; i < cover.size(); ++i) {
    if (cover[i] == 0) throw InvalidArgument("partition does not cover history " + space_->labels()[i]);
    if (cover[i] > 1) throw InvalidArgument("partition cells overlap at history " + space_->labels()[i]);
  }
}

const char* to_string(ValidationLevel level) {
  switch (level) {
    case ValidationLevel::Raw: return "Raw";
    case ValidationLevel::Hermitian: return "Hermitian";
    case ValidationLevel::Normalized: return "Normalized";
    case ValidationLevel::WeaklyPositive: return "WeaklyPositive";
    case ValidationLevel::StronglyPositive: return "StronglyPositive";
  }
  return "?";
}

DecoherenceFunctional::DecoherenceFunctional(SpacePtr space, Matrix matrix, ValidationLevel level)
    : space_(std::move(space)), matrix_(std::move(matrix)), level_(level) {
  if (!space_) throw InvalidArgument("decoherence functional needs a space");
  if (matrix_.rows() != matrix_.cols()) throw InvalidArgument("matrix is not square");
  if (static_cast<std::size_t>(matrix_.rows()) != space_->size())
    throw InvalidArgument("matrix dimension " + std::to_string(matrix_.rows()) +
                          " does not match space size " + std::to_string(space_->size()));
  if (!matrix_.allFinite()) throw InvalidArgument("matrix has non-finite entries");
}

DecoherenceFunctional DecoherenceFunctional::with_level(ValidationLevel level) const {
  return DecoherenceFunctional(space_, matrix_, std::max(level, level_));
}

DecoherenceFunctional df_from_matrix(const Matrix& m, SpacePtr space, bool require_normalized,
                                     const Tolerances& tol) {
  DecoherenceFunctional raw(std::move(space), m);
  const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (dev > tol.eq) {
    std::ostringstream os;
    os << "matrix is not Hermitian (max |D - D^dagger| = " << dev << ")";
    throw InvalidArgument(os.str());
  }
  if (!require_normalized) return raw.with_level(ValidationLevel::Hermitian);
  const Complex total = m.sum();
  if (std::abs(total - Complex(1.0)) > tol.eq) {
    std::ostringstream os;
    os << "matrix is not normalized (<Omega|D|Omega> = " << total.real() << "+" << total.imag() << "i)";
    throw InvalidArgument(os.str());
  }
  return raw.with_level(ValidationLevel::Normalized);
}

Complex df_evaluate(const DecoherenceFunctional& d, const Event& a, const Event& b) {
  if (!same_space(a.space(), d.space()) || !same_space(b.space(), d.space()))
    throw InvalidArgument("event does not belong to the functional's history space");
  return bilinear_sum(d.matrix(), a.indices(), b.indices());
}

DecoherenceFunctional unit_df() {
  return DecoherenceFunctional(make_space({"()"}, std::vector<Factor>{}), Matrix::Ones(1, 1),
                               ValidationLevel::Normalized);
}

DecoherenceFunctional classical_df(const std::vector<double>& p, const Tolerances& tol) {
  if (p.empty()) throw InvalidArgument("probability vector is empty");
  double total = 0;
  for (double x : p) {
    if (!(x >= -tol.pos)) throw InvalidArgument("negative probability");
    total += x;
  }
  if (std::abs(total - 1.0) > tol.eq) throw InvalidArgument("probabilities do not sum to 1");
  RealVector diag = Eigen::Map<const RealVector>(p.data(), static_cast<Eigen::Index>(p.size()));
  Matrix m = diag.cast<Complex>().asDiagonal();
  return df_from_matrix(m, make_factored_space({{"x", p.size()}}), true, tol);
}

}  // namespace dflab
