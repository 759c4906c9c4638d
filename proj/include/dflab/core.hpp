#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dflab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Absolute tolerances shared by every check. `spec` is relative to the
/// Frobenius norm of the matrix under test.
struct Tolerances {
  double eq = 1e-10;
  double pos = 1e-10;
  double spec = 1e-9;
};

/// Largest dense matrix dimension any operation will materialize.
inline constexpr std::size_t kDenseCap = 4096;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments or malformed objects (precondition violations).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A requested dense object would exceed kDenseCap.
class DimensionOverflow : public Error {
 public:
  using Error::Error;
};

struct Factor {
  std::string name;
  std::size_t cardinality = 0;

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// Finite labelled set of histories. When factored, history i decodes to a
/// tuple of property values in mixed radix with the first factor most
/// significant.
class HistorySpace {
 public:
  HistorySpace(std::vector<std::string> labels,
               std::optional<std::vector<Factor>> factors = std::nullopt);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::optional<std::vector<Factor>>& factors() const { return factors_; }
  bool factored() const { return factors_.has_value(); }

  std::vector<std::size_t> decode(std::size_t index) const;
  std::size_t encode(const std::vector<std::size_t>& tuple) const;

  friend bool operator==(const HistorySpace& a, const HistorySpace& b) {
    return a.labels_ == b.labels_ && a.factors_ == b.factors_;
  }

 private:
  std::vector<std::string> labels_;
  std::optional<std::vector<Factor>> factors_;
};

using SpacePtr = std::shared_ptr<const HistorySpace>;

SpacePtr make_space(std::vector<std::string> labels,
                    std::optional<std::vector<Factor>> factors = std::nullopt);

/// Factored space with labels "(v1,v2,...)" over the given cardinalities.
SpacePtr make_factored_space(const std::vector<Factor>& factors);

/// Cartesian product; labels joined with "⋈", factors concatenated,
/// index(i,j) = i*s2.size() + j.
SpacePtr space_product(const SpacePtr& s1, const SpacePtr& s2);

bool same_space(const SpacePtr& a, const SpacePtr& b);

/// Subset of a history space as a {0,1} indicator.
class Event {
 public:
  Event(SpacePtr space, std::vector<bool> indicator);

  static Event empty(SpacePtr space);
  static Event full(SpacePtr space);
  static Event from_indices(SpacePtr space, const std::vector<std::size_t>& indices);

  const SpacePtr& space() const { return space_; }
  const std::vector<bool>& indicator() const { return indicator_; }
  bool contains(std::size_t i) const { return indicator_[i]; }
  std::vector<std::size_t> indices() const;
  std::size_t weight() const;
  RealVector vector() const;

  friend bool operator==(const Event& a, const Event& b) {
    return same_space(a.space_, b.space_) && a.indicator_ == b.indicator_;
  }

 private:
  SpacePtr space_;
  std::vector<bool> indicator_;
};

/// Disjoint events covering the space.
class Partition {
 public:
  Partition(SpacePtr space, std::vector<Event> cells);

  const SpacePtr& space() const { return space_; }
  const std::vector<Event>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }

 private:
  SpacePtr space_;
  std::vector<Event> cells_;
};

enum class ValidationLevel { Raw, Hermitian, Normalized, WeaklyPositive, StronglyPositive };

const char* to_string(ValidationLevel level);

/// Hermitian complex matrix over a history space. Immutable; the validation
/// level only ever records checks that have actually been run.
class DecoherenceFunctional {
 public:
  DecoherenceFunctional(SpacePtr space, Matrix matrix,
                        ValidationLevel level = ValidationLevel::Raw);

  const SpacePtr& space() const { return space_; }
  const Matrix& matrix() const { return matrix_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  ValidationLevel level() const { return level_; }

  /// Copy carrying a higher validation level; never downgrades.
  DecoherenceFunctional with_level(ValidationLevel level) const;

 private:
  SpacePtr space_;
  Matrix matrix_;
  ValidationLevel level_;
};

/// Validates hermiticity (and optionally normalization) and returns a DF at
/// level Hermitian or Normalized.
DecoherenceFunctional df_from_matrix(const Matrix& m, SpacePtr space,
                                     bool require_normalized = false,
                                     const Tolerances& tol = {});

/// D(A|B) = <A|D|B>.
Complex df_evaluate(const DecoherenceFunctional& d, const Event& a, const Event& b);

/// Sum over i in a, j in b of m(i, j).
template <typename Derived>
typename Derived::Scalar bilinear_sum(const Eigen::MatrixBase<Derived>& m,
                                      const std::vector<std::size_t>& a,
                                      const std::vector<std::size_t>& b) {
  typename Derived::Scalar acc(0);
  for (auto i : a)
    for (auto j : b) acc += m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return acc;
}

/// The singleton DF [1] on a one-history space.
DecoherenceFunctional unit_df();

/// Diagonal DF from a probability vector.
DecoherenceFunctional classical_df(const std::vector<double>& p, const Tolerances& tol = {});

}  // namespace dflab
