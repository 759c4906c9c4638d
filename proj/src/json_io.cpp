#include "dflab/json_io.hpp"

#include <fstream>
#include <sstream>

namespace dflab {

namespace {

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InvalidArgument("complex entry must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json complex_to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw InvalidArgument(std::string("missing field '") + name + "'");
  return j.at(name);
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(complex_to_json(m(i, j)));
  return out;
}

Matrix matrix_from_json(const Json& j, std::size_t dim) {
  if (!j.is_array() || j.size() != dim * dim)
    throw InvalidArgument("entries must hold dim^2 = " + std::to_string(dim * dim) + " values");
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = complex_from_json(j[static_cast<std::size_t>(i * n + k)]);
  if (!m.allFinite()) throw InvalidArgument("matrix has non-finite entries");
  return m;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("vector must be a non-empty array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

Json df_to_json(const DecoherenceFunctional& d) {
  Json out;
  out["dim"] = d.dim();
  out["labels"] = d.space()->labels();
  if (d.space()->factors()) {
    Json f = Json::array();
    for (const auto& x : *d.space()->factors()) f.push_back(Json::array({x.name, x.cardinality}));
    out["factors"] = f;
  } else {
    out["factors"] = nullptr;
  }
  out["entries"] = matrix_to_json(d.matrix());
  return out;
}

DecoherenceFunctional df_from_json(const Json& j, const Tolerances& tol) {
  const auto& dim_j = field(j, "dim");
  if (!dim_j.is_number_integer() || dim_j.get<long long>() < 1) throw InvalidArgument("dim must be a positive integer");
  const auto dim = dim_j.get<std::size_t>();
  const auto& labels_j = field(j, "labels");
  if (!labels_j.is_array()) throw InvalidArgument("labels must be an array");
  std::vector<std::string> labels;
  for (const auto& l : labels_j) {
    if (!l.is_string()) throw InvalidArgument("labels must be strings");
    labels.push_back(l.get<std::string>());
  }
  if (labels.size() != dim) throw InvalidArgument("labels length does not match dim");
  std::optional<std::vector<Factor>> factors;
  if (j.contains("factors") && !j.at("factors").is_null()) {
    factors.emplace();
    for (const auto& f : j.at("factors")) {
      if (!f.is_array() || f.size() != 2 || !f[0].is_string() || !f[1].is_number_integer())
        throw InvalidArgument("factors must be [name, cardinality] pairs");
      factors->push_back({f[0].get<std::string>(), f[1].get<std::size_t>()});
    }
  }
  auto space = make_space(std::move(labels), std::move(factors));
  return df_from_matrix(matrix_from_json(field(j, "entries"), dim), std::move(space), false, tol);
}

Json model_to_json(const QuantumModel& model) {
  Json out;
  out["dim"] = model.hilbert_dim();
  out["rho"] = matrix_to_json(model.rho);
  auto families = [](const std::vector<ProjectorFamily>& side) {
    Json arr = Json::array();
    for (const auto& fam : side) {
      Json ps = Json::array();
      for (const auto& p : fam.projectors) ps.push_back(matrix_to_json(p));
      arr.push_back(ps);
    }
    return arr;
  };
  out["alice"] = families(model.alice);
  out["bob"] = families(model.bob);
  return out;
}

QuantumModel model_from_json(const Json& j) {
  const auto dim = field(j, "dim").get<std::size_t>();
  QuantumModel model;
  model.rho = matrix_from_json(field(j, "rho"), dim);
  auto families = [&](const Json& arr, const char* prefix) {
    if (!arr.is_array()) throw InvalidArgument(std::string(prefix) + " must be an array of families");
    std::vector<ProjectorFamily> out;
    for (std::size_t k = 0; k < arr.size(); ++k) {
      ProjectorFamily fam{prefix + std::to_string(k + 1), {}};
      for (const auto& p : arr[k]) fam.projectors.push_back(matrix_from_json(p, dim));
      out.push_back(std::move(fam));
    }
    return out;
  };
  model.alice = families(field(j, "alice"), "x");
  model.bob = families(field(j, "bob"), "y");
  return model;
}

Json behavior_to_json(const Behavior& b) {
  Json out;
  out["m"] = b.settings();
  out["d"] = b.outcomes();
  Json p = Json::array();
  for (std::size_t x = 0; x < b.settings(); ++x) {
    Json px = Json::array();
    for (std::size_t y = 0; y < b.settings(); ++y) {
      Json pxy = Json::array();
      for (std::size_t a = 0; a < b.outcomes(); ++a) {
        Json row = Json::array();
        for (std::size_t c = 0; c < b.outcomes(); ++c) row.push_back(b(x, y, a, c));
        pxy.push_back(row);
      }
      px.push_back(pxy);
    }
    p.push_back(px);
  }
  out["P"] = p;
  return out;
}

Behavior behavior_from_json(const Json& j) {
  const auto m = field(j, "m").get<std::size_t>();
  const auto d = field(j, "d").get<std::size_t>();
  const auto& p = field(j, "P");
  std::vector<double> table;
  auto check = [](const Json& a, std::size_t n) {
    if (!a.is_array() || a.size() != n) throw InvalidArgument("behavior table has the wrong shape");
  };
  check(p, m);
  for (const auto& px : p) {
    check(px, m);
    for (const auto& pxy : px) {
      check(pxy, d);
      for (const auto& row : pxy) {
        check(row, d);
        for (const auto& v : row) table.push_back(v.get<double>());
      }
    }
  }
  return Behavior(m, d, std::move(table));
}

Json to_json(const Tolerances& tol) {
  return Json{{"eq", tol.eq}, {"pos", tol.pos}, {"spec", tol.spec}};
}

Json to_json(const PositivityReport& r) {
  Json out;
  out["verdict"] = to_string(r.verdict);
  out["strategy"] = to_string(r.strategy);
  out["witness"] = r.witness ? Json(r.witness->indices()) : Json(nullptr);
  out["witnessValue"] = optional_number(r.witness_value);
  out["witnessBlock"] = r.witness_block ? Json(*r.witness_block) : Json(nullptr);
  out["vectorsChecked"] = r.vectors_checked;
  out["tolerance"] = r.tolerance;
  return out;
}

Json to_json(const SpectralReport& r) {
  return Json{{"minEigenvalue", r.min_eigenvalue},
              {"minEigenvector", vector_to_json(r.min_eigenvector)},
              {"isSP", r.is_sp},
              {"residual", r.residual}};
}

Json to_json(const DecoherenceReport& r) {
  Json out;
  out["mode"] = to_string(r.mode);
  out["verdict"] = r.verdict;
  out["probabilities"] = r.probabilities ? Json(*r.probabilities) : Json(nullptr);
  out["maxOffDiagonal"] = r.max_off_diagonal;
  return out;
}

Json to_json(const ValidationReport& r) {
  Json out;
  out["level"] = to_string(r.level);
  out["hermiticity"] = Json{{"ok", r.hermiticity.ok}, {"maxDeviation", r.hermiticity.max_deviation}};
  out["normalization"] = Json{{"ok", r.normalization.ok}, {"value", complex_to_json(r.normalization.value)}};
  out["weakPositivity"] = r.weak_positivity ? to_json(*r.weak_positivity) : Json(nullptr);
  out["strongPositivity"] = r.strong_positivity ? to_json(*r.strong_positivity) : Json(nullptr);
  out["tolerances"] = to_json(r.tolerances);
  return out;
}

Json composability_json(unsigned n, const PositivityReport& r) {
  Json out;
  out["n"] = n;
  out["strategy"] = to_string(r.strategy);
  out["verdict"] = to_string(r.verdict);
  out["witnessBlock"] = r.witness_block ? Json(*r.witness_block) : Json(nullptr);
  out["witnessIndices"] = r.witness ? Json(r.witness->indices()) : Json(nullptr);
  out["witnessValue"] = optional_number(r.witness_value);
  return out;
}

Json to_json(const Lemma1Report& r) {
  Json out;
  out["params"] = Json{{"lambda", r.params.lambda}, {"epsilon", r.params.epsilon}, {"n", r.params.n}};
  out["singleCopy"] = to_json(r.single_copy);
  out["nCopyVerdict"] = to_json(r.n_copy_verdict);
  out["nCopyBruteForce"] = r.n_copy_brute_force ? to_json(*r.n_copy_brute_force) : Json(nullptr);
  out["nextCopyBruteForce"] = r.next_copy_brute_force ? to_json(*r.next_copy_brute_force) : Json(nullptr);
  out["witnessIndices"] = r.witness_indices;
  out["witnessValue"] = r.witness_value;
  out["witnessValueNumeric"] = r.witness_value_numeric;
  out["witnessValueFactorized"] = r.witness_value_factorized;
  out["numericMaterialized"] = r.numeric_materialized;
  out["lemmaHolds"] = r.lemma_holds;
  out["tolerances"] = to_json(r.tolerances);
  return out;
}

Json to_json(const Lemma2Report& r) {
  Json out;
  out["inputDim"] = r.input_dim;
  out["minEigenvalue"] = r.min_eigenvalue;
  out["v"] = vector_to_json(r.v);
  out["partner"] = df_to_json(r.partner);
  out["witness"] = r.witness.indices();
  out["lhs"] = r.lhs;
  out["rhs"] = r.rhs;
  out["matched"] = r.matched;
  out["violated"] = r.violated;
  out["composedPositivity"] = r.composed_positivity ? to_json(*r.composed_positivity) : Json(nullptr);
  out["tolerances"] = to_json(r.tolerances);
  return out;
}

Json to_json(const BellConsistencyReport& r) {
  Json out;
  out["mode"] = to_string(r.mode);
  out["passed"] = r.passed;
  out["worstDeviation"] = r.worst_deviation;
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json cj;
    cj["kind"] = c.kind;
    cj["first"] = c.first;
    if (c.kind == "fixed")
      cj["second"] = c.second;
    else
      cj["map"] = c.map;
    cj["maxOffDiagonal"] = c.max_off_diagonal;
    cj["maxDiagonalDeviation"] = c.max_diagonal_deviation;
    cj["passed"] = c.passed;
    checks.push_back(cj);
  }
  out["partitions"] = checks;
  out["tolerances"] = to_json(r.tolerances);
  return out;
}

Json to_json(const PnnViolation& r) {
  return Json{{"partner", matrix_to_json(r.partner)},
              {"t", r.t},
              {"s", r.s},
              {"witness", r.indices},
              {"value", r.value}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return Json::parse(in);
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace dflab
