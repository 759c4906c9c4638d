// dflab: batch front end for decoherence-functional checks.
//
// Exit codes: 0 success, 1 a checked property fails, 2 usage or input error.

#include "dflab/axioms.hpp"
#include "dflab/bell.hpp"
#include "dflab/compose.hpp"
#include "dflab/core.hpp"
#include "dflab/json_io.hpp"
#include "dflab/lemma1.hpp"
#include "dflab/maximality.hpp"
#include "dflab/quantum.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace dflab;

constexpr int kOk = 0;
constexpr int kPropertyFailed = 1;
constexpr int kInputError = 2;

constexpr std::size_t kPrintDimLimit = 16;

enum class OutputFormat { Human, Json };

struct RunConfig {
  unsigned workers = 1;
  Tolerances tol;
  OutputFormat format = OutputFormat::Human;

  PositivityOptions positivity() const {
    PositivityOptions o;
    o.workers = workers;
    return o;
  }
};

unsigned resolve_workers(unsigned flag) {
  if (const char* env = std::getenv("DFLAB_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw InvalidArgument("DFLAB_WORKERS must be a positive integer");
  }
  if (flag < 1) throw InvalidArgument("--workers must be at least 1");
  return flag;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

std::string fmt(Complex c) {
  if (c.imag() == 0.0) return fmt(c.real());
  std::ostringstream os;
  os << std::setprecision(6) << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i";
  return os.str();
}

void print_matrix(std::ostream& os, const DecoherenceFunctional& d) {
  const auto& m = d.matrix();
  if (d.dim() > kPrintDimLimit) {
    os << "matrix: dim " << d.dim() << ", Frobenius norm " << fmt(m.norm()) << ", max |entry| "
       << fmt(m.cwiseAbs().maxCoeff()) << ", diagonal in [" << fmt(m.diagonal().real().minCoeff()) << ", "
       << fmt(m.diagonal().real().maxCoeff()) << "]\n";
    return;
  }
  os << "matrix (dim " << d.dim() << "):\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << "  " << std::setw(12) << d.space()->labels()[static_cast<std::size_t>(i)] << " |";
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << ' ' << std::setw(12) << fmt(m(i, j));
    os << '\n';
  }
}

std::string witness_string(const PositivityReport& r) {
  if (!r.witness) return "none";
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (auto i : r.witness->indices()) {
    os << (first ? "" : ", ") << i;
    first = false;
  }
  os << "} value " << fmt(r.witness_value.value_or(0.0));
  return os.str();
}

void print_positivity(std::ostream& os, const std::string& title, const PositivityReport& r) {
  os << title << ": " << to_string(r.verdict) << " (" << to_string(r.strategy) << ", " << r.vectors_checked
     << " vectors)";
  if (r.verdict == Verdict::Fail) {
    os << ", witness " << witness_string(r);
    if (r.witness_block) {
      os << ", block [";
      for (std::size_t k = 0; k < r.witness_block->size(); ++k) os << (k ? "," : "") << (*r.witness_block)[k];
      os << ']';
    }
  }
  os << '\n';
}

void print_validation(std::ostream& os, const ValidationReport& r) {
  os << "hermiticity: " << (r.hermiticity.ok ? "ok" : "FAIL") << " (max deviation "
     << fmt(r.hermiticity.max_deviation) << ")\n";
  os << "normalization: " << (r.normalization.ok ? "ok" : "FAIL") << " (<Omega|D|Omega> = "
     << fmt(r.normalization.value) << ")\n";
  if (r.weak_positivity) print_positivity(os, "weak positivity", *r.weak_positivity);
  if (r.strong_positivity)
    os << "strong positivity: " << (r.strong_positivity->is_sp ? "yes" : "no") << " (min eigenvalue "
       << fmt(r.strong_positivity->min_eigenvalue) << ")\n";
  os << "level: " << to_string(r.level) << '\n';
  os << "tolerances: eq " << r.tolerances.eq << ", pos " << r.tolerances.pos << ", spec " << r.tolerances.spec
     << '\n';
}

void emit(const RunConfig& cfg, const Json& j, const std::function<void(std::ostream&)>& human) {
  if (cfg.format == OutputFormat::Json)
    std::cout << j.dump(2) << '\n';
  else
    human(std::cout);
}

int cmd_validate(const RunConfig& cfg, const std::string& input, const std::string& level) {
  const auto d = df_from_json(read_json_file(input), cfg.tol);
  const auto rep = validate_df(d, cfg.tol, cfg.positivity());
  const auto wanted = level == "strong" ? ValidationLevel::StronglyPositive : ValidationLevel::WeaklyPositive;
  Json j = to_json(rep);
  j["requestedLevel"] = level;
  emit(cfg, j, [&](std::ostream& os) {
    print_matrix(os, d);
    print_validation(os, rep);
  });
  return rep.level >= wanted ? kOk : kPropertyFailed;
}

int cmd_compose(const RunConfig& cfg, const std::string& a_path, const std::optional<std::string>& b_path,
                std::optional<unsigned> power, bool check, bool block_reduced,
                const std::optional<std::string>& out) {
  const auto a = df_from_json(read_json_file(a_path), cfg.tol);
  std::optional<DecoherenceFunctional> composed;
  std::optional<PositivityReport> verdict;
  unsigned n = 2;

  if (b_path) {
    const auto b = df_from_json(read_json_file(*b_path), cfg.tol);
    composed = tensor(a, b);
    if (check) {
      auto opt = cfg.positivity();
      if (composed->dim() <= kMaxBruteForceDim && !block_reduced) {
        verdict = check_weak_positivity(*composed, cfg.tol, Strategy::BruteForce, opt);
      } else {
        opt.blocks = detect_blocks(*composed, cfg.tol);
        verdict = check_weak_positivity(*composed, cfg.tol, Strategy::BlockReduced, opt);
      }
    }
  } else {
    n = *power;
    if (out || !check || !block_reduced) {
      try {
        composed = tensor_power(a, n);
      } catch (const DimensionOverflow& e) {
        throw DimensionOverflow(std::string(e.what()) + "; use --check --block-reduced without --out");
      }
    }
    if (check)
      verdict = check_composability(a, n, block_reduced ? Strategy::BlockReduced : Strategy::BruteForce, cfg.tol,
                                    cfg.positivity());
  }

  if (out) write_json_file(*out, df_to_json(*composed));
  if (verdict) {
    emit(cfg, composability_json(n, *verdict), [&](std::ostream& os) {
      if (composed) print_matrix(os, *composed);
      print_positivity(os, "composability (n = " + std::to_string(n) + ")", *verdict);
    });
    return verdict->passed() ? kOk : kPropertyFailed;
  }
  if (!out) std::cout << df_to_json(*composed).dump(2) << '\n';
  return kOk;
}

int cmd_lemma1(const RunConfig& cfg, unsigned n, std::optional<double> lambda, std::optional<double> eps) {
  if (n < 1) throw InvalidArgument("--n must be at least 1");
  const auto rep = run_lemma1(n, lambda, eps, cfg.tol, cfg.positivity());
  emit(cfg, to_json(rep), [&](std::ostream& os) {
    os << "lambda = " << fmt(rep.params.lambda) << ", epsilon = " << fmt(rep.params.epsilon) << ", n = " << n
       << '\n';
    os << "single copy: level " << to_string(rep.single_copy.level) << '\n';
    print_positivity(os, "n-copy blocks", rep.n_copy_verdict);
    if (rep.n_copy_brute_force) print_positivity(os, "n-copy brute force", *rep.n_copy_brute_force);
    if (rep.next_copy_brute_force) print_positivity(os, "(n+1)-copy brute force", *rep.next_copy_brute_force);
    os << "(n+1)-copy witness indices: ";
    for (std::size_t k = 0; k < rep.witness_indices.size(); ++k) os << (k ? ", " : "") << rep.witness_indices[k];
    os << "\nwitness value: closed form " << fmt(rep.witness_value) << ", "
       << (rep.numeric_materialized ? "matrix " : "factorized ") << fmt(rep.witness_value_numeric)
       << ", factorized " << fmt(rep.witness_value_factorized) << '\n';
    os << "lemma holds: " << (rep.lemma_holds ? "yes" : "no") << '\n';
  });
  return rep.lemma_holds ? kOk : kPropertyFailed;
}

Matrix matrix_input(const Json& j) {
  const auto dim = j.at("dim").get<std::size_t>();
  return matrix_from_json(j.at("entries"), dim);
}

int cmd_maximality(const RunConfig& cfg, const std::string& input, bool pnn) {
  const Json j = read_json_file(input);
  if (pnn) {
    const Matrix m = matrix_input(j);
    PnnSearchOptions opt;
    opt.workers = cfg.workers;
    const auto hit = pnn_violation_search(m, cfg.tol, opt);
    Json out{{"found", hit.has_value()}, {"violation", hit ? to_json(*hit) : Json(nullptr)}};
    emit(cfg, out, [&](std::ostream& os) {
      if (!hit) {
        os << "no violating partner found on the search grid\n";
        return;
      }
      os << "partner [[1, " << fmt(hit->t) << "], [" << fmt(hit->t) << ", " << fmt(hit->s) << "]] violates with "
         << "value " << fmt(hit->value) << " on {";
      for (std::size_t k = 0; k < hit->indices.size(); ++k) os << (k ? ", " : "") << hit->indices[k];
      os << "}\n";
    });
    return hit ? kOk : kPropertyFailed;
  }
  const auto d = df_from_json(j, cfg.tol);
  const auto spec = check_strong_positivity(d, cfg.tol);
  if (spec.is_sp) {
    Json out{{"stronglyPositive", true}, {"minEigenvalue", spec.min_eigenvalue}};
    emit(cfg, out, [&](std::ostream& os) {
      os << "functional is strongly positive (min eigenvalue " << fmt(spec.min_eigenvalue)
         << "); no partner exists\n";
    });
    return kPropertyFailed;
  }
  const auto rep = verify_lemma2(d, cfg.tol, cfg.positivity());
  emit(cfg, to_json(rep), [&](std::ostream& os) {
    os << "min eigenvalue: " << fmt(rep.min_eigenvalue) << '\n';
    os << "partner: D_v* on " << rep.partner.dim() << " histories\n";
    os << "witness: {";
    const auto idx = rep.witness.indices();
    for (std::size_t k = 0; k < idx.size(); ++k) os << (k ? ", " : "") << idx[k];
    os << "}\n";
    os << "<w|D x D'|w> = " << fmt(rep.lhs) << ", (1/m)<v|D|v> = " << fmt(rep.rhs)
       << (rep.matched ? " (match)" : " (MISMATCH)") << '\n';
    if (rep.composed_positivity) print_positivity(os, "composed weak positivity", *rep.composed_positivity);
    os << "positivity violated: " << (rep.violated ? "yes" : "no") << '\n';
  });
  return rep.matched && rep.violated ? kOk : kPropertyFailed;
}

int cmd_bell_check(const RunConfig& cfg, const std::string& df_path, const std::string& behavior_path,
                   const std::string& mode) {
  const auto d = df_from_json(read_json_file(df_path), cfg.tol);
  const auto behavior = behavior_from_json(read_json_file(behavior_path));
  behavior.validate(cfg.tol);
  const auto rep = check_behavior_consistency(d, behavior, mode == "weak" ? DecoherenceMode::Weak : DecoherenceMode::Strong,
                                              cfg.tol);
  emit(cfg, to_json(rep), [&](std::ostream& os) {
    for (const auto& c : rep.checks) {
      os << std::setw(12) << c.kind << " " << c.first;
      if (c.kind == "fixed") {
        os << "," << c.second;
      } else {
        os << " g=(";
        for (std::size_t k = 0; k < c.map.size(); ++k) os << (k ? "," : "") << c.map[k];
        os << ")";
      }
      os << "  off-diagonal " << fmt(c.max_off_diagonal) << "  diagonal deviation " << fmt(c.max_diagonal_deviation)
         << "  " << (c.passed ? "ok" : "FAIL") << '\n';
    }
    os << "worst deviation: " << fmt(rep.worst_deviation) << '\n';
    os << "consistent: " << (rep.passed ? "yes" : "no") << '\n';
  });
  return rep.passed ? kOk : kPropertyFailed;
}

struct GenArgs {
  std::string kind;
  std::optional<double> lambda;
  std::optional<double> eps;
  unsigned n = 1;
  std::optional<std::string> v;
  std::optional<std::string> p;
  std::optional<std::string> model;
  std::optional<std::string> out;
};

int cmd_gen(const RunConfig& cfg, const GenArgs& g) {
  Json result;
  if (g.kind == "lemma1") {
    const double lambda = g.lambda.value_or(2.0);
    const double eps = g.eps.value_or(lemma1_epsilon(lambda, g.n));
    result = df_to_json(lemma1_df(lambda, eps, cfg.tol));
  } else if (g.kind == "dv") {
    if (!g.v) throw InvalidArgument("gen dv needs --v");
    result = df_to_json(dv_family(vector_from_json(Json::parse(*g.v)), cfg.tol));
  } else if (g.kind == "classical") {
    if (!g.p) throw InvalidArgument("gen classical needs --p");
    result = df_to_json(classical_df(Json::parse(*g.p).get<std::vector<double>>(), cfg.tol));
  } else if (g.kind == "quantum" || g.kind == "behavior") {
    if (!g.model) throw InvalidArgument("gen " + g.kind + " needs --model");
    const auto model = model_from_json(read_json_file(*g.model));
    if (g.kind == "quantum") {
      result = df_to_json(quantum_df(model, cfg.tol));
    } else {
      model.validate(cfg.tol);
      result = behavior_to_json(quantum_behavior(model));
    }
  } else {
    throw InvalidArgument("unknown generator '" + g.kind + "'");
  }
  if (g.out)
    write_json_file(*g.out, result);
  else
    std::cout << result.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoherence functional checks: axioms, composition, and the composability lemmas"};
  app.require_subcommand(1);
  unsigned workers_flag = 1;
  app.add_option("--workers", workers_flag, "Worker threads for enumeration kernels")->check(CLI::PositiveNumber);

  RunConfig cfg;
  bool json = false;

  auto* validate = app.add_subcommand("validate", "Check every axiom of a DF file");
  std::string v_input, v_level = "weak";
  std::optional<double> v_tol;
  validate->add_option("--input", v_input, "DF JSON file")->required();
  validate->add_option("--tol", v_tol, "Tolerance for equalities and positivity")->check(CLI::PositiveNumber);
  validate->add_option("--level", v_level, "Required level")->check(CLI::IsMember({"weak", "strong"}));
  validate->add_flag("--json", json, "JSON report");

  auto* compose = app.add_subcommand("compose", "Tensor two DFs or take a tensor power");
  std::string c_a;
  std::optional<std::string> c_b, c_out;
  std::optional<unsigned> c_power;
  bool c_check = false, c_block = false;
  compose->add_option("--a", c_a, "First DF")->required();
  auto* opt_b = compose->add_option("--b", c_b, "Second DF");
  auto* opt_power = compose->add_option("--power", c_power, "Tensor power");
  opt_b->excludes(opt_power);
  opt_power->excludes(opt_b);
  compose->add_flag("--check", c_check, "Check weak positivity of the composition");
  compose->add_flag("--block-reduced", c_block, "Check through the block structure");
  compose->add_option("--out", c_out, "Write the composed DF here");
  compose->add_flag("--json", json, "JSON report");

  auto* lemma1 = app.add_subcommand("lemma1", "Run the n-but-not-(n+1) composability experiment");
  unsigned l_n = 1;
  std::optional<double> l_lambda, l_eps;
  lemma1->add_option("--n", l_n, "Copies that must coexist")->required();
  lemma1->add_option("--lambda", l_lambda, "Off-diagonal weight (> 1)");
  lemma1->add_option("--eps", l_eps, "Epsilon in (0, 1/(1+lambda)]");
  lemma1->add_flag("--json", json, "JSON report");

  auto* maximality = app.add_subcommand("maximality", "Build a quantum partner breaking a non-SP DF");
  std::string m_input;
  bool m_pnn = false;
  maximality->add_option("--input", m_input, "DF (or matrix) JSON file")->required();
  maximality->add_flag("--pnn", m_pnn, "Search 2x2 non-negative partners instead");
  maximality->add_flag("--json", json, "JSON report");

  auto* bell = app.add_subcommand("bell-check", "Check a DF against a Bell behavior");
  std::string b_df, b_behavior, b_mode = "strong";
  bell->add_option("--df", b_df, "DF JSON file")->required();
  bell->add_option("--behavior", b_behavior, "Behavior JSON file")->required();
  bell->add_option("--mode", b_mode, "Decoherence mode")->check(CLI::IsMember({"weak", "strong"}));
  bell->add_flag("--json", json, "JSON report");

  auto* gen = app.add_subcommand("gen", "Generate a DF (or behavior) file");
  GenArgs g;
  gen->add_option("kind", g.kind, "lemma1 | dv | classical | quantum | behavior")
      ->required()
      ->check(CLI::IsMember({"lemma1", "dv", "classical", "quantum", "behavior"}));
  gen->add_option("--lambda", g.lambda, "lemma1: lambda");
  gen->add_option("--eps", g.eps, "lemma1: epsilon (default from --n)");
  gen->add_option("--n", g.n, "lemma1: copies used to pick epsilon");
  gen->add_option("--v", g.v, "dv: JSON vector, entries real or [re, im]");
  gen->add_option("--p", g.p, "classical: JSON probability vector");
  gen->add_option("--model", g.model, "quantum/behavior: QuantumModel JSON file");
  gen->add_option("--out", g.out, "Output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    cfg.workers = resolve_workers(workers_flag);
    cfg.format = json ? OutputFormat::Json : OutputFormat::Human;
    if (*validate) {
      if (v_tol) cfg.tol.eq = cfg.tol.pos = *v_tol;
      return cmd_validate(cfg, v_input, v_level);
    }
    if (*compose) {
      if (!c_b && !c_power) throw InvalidArgument("compose needs --b or --power");
      return cmd_compose(cfg, c_a, c_b, c_power, c_check, c_block, c_out);
    }
    if (*lemma1) return cmd_lemma1(cfg, l_n, l_lambda, l_eps);
    if (*maximality) return cmd_maximality(cfg, m_input, m_pnn);
    if (*bell) return cmd_bell_check(cfg, b_df, b_behavior, b_mode);
    if (*gen) return cmd_gen(cfg, g);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "dflab: malformed JSON: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "dflab: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
