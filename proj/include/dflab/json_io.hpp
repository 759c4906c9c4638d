#pragma once

#include "dflab/axioms.hpp"
#include "dflab/bell.hpp"
#include "dflab/core.hpp"
#include "dflab/lemma1.hpp"
#include "dflab/maximality.hpp"
#include "dflab/quantum.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace dflab {

using Json = nlohmann::ordered_json;

/// Row-major list of [re, im] pairs.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, std::size_t dim);
Json vector_to_json(const Vector& v);
/// Accepts plain reals or [re, im] pairs.
Vector vector_from_json(const Json& j);

/// {"dim", "labels", "factors", "entries"}.
Json df_to_json(const DecoherenceFunctional& d);
/// Builds a DF and checks hermiticity; normalization is left to the caller.
DecoherenceFunctional df_from_json(const Json& j, const Tolerances& tol = {});

Json model_to_json(const QuantumModel& model);
QuantumModel model_from_json(const Json& j);

Json behavior_to_json(const Behavior& b);
Behavior behavior_from_json(const Json& j);

Json to_json(const Tolerances& tol);
Json to_json(const PositivityReport& r);
Json to_json(const SpectralReport& r);
Json to_json(const DecoherenceReport& r);
Json to_json(const ValidationReport& r);
Json to_json(const Lemma1Report& r);
Json to_json(const Lemma2Report& r);
Json to_json(const BellConsistencyReport& r);
Json to_json(const PnnViolation& r);

/// {"n", "strategy", "verdict", "witnessBlock", "witnessIndices", "witnessValue"}.
Json composability_json(unsigned n, const PositivityReport& r);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace dflab
