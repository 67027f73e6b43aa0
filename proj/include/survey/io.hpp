#pragma once

// CSV and JSON boundaries: design specs, populations, inclusion vectors,
// sample indicators, models, bound/validation/experiment reports.

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "survey/designs.hpp"
#include "survey/experiment.hpp"
#include "survey/learners.hpp"
#include "survey/population.hpp"
#include "survey/report.hpp"
#include "survey/validation.hpp"

namespace survey {

using Json = nlohmann::json;

// {"kind": "...", "p": [...], "n": ..., "strata": [[...]], "n_k": [...]};
// srswor uses {"N", "n"}, rao_sampford uses {"pi"}.
Json to_json(const DesignSpec& spec);
DesignSpec design_from_json(const Json& j);

/// Columns subset_bitmask, probability; zero-mass subsets are omitted.
void write_enumerated_csv(std::ostream& out, const EnumeratedDesign& design);

/// Columns f_0, ..., f_{d-1}, label.
Population read_population_csv(std::istream& in);
void write_population_csv(std::ostream& out, const Population& pop);

/// Columns index, <column>; rows may come in any order but must cover 0..N-1.
std::vector<double> read_indexed_csv(std::istream& in, std::string_view column);
void write_indexed_csv(std::ostream& out, std::span<const double> values, std::string_view column);

/// Columns index, included (0/1).
SampleIndicator read_sample_csv(std::istream& in);
void write_sample_csv(std::ostream& out, const SampleIndicator& sample);

using ClassifierModel = std::variant<LinearModel, TreeModel, Stump>;
Json to_json(const LinearModel& m);
Json to_json(const TreeModel& m);
Json to_json(const Stump& s);
Json to_json(const ClassifierModel& m);
/// Recognises {"theta", ...}, nested tree nodes {"root": {...}} and {"feature", "threshold", "polarity"}.
ClassifierModel classifier_from_json(const Json& j);
Classifier as_classifier(const ClassifierModel& m);

Json to_json(const BoundInputs& in);
BoundInputs bound_inputs_from_json(const Json& j);
Json to_json(const BoundReport& r);

Json to_json(const SuiteResult& s);
Json to_json(const ValidationReport& r);

/// Keys mirror the struct fields; absent keys keep the defaults of `base`.
ExperimentConfig experiment_config_from_json(const Json& j, ExperimentConfig base);
Json to_json(const ExperimentConfig& c);
Json to_json(const ExperimentReport& r);
/// One row per replication: replication, seed, sample_size, one column per variant, lambdas, error.
void write_experiment_csv(std::ostream& out, const ExperimentReport& r);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace survey
