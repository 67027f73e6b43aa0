#include "survey/io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "survey/errors.hpp"

namespace survey {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        const auto first = cell.find_first_not_of(" \t\r");
        const auto last = cell.find_last_not_of(" \t\r");
        cells.push_back(first == std::string::npos ? std::string() : cell.substr(first, last - first + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("not a number: '" + s + "'");
    }
    if (used != s.size()) throw InvalidArgument("not a number: '" + s + "'");
    return v;
}

std::size_t parse_index(const std::string& s) {
    const double v = parse_double(s);
    if (v < 0.0 || v != std::floor(v)) throw InvalidArgument("not an index: '" + s + "'");
    return static_cast<std::size_t>(v);
}

// Header plus rows, skipping blank lines.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw InvalidArgument("missing CSV column '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - header.begin());
    }
};

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split_csv_line(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size()) throw InvalidArgument("ragged CSV row: " + line);
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) throw InvalidArgument("empty CSV input");
    return t;
}

std::vector<double> doubles(const Json& j, const char* key) {
    if (!j.contains(key)) throw InvalidArgument(std::string("missing key '") + key + "'");
    return j.at(key).get<std::vector<double>>();
}

Json node_to_json(const std::vector<TreeNode>& nodes, std::size_t id) {
    const auto& node = nodes[id];
    if (node.leaf) return Json{{"leaf", true}, {"label", node.label}};
    return Json{{"leaf", false},
                {"label", node.label},
                {"feature", node.feature},
                {"threshold", node.threshold},
                {"left", node_to_json(nodes, node.left)},
                {"right", node_to_json(nodes, node.right)}};
}

std::size_t node_from_json(const Json& j, std::vector<TreeNode>& nodes) {
    const std::size_t id = nodes.size();
    nodes.push_back({});
    TreeNode node;
    node.leaf = j.value("leaf", !j.contains("left"));
    node.label = j.value("label", 1);
    if (node.label != 1 && node.label != -1) throw InvalidArgument("tree labels must be -1 or +1");
    if (!node.leaf) {
        node.feature = j.at("feature").get<std::size_t>();
        node.threshold = j.at("threshold").get<double>();
        node.left = node_from_json(j.at("left"), nodes);
        node.right = node_from_json(j.at("right"), nodes);
    }
    nodes[id] = node;
    return id;
}

Json summary_json(const VariantSummary& s) {
    return Json{{"mean", s.mean}, {"std_dev", s.std_dev}, {"count", s.count}};
}

}  // namespace

Json to_json(const DesignSpec& spec) {
    Json j;
    j["kind"] = std::string(to_string(spec.kind()));
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PoissonParams>) {
                j["p"] = p.p;
            } else if constexpr (std::is_same_v<T, SrsworParams>) {
                j["N"] = p.population_size;
                j["n"] = p.sample_size;
            } else if constexpr (std::is_same_v<T, RejectiveParams>) {
                j["p"] = p.p;
                j["n"] = p.sample_size;
            } else if constexpr (std::is_same_v<T, StratifiedParams>) {
                j["strata"] = p.strata;
                j["n_k"] = p.stratum_sample_sizes;
            } else {
                j["pi"] = p.pi;
            }
        },
        spec.params());
    return j;
}

DesignSpec design_from_json(const Json& j) {
    try {
        switch (design_kind_from_string(j.at("kind").get<std::string>())) {
            case DesignKind::Poisson: return DesignSpec::poisson(doubles(j, "p"));
            case DesignKind::Srswor: return DesignSpec::srswor(j.at("N").get<std::size_t>(), j.at("n").get<std::size_t>());
            case DesignKind::Rejective: return DesignSpec::rejective(doubles(j, "p"), j.at("n").get<std::size_t>());
            case DesignKind::Stratified:
                return DesignSpec::stratified(j.at("strata").get<std::vector<std::vector<std::size_t>>>(),
                                              j.at("n_k").get<std::vector<std::size_t>>());
            case DesignKind::RaoSampford: return DesignSpec::rao_sampford(doubles(j, "pi"));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidDesign(std::string("malformed design document: ") + e.what());
    }
    throw InvalidDesign("unknown design kind");
}

void write_enumerated_csv(std::ostream& out, const EnumeratedDesign& design) {
    out << "subset_bitmask,probability\n" << std::setprecision(17);
    design.for_each_support([&](SubsetMask s, double m) { out << s << ',' << m << '\n'; });
}

Population read_population_csv(std::istream& in) {
    const auto t = read_csv(in);
    const auto label_col = t.column("label");
    std::vector<std::size_t> feature_cols;
    for (std::size_t k = 0;; ++k) {
        const auto it = std::find(t.header.begin(), t.header.end(), "f_" + std::to_string(k));
        if (it == t.header.end()) break;
        feature_cols.push_back(static_cast<std::size_t>(it - t.header.begin()));
    }
    if (feature_cols.empty()) throw InvalidArgument("population CSV needs columns f_0, ..., f_{d-1}");
    std::vector<double> x;
    std::vector<int> y;
    for (const auto& row : t.rows) {
        for (auto c : feature_cols) x.push_back(parse_double(row[c]));
        const double label = parse_double(row[label_col]);
        if (label != 1.0 && label != -1.0) throw InvalidArgument("labels must be -1 or +1");
        y.push_back(static_cast<int>(label));
    }
    return Population(feature_cols.size(), std::move(x), std::move(y));
}

void write_population_csv(std::ostream& out, const Population& pop) {
    for (std::size_t k = 0; k < pop.dims(); ++k) out << "f_" << k << ',';
    out << "label\n" << std::setprecision(17);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        for (double v : pop.row(i)) out << v << ',';
        out << pop.label(i) << '\n';
    }
}

std::vector<double> read_indexed_csv(std::istream& in, std::string_view column) {
    const auto t = read_csv(in);
    const auto ic = t.column("index");
    const auto vc = t.column(column);
    std::vector<double> values(t.rows.size());
    std::vector<bool> seen(t.rows.size(), false);
    for (const auto& row : t.rows) {
        const auto i = parse_index(row[ic]);
        if (i >= values.size() || seen[i]) throw InvalidArgument("indices must cover 0..N-1 exactly once");
        seen[i] = true;
        values[i] = parse_double(row[vc]);
    }
    return values;
}

void write_indexed_csv(std::ostream& out, std::span<const double> values, std::string_view column) {
    out << "index," << column << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < values.size(); ++i) out << i << ',' << values[i] << '\n';
}

SampleIndicator read_sample_csv(std::istream& in) {
    std::vector<std::uint8_t> bits;
    for (double v : read_indexed_csv(in, "included")) {
        if (v != 0.0 && v != 1.0) throw InvalidArgument("sample indicators must be 0 or 1");
        bits.push_back(static_cast<std::uint8_t>(v));
    }
    return SampleIndicator(std::move(bits));
}

void write_sample_csv(std::ostream& out, const SampleIndicator& sample) {
    out << "index,included\n";
    for (std::size_t i = 0; i < sample.population_size(); ++i) out << i << ',' << (sample.contains(i) ? 1 : 0) << '\n';
}

Json to_json(const LinearModel& m) {
    return Json{{"type", "linear"}, {"theta", m.theta}, {"b", m.b}, {"degree", m.degree}, {"lambda", m.lambda}};
}

Json to_json(const TreeModel& m) {
    if (m.nodes.empty()) throw InvalidArgument("empty tree");
    return Json{{"type", "tree"},
                {"max_depth", m.options.max_depth},
                {"min_leaf_weight", m.options.min_leaf_weight},
                {"root", node_to_json(m.nodes, 0)}};
}

Json to_json(const Stump& s) {
    return Json{{"type", "stump"}, {"feature", s.feature}, {"threshold", s.threshold}, {"polarity", s.polarity}};
}

Json to_json(const ClassifierModel& m) {
    return std::visit([](const auto& v) { return to_json(v); }, m);
}

ClassifierModel classifier_from_json(const Json& j) {
    try {
        if (j.contains("theta")) {
            LinearModel m;
            m.theta = doubles(j, "theta");
            m.b = j.at("b").get<double>();
            m.degree = j.value("degree", 1);
            m.lambda = j.value("lambda", 0.0);
            return m;
        }
        if (j.contains("root")) {
            TreeModel m;
            m.options.max_depth = j.value("max_depth", m.options.max_depth);
            m.options.min_leaf_weight = j.value("min_leaf_weight", m.options.min_leaf_weight);
            node_from_json(j.at("root"), m.nodes);
            return m;
        }
        if (j.contains("threshold") && j.contains("polarity")) {
            Stump s{j.value("feature", std::size_t{0}), j.at("threshold").get<double>(), j.at("polarity").get<int>()};
            if (s.polarity != 1 && s.polarity != -1) throw InvalidArgument("stump polarity must be -1 or +1");
            return s;
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed model document: ") + e.what());
    }
    throw InvalidArgument("unrecognised model document");
}

Classifier as_classifier(const ClassifierModel& m) {
    return std::visit(
        [](const auto& v) -> Classifier {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Stump>) {
                return v;
            } else {
                return [v](std::span<const double> x) { return v.predict(x); };
            }
        },
        m);
}

Json to_json(const BoundInputs& in) {
    Json j{{"N", in.N},   {"n", in.n},         {"V", in.V},   {"delta", in.delta},       {"kappa", in.kappa},
           {"kappa_star", in.kappa_star},      {"C", in.C},   {"C_unspecified", true},   {"tv", in.tv},
           {"bias_gap", in.bias_gap}};
    if (in.log_class_size) j["log_class_size"] = *in.log_class_size;
    return j;
}

BoundInputs bound_inputs_from_json(const Json& j) {
    BoundInputs in;
    try {
        in.N = j.value("N", in.N);
        in.n = j.value("n", in.n);
        in.V = j.value("V", in.V);
        in.delta = j.value("delta", in.delta);
        in.kappa = j.value("kappa", in.kappa);
        in.kappa_star = j.value("kappa_star", in.kappa_star);
        in.C = j.value("C", in.C);
        in.tv = j.value("tv", in.tv);
        in.bias_gap = j.value("bias_gap", in.bias_gap);
        if (j.contains("log_class_size")) in.log_class_size = j.at("log_class_size").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed bound inputs: ") + e.what());
    }
    in.validate();
    return in;
}

namespace {

Json terms_json(const ExcessTerms& t) {
    return Json{{"estimation", t.estimation}, {"estimation_linear", t.estimation_linear},
                {"vc", t.vc},                 {"concentration", t.concentration},
                {"coupling", t.coupling},     {"bias", t.bias},
                {"total", t.total}};
}

Json checks_json(const std::vector<TailCheck>& checks) {
    Json a = Json::array();
    for (const auto& c : checks) a.push_back({{"t", c.t}, {"observed", c.observed}, {"bound", c.bound}, {"valid", c.valid}});
    return a;
}

}  // namespace

Json to_json(const BoundReport& r) {
    Json j;
    j["inputs"] = to_json(r.inputs);
    j["complexity"] = r.inputs.complexity();
    j["prop1_deviation"] = r.deviation;
    j["prop1_excess"] = terms_json(r.prop1);
    j["theorem2"] = terms_json(r.theorem2);
    Json empirical = Json::object();
    if (!r.deviation_checks.empty()) empirical["deviation_tail"] = checks_json(r.deviation_checks);
    if (!r.bernstein_checks.empty()) empirical["bernstein_tail"] = checks_json(r.bernstein_checks);
    if (r.expected_excess) {
        empirical["expected_excess"] = *r.expected_excess;
        empirical["theorem2_valid"] = *r.theorem2_valid;
        empirical["smallest_valid_C"] = *r.smallest_C;
    }
    j["empirical"] = empirical;
    j["all_valid"] = r.all_valid();
    return j;
}

Json to_json(const SuiteResult& s) {
    return Json{{"name", s.name},           {"passed", s.passed},   {"instances", s.instances},
                {"skipped", s.skipped},     {"checks", s.checks},   {"violations", s.violations},
                {"worst", s.worst},         {"detail", s.detail}};
}

Json to_json(const ValidationReport& r) {
    Json suites = Json::array();
    for (const auto& s : r.suites) suites.push_back(to_json(s));
    return Json{{"max_N", r.options.max_N},
                {"instances", r.options.instances},
                {"seed", r.options.seed},
                {"corrupt_pi", r.options.corrupt_pi},
                {"suites", suites},
                {"all_passed", r.all_passed()}};
}

ExperimentConfig experiment_config_from_json(const Json& j, ExperimentConfig c) {
    try {
        if (j.contains("population")) {
            const auto& p = j.at("population");
            auto& s = c.population;
            s.dims = p.value("dims", s.dims);
            s.positive_mean = p.value("positive_mean", s.positive_mean);
            s.negative_mean = p.value("negative_mean", s.negative_mean);
            s.positive_variance = p.value("positive_variance", s.positive_variance);
            s.negative_variance = p.value("negative_variance", s.negative_variance);
            s.positive_train = p.value("positive_train", s.positive_train);
            s.negative_train = p.value("negative_train", s.negative_train);
            s.positive_test = p.value("positive_test", s.positive_test);
            s.negative_test = p.value("negative_test", s.negative_test);
        }
        c.pi_positive = j.value("pi_positive", c.pi_positive);
        c.pi_negative = j.value("pi_negative", c.pi_negative);
        c.replications = j.value("replications", c.replications);
        c.master_seed = j.value("master_seed", c.master_seed);
        c.select_lambda = j.value("select_lambda", c.select_lambda);
        c.threads = j.value("threads", c.threads);
        if (j.contains("svm")) {
            const auto& s = j.at("svm");
            c.svm.lambda = s.value("lambda", c.svm.lambda);
            c.svm.degree = s.value("degree", c.svm.degree);
            c.svm.epochs = s.value("epochs", c.svm.epochs);
            c.svm.schedule.eta0 = s.value("eta0", c.svm.schedule.eta0);
            c.svm.schedule.t0 = s.value("t0", c.svm.schedule.t0);
            c.svm.init_scale = s.value("init_scale", c.svm.init_scale);
            c.svm.standardize = s.value("standardize", c.svm.standardize);
        }
        if (j.contains("cv")) {
            const auto& s = j.at("cv");
            if (s.contains("lambda_grid")) c.cv.lambda_grid = doubles(s, "lambda_grid");
            c.cv.folds = s.value("folds", c.cv.folds);
        }
        if (j.contains("tree")) {
            const auto& s = j.at("tree");
            c.tree.max_depth = s.value("max_depth", c.tree.max_depth);
            c.tree.min_leaf_weight = s.value("min_leaf_weight", c.tree.min_leaf_weight);
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed experiment config: ") + e.what());
    }
    c.validate();
    return c;
}

Json to_json(const ExperimentConfig& c) {
    const auto& s = c.population;
    return Json{{"population",
                 {{"dims", s.dims},
                  {"positive_mean", s.positive_mean},
                  {"negative_mean", s.negative_mean},
                  {"positive_variance", s.positive_variance},
                  {"negative_variance", s.negative_variance},
                  {"positive_train", s.positive_train},
                  {"negative_train", s.negative_train},
                  {"positive_test", s.positive_test},
                  {"negative_test", s.negative_test}}},
                {"pi_positive", c.pi_positive},
                {"pi_negative", c.pi_negative},
                {"replications", c.replications},
                {"master_seed", c.master_seed},
                {"select_lambda", c.select_lambda},
                {"threads", c.threads},
                {"svm",
                 {{"lambda", c.svm.lambda},
                  {"degree", c.svm.degree},
                  {"epochs", c.svm.epochs},
                  {"eta0", c.svm.schedule.eta0},
                  {"t0", c.svm.schedule.t0},
                  {"init_scale", c.svm.init_scale},
                  {"standardize", c.svm.standardize}}},
                {"cv", {{"lambda_grid", c.cv.lambda_grid}, {"folds", c.cv.folds}}},
                {"tree", {{"max_depth", c.tree.max_depth}, {"min_leaf_weight", c.tree.min_leaf_weight}}}};
}

Json to_json(const ExperimentReport& r) {
    Json summary;
    for (std::size_t v = 0; v < kVariantCount; ++v) {
        summary[std::string(to_string(static_cast<Variant>(v)))] = summary_json(r.summary[v]);
    }
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json e;
        for (std::size_t v = 0; v < kVariantCount; ++v) e[std::string(to_string(static_cast<Variant>(v)))] = row.test_error[v];
        rows.push_back({{"replication", row.replication},
                        {"seed", row.seed},
                        {"sample_size", row.sample_size},
                        {"test_error", e},
                        {"lambda", {row.lambda[0], row.lambda[1], row.lambda[2]}},
                        {"error", row.error}});
    }
    return Json{{"config", to_json(r.config)},
                {"summary", summary},
                {"replications", rows},
                {"failed_replications", r.failed_replications},
                {"partial_failure", r.partial_failure()},
                {"svm_gap_positive", r.svm_gap_positive},
                {"tree_gap_positive", r.tree_gap_positive},
                {"runtime_seconds", r.runtime_seconds}};
}

void write_experiment_csv(std::ostream& out, const ExperimentReport& r) {
    out << "replication,seed,sample_size";
    for (std::size_t v = 0; v < kVariantCount; ++v) out << ',' << to_string(static_cast<Variant>(v));
    out << ",lambda_weighted,lambda_unweighted,lambda_srswor,error\n" << std::setprecision(17);
    for (const auto& row : r.rows) {
        out << row.replication << ',' << row.seed << ',' << row.sample_size;
        for (double e : row.test_error) out << ',' << e;
        for (double l : row.lambda) out << ',' << l;
        std::string err = row.error;
        std::replace(err.begin(), err.end(), ',', ';');
        out << ',' << err << '\n';
    }
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path);
    out << text;
}

}  // namespace survey
