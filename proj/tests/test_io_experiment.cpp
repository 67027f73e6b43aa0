#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "survey/errors.hpp"
#include "survey/estimators.hpp"
#include "survey/experiment.hpp"
#include "survey/inclusion.hpp"
#include "survey/io.hpp"

using namespace survey;

namespace {

ExperimentConfig tiny_config() {
    auto c = ExperimentConfig::desk();
    c.population.dims = 2;
    c.population.positive_train = 300;
    c.population.negative_train = 300;
    c.population.positive_test = 100;
    c.population.negative_test = 100;
    c.pi_positive = 0.1;
    c.pi_negative = 0.3;
    c.replications = 3;
    c.svm.epochs = 100;
    c.select_lambda = false;
    c.threads = 2;
    return c;
}

}  // namespace

TEST_CASE("io: design specs round-trip through JSON") {
    const auto p = normalize_canonical(std::vector<double>{0.2, 0.4, 0.6, 0.8, 0.5}, 2.0);
    const std::vector<DesignSpec> specs{DesignSpec::poisson({0.1, 0.9, 0.5}), DesignSpec::srswor(7, 3),
                                        DesignSpec::rejective(p, 2),
                                        DesignSpec::stratified({{0, 2}, {1, 3, 4}}, {1, 2}),
                                        DesignSpec::rao_sampford(exact_pi_from_p(p, 2).pi)};
    for (const auto& spec : specs) {
        const auto j = to_json(spec);
        const auto back = design_from_json(Json::parse(j.dump()));
        CHECK(back.kind() == spec.kind());
        CHECK(to_json(back) == j);
        CHECK(j.at("kind").get<std::string>() == to_string(spec.kind()));
    }
    CHECK_THROWS_AS(design_from_json(Json{{"kind", "srswor"}, {"N", 3}, {"n", 5}}), InvalidDesign);
    CHECK_THROWS(design_from_json(Json{{"kind", "systematic"}}));
}

TEST_CASE("io: enumerated design CSV lists the support") {
    std::ostringstream out;
    write_enumerated_csv(out, enumerate_design(DesignSpec::srswor(3, 1)));
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "subset_bitmask,probability");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("io: population, indexed vectors and samples round-trip") {
    const Population pop(2, {0.5, -1.25, 3, 4e-7, -2, 1e10}, {1, -1, 1});
    std::stringstream buf;
    write_population_csv(buf, pop);
    const auto back = read_population_csv(buf);
    CHECK(back.size() == 3);
    CHECK(back.dims() == 2);
    for (std::size_t i = 0; i < 6; ++i) CHECK(back.features()[i] == pop.features()[i]);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.label(i) == pop.label(i));

    const std::vector<double> pi{0.1, 1.0 / 3.0, 0.7};
    std::stringstream ibuf;
    write_indexed_csv(ibuf, pi, "pi");
    CHECK(read_indexed_csv(ibuf, "pi") == pi);

    std::istringstream shuffled("index,pi\n2,0.7\n0,0.1\n1,0.2\n");
    CHECK(read_indexed_csv(shuffled, "pi") == std::vector<double>{0.1, 0.2, 0.7});
    std::istringstream gap("index,pi\n0,0.1\n2,0.7\n");
    CHECK_THROWS_AS(read_indexed_csv(gap, "pi"), InvalidArgument);

    const auto s = SampleIndicator::from_mask(5, 0b10110);
    std::stringstream sbuf;
    write_sample_csv(sbuf, s);
    CHECK(read_sample_csv(sbuf) == s);

    std::istringstream bad_label("f_0,label\n1.0,0\n");
    CHECK_THROWS_AS(read_population_csv(bad_label), InvalidArgument);
}

TEST_CASE("io: models round-trip and predict identically") {
    LinearModel lin;
    lin.theta = {0.5, -0.25, 0.125, 1.0, -1.0};
    lin.b = 0.3;
    lin.lambda = 1e-3;
    lin.degree = 2;
    TreeModel tree;
    tree.nodes = {TreeNode{false, 1, 1, 0.5, 1, 2}, TreeNode{true, -1}, TreeNode{true, 1}};
    const Stump st{1, -0.2, -1};

    Rng rng(1);
    std::normal_distribution<double> z;
    for (const ClassifierModel& m : {ClassifierModel{lin}, ClassifierModel{tree}, ClassifierModel{st}}) {
        const auto j = to_json(m);
        const auto back = classifier_from_json(Json::parse(j.dump()));
        CHECK(back.index() == m.index());
        CHECK(to_json(back) == j);
        const auto a = as_classifier(m);
        const auto b = as_classifier(back);
        for (int k = 0; k < 100; ++k) {
            const std::vector<double> x{z(rng), z(rng)};
            CHECK(a(x) == b(x));
        }
    }
    CHECK_THROWS(classifier_from_json(Json{{"type", "forest"}}));
}

TEST_CASE("io: bound inputs echo bit-exactly") {
    BoundInputs in;
    in.N = 12345;
    in.n = 678;
    in.V = 4;
    in.delta = 0.1 / 3.0;
    in.kappa = 1.0 + 1e-13;
    in.kappa_star = 2.7182818284590451;
    in.C = 0.3;
    in.tv = 0.0123456789;
    in.bias_gap = 1e-17;
    const auto back = bound_inputs_from_json(Json::parse(to_json(in).dump()));
    CHECK(back.N == in.N);
    CHECK(back.delta == in.delta);
    CHECK(back.kappa == in.kappa);
    CHECK(back.kappa_star == in.kappa_star);
    CHECK(back.tv == in.tv);
    CHECK(back.bias_gap == in.bias_gap);

    const auto report = to_json(bound_report(in));
    CHECK(report.at("inputs").at("delta").get<double>() == in.delta);
    CHECK(report.at("empirical").empty());
    CHECK(report.at("all_valid").get<bool>());
}

TEST_CASE("io: experiment config keeps defaults for absent keys") {
    const auto base = ExperimentConfig::desk();
    const auto c = experiment_config_from_json(Json{{"replications", 7}, {"pi_negative", 0.2}}, base);
    CHECK(c.replications == 7);
    CHECK(c.pi_negative == 0.2);
    CHECK(c.pi_positive == base.pi_positive);
    CHECK(c.population.positive_train == base.population.positive_train);
    const auto again = experiment_config_from_json(to_json(c), ExperimentConfig::full());
    CHECK(to_json(again) == to_json(c));
}

TEST_CASE("population generator: determinism and class means") {
    PopulationSpec spec;
    spec.positive_train = 4000;
    spec.negative_train = 4000;
    Rng a(5);
    Rng b(5);
    const auto da = gen_gaussian_population(spec, a);
    const auto db = gen_gaussian_population(spec, b);
    CHECK(std::equal(da.train.features().begin(), da.train.features().end(), db.train.features().begin()));
    CHECK(da.test.size() == 2000);
    for (std::size_t k = 0; k < spec.dims; ++k) {
        double pos = 0.0, neg = 0.0;
        for (std::size_t i = 0; i < 4000; ++i) pos += da.train.row(i)[k] / 4000;
        for (std::size_t i = 4000; i < 8000; ++i) neg += da.train.row(i)[k] / 4000;
        CHECK(std::abs(pos - 0.0) < 3 * 1.0 / std::sqrt(4000.0));
        CHECK(std::abs(neg - 1.0) < 3 * std::sqrt(10.0) / std::sqrt(4000.0));
    }
    spec.negative_variance = 0.0;
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
}

TEST_CASE("population generator: indistinguishable classes give coin-flip error") {
    PopulationSpec spec;
    spec.dims = 1;
    spec.negative_mean = 0.0;
    spec.negative_variance = 1.0;
    spec.positive_train = spec.negative_train = 500;
    Rng rng(8);
    const auto d = gen_gaussian_population(spec, rng);
    const auto tree = train_weighted_tree(d.train, SampleIndicator::full(1000), std::vector<double>(1000, 1.0),
                                          TreeOptions{4, 20.0});
    const Classifier clf = [&](std::span<const double> x) { return tree.predict(x); };
    CHECK(std::abs(test_error(d.test, clf).value - 0.5) <= 0.03 + 3 * 0.5 / std::sqrt(2000.0));
}

TEST_CASE("training design: sizes, SRSWOR reduction and exact marginals") {
    PopulationSpec spec;
    spec.dims = 1;
    Rng rng(1);
    const auto d = gen_gaussian_population(spec, rng);
    const auto design = build_rejective_training_design(d.train, 0.01, 0.1);
    REQUIRE(design.kind() == DesignKind::Rejective);
    CHECK(*design.fixed_size() == 1100);
    const auto pi = exact_pi_from_p(design.as<RejectiveParams>().p, 1100).pi;
    for (std::size_t i = 0; i < d.train.size(); ++i) {
        CHECK(std::abs(pi[i] - (d.train.label(i) == 1 ? 0.01 : 0.1)) <= 1e-8);
    }
    CHECK(build_rejective_training_design(d.train, 0.05, 0.05).kind() == DesignKind::Srswor);
    CHECK_THROWS_AS(build_rejective_training_design(d.train, 0.01, 0.10005), InvalidArgument);
}

TEST_CASE("experiment: deterministic, aggregates recomputable, CSV one row per replication") {
    const auto c = tiny_config();
    const auto a = run_experiment(c);
    auto c2 = c;
    c2.threads = 1;
    const auto b = run_experiment(c2);
    REQUIRE(a.rows.size() == 3);
    CHECK_FALSE(a.partial_failure());
    for (std::size_t r = 0; r < 3; ++r) {
        CHECK(a.rows[r].replication == r);
        CHECK(a.rows[r].seed == b.rows[r].seed);
        for (std::size_t v = 0; v < kVariantCount; ++v) CHECK(a.rows[r].test_error[v] == b.rows[r].test_error[v]);
    }
    for (std::size_t v = 0; v < kVariantCount; ++v) {
        std::vector<double> errs;
        for (const auto& row : a.rows) errs.push_back(row.test_error[v]);
        const double mean = std::accumulate(errs.begin(), errs.end(), 0.0) / 3;
        double ss = 0.0;
        for (double e : errs) ss += (e - mean) * (e - mean);
        CHECK(std::abs(a.summary[v].mean - mean) <= 1e-12);
        CHECK(std::abs(a.summary[v].std_dev - std::sqrt(ss / 2)) <= 1e-12);
        CHECK(a.summary[v].count == 3);
    }
    std::ostringstream csv;
    write_experiment_csv(csv, a);
    std::istringstream in(csv.str());
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 4);
    const auto j = to_json(a);
    CHECK(j.dump().find("svm_weighted") != std::string::npos);
}

TEST_CASE("experiment: a different master seed changes the draws") {
    auto c = tiny_config();
    c.replications = 1;
    const auto a = run_experiment(c);
    c.master_seed += 1;
    const auto b = run_experiment(c);
    CHECK(a.rows[0].seed != b.rows[0].seed);
}

TEST_CASE("validation report is deterministic under a fixed seed") {
    ValidationOptions o;
    o.max_N = 6;
    o.instances = 8;
    o.seed = 42;
    CHECK(to_json(run_validation_suite(o)).dump() == to_json(run_validation_suite(o)).dump());
}
