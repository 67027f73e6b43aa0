// survey: sampling designs, HT risk estimation, weighted learners and bounds.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>

#include "survey/designs.hpp"
#include "survey/errors.hpp"
#include "survey/estimators.hpp"
#include "survey/inclusion.hpp"
#include "survey/io.hpp"

using namespace survey;

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path);
    return in;
}

// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        write_text_file(path, text);
    }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

template <class F>
std::string to_text(F&& write) {
    std::ostringstream out;
    write(out);
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sampling designs, Horvitz-Thompson risk estimation and weighted learning"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "draw a sample from a design JSON");
    std::string design_path, sample_out, enumerate_out, pi_out;
    sample_cmd->add_option("design", design_path, "design spec JSON")->required();
    sample_cmd->add_option("--seed", seed, "master seed");
    sample_cmd->add_option("-o,--out", sample_out, "sample indicator CSV (default stdout)");
    sample_cmd->add_option("--enumerate", enumerate_out, "write the full design distribution CSV (N <= 20)");
    sample_cmd->add_option("--pi", pi_out, "write the inclusion probabilities CSV");

    // solve-pi
    auto* solve_cmd = app.add_subcommand("solve-pi", "canonical rejective parameters for target inclusion probabilities");
    std::string pi_in, p_out, design_out;
    double tolerance = 1e-9;
    std::size_t max_iter = 10'000;
    solve_cmd->add_option("pi", pi_in, "CSV with columns index, pi")->required();
    solve_cmd->add_option("-o,--out", p_out, "CSV with columns index, p (default stdout)");
    solve_cmd->add_option("--design", design_out, "also write the rejective design JSON");
    solve_cmd->add_option("--tol", tolerance, "sup-norm tolerance on pi");
    solve_cmd->add_option("--max-iter", max_iter, "iteration budget");

    // estimate
    auto* est_cmd = app.add_subcommand("estimate", "HT risk of a classifier from one sample");
    std::string pop_path, model_path, sample_in, est_out;
    est_cmd->add_option("--population", pop_path, "population CSV")->required();
    est_cmd->add_option("--design", design_path, "design spec JSON")->required();
    est_cmd->add_option("--model", model_path, "classifier JSON")->required();
    est_cmd->add_option("--sample", sample_in, "sample indicator CSV (default: draw one)");
    est_cmd->add_option("--seed", seed, "master seed for the draw");
    est_cmd->add_option("-o,--out", est_out, "risk report JSON (default stdout)");

    // train
    auto* train_cmd = app.add_subcommand("train", "fit a weighted SVM or tree on a sample");
    std::string learner = "svm", train_out;
    double lambda = 1e-3;
    bool cross_validate = false, unweighted = false;
    int degree = 2;
    std::size_t epochs = 500, max_depth = 8;
    train_cmd->add_option("--population", pop_path, "population CSV")->required();
    train_cmd->add_option("--sample", sample_in, "sample indicator CSV")->required();
    train_cmd->add_option("--pi", pi_in, "inclusion probabilities CSV (index, pi)")->required();
    train_cmd->add_option("--learner", learner, "svm or tree")->check(CLI::IsMember({"svm", "tree"}));
    train_cmd->add_option("--lambda", lambda, "SVM regularisation");
    train_cmd->add_flag("--cv", cross_validate, "select lambda by 5-fold cross-validation");
    train_cmd->add_option("--degree", degree, "SVM feature degree (1 or 2)");
    train_cmd->add_option("--epochs", epochs, "SVM epochs");
    train_cmd->add_option("--max-depth", max_depth, "tree depth limit");
    train_cmd->add_flag("--unweighted", unweighted, "ignore the inclusion probabilities (all weights 1)");
    train_cmd->add_option("--seed", seed, "master seed");
    train_cmd->add_option("-o,--out", train_out, "model JSON (default stdout)");

    // bound
    auto* bound_cmd = app.add_subcommand("bound", "evaluate the deviation and excess-risk bounds");
    std::string inputs_path, bound_out;
    bool validate_bound = false;
    bound_cmd->add_option("inputs", inputs_path, "bound inputs JSON")->required();
    bound_cmd->add_flag("--validate", validate_bound, "check against exact tails of a seeded instance (N <= 12)");
    bound_cmd->add_option("--seed", seed, "seed of the validation instance");
    bound_cmd->add_option("-o,--out", bound_out, "report JSON (default stdout)");

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "two-Gaussian replication study");
    std::string config_path, exp_json, exp_csv;
    bool full = false;
    std::size_t reps = 0, threads = 0;
    exp_cmd->add_option("--config", config_path, "experiment config JSON");
    exp_cmd->add_flag("--full", full, "start from the full-size configuration instead of the desk one");
    auto* seed_opt = exp_cmd->add_option("--seed", seed, "override master_seed");
    exp_cmd->add_option("--replications", reps, "override the number of replications");
    exp_cmd->add_option("--threads", threads, "worker threads (0: all cores)");
    exp_cmd->add_option("--json", exp_json, "aggregate report JSON (default stdout)");
    exp_cmd->add_option("--csv", exp_csv, "per-replication CSV");

    // validate
    auto* val_cmd = app.add_subcommand("validate", "run the exhaustive-enumeration oracle suites");
    ValidationOptions vopt;
    std::string val_out;
    val_cmd->add_option("--max-n", vopt.max_N, "largest population size (5..12)");
    val_cmd->add_option("--instances", vopt.instances, "random instances per suite");
    val_cmd->add_option("--seed", vopt.seed, "master seed");
    val_cmd->add_flag("--corrupt-pi", vopt.corrupt_pi, "perturb one inclusion probability (negative control)");
    val_cmd->add_option("-o,--out", val_out, "report JSON (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sample_cmd) {
            const auto spec = design_from_json(read_json_file(design_path));
            Rng rng = make_rng(seed, 0);
            const auto s = draw(spec, rng);
            emit(sample_out, to_text([&](std::ostream& o) { write_sample_csv(o, s); }));
            if (!enumerate_out.empty()) {
                const auto design = enumerate_design(spec);
                write_text_file(enumerate_out, to_text([&](std::ostream& o) { write_enumerated_csv(o, design); }));
            }
            if (!pi_out.empty()) {
                const auto pi = declared_inclusion_probs(spec);
                write_text_file(pi_out, to_text([&](std::ostream& o) { write_indexed_csv(o, pi, "pi"); }));
            }
            return 0;
        }
        if (*solve_cmd) {
            auto in = open_input(pi_in);
            const auto target = InclusionProbs::from(read_indexed_csv(in, "pi"));
            const auto p = solve_canonical_p(target, {tolerance, max_iter});
            emit(p_out, to_text([&](std::ostream& o) { write_indexed_csv(o, p, "p"); }));
            if (!design_out.empty()) {
                const auto n = static_cast<std::size_t>(std::lround(target.n));
                write_text_file(design_out, dump(to_json(DesignSpec::rejective(p, n))));
            }
            return 0;
        }
        if (*est_cmd) {
            auto pin = open_input(pop_path);
            const auto pop = read_population_csv(pin);
            const auto spec = design_from_json(read_json_file(design_path));
            if (spec.population_size() != pop.size()) throw InvalidArgument("design and population sizes differ");
            const auto clf = as_classifier(classifier_from_json(read_json_file(model_path)));
            SampleIndicator s;
            if (sample_in.empty()) {
                Rng rng = make_rng(seed, 0);
                s = draw(spec, rng);
            } else {
                auto sin = open_input(sample_in);
                s = read_sample_csv(sin);
            }
            const auto pi = declared_inclusion_probs(spec);
            const auto losses = misclassification(pop, clf);
            const auto ht = weighted_sample_risk(losses, s, pi, RiskKind::HT);
            Json out{{"kind", std::string(to_string(ht.kind))},
                     {"value", ht.value},
                     {"sample_size", s.size()},
                     {"empirical", empirical_risk(losses).value}};
            if (spec.kind() == DesignKind::Poisson) {
                out["std_error"] = std::sqrt(poisson_conditional_variance(losses, spec.as<PoissonParams>().p));
            }
            emit(est_out, dump(out));
            return 0;
        }
        if (*train_cmd) {
            auto pin = open_input(pop_path);
            const auto pop = read_population_csv(pin);
            auto sin = open_input(sample_in);
            const auto s = read_sample_csv(sin);
            auto piin = open_input(pi_in);
            auto pi = read_indexed_csv(piin, "pi");
            if (unweighted) pi.assign(pi.size(), 1.0);
            Rng rng = make_rng(seed, 0);
            Json model;
            if (learner == "svm") {
                SvmOptions opts;
                opts.lambda = lambda;
                opts.degree = degree;
                opts.epochs = epochs;
                if (cross_validate) {
                    CrossValidationOptions cv;
                    cv.weighted_validation = !unweighted;
                    opts.lambda = select_lambda_cv(pop, s, pi, opts, cv, rng).best_lambda;
                }
                model = to_json(train_weighted_svm(pop, s, pi, opts, rng).model);
            } else {
                TreeOptions opts;
                opts.max_depth = max_depth;
                model = to_json(train_weighted_tree(pop, s, pi, opts));
            }
            emit(train_out, dump(model));
            return 0;
        }
        if (*bound_cmd) {
            const auto inputs = bound_inputs_from_json(read_json_file(inputs_path));
            auto report = to_json(bound_report(inputs));
            bool ok = true;
            if (validate_bound) {
                const auto v = validation_bound_report(inputs, seed);
                report["validation"] = to_json(v);
                ok = v.all_valid();
            }
            emit(bound_out, dump(report));
            return ok ? 0 : 1;
        }
        if (*exp_cmd) {
            ExperimentConfig config = full ? ExperimentConfig::full() : ExperimentConfig::desk();
            if (!config_path.empty()) config = experiment_config_from_json(read_json_file(config_path), config);
            if (seed_opt->count() > 0) config.master_seed = seed;
            if (reps > 0) config.replications = reps;
            if (threads > 0) config.threads = threads;
            const auto report = run_experiment(config);
            if (!exp_csv.empty()) {
                write_text_file(exp_csv, to_text([&](std::ostream& o) { write_experiment_csv(o, report); }));
            }
            emit(exp_json, dump(to_json(report)));
            return report.partial_failure() ? 1 : 0;
        }
        if (*val_cmd) {
            const auto report = run_validation_suite(vopt);
            emit(val_out, dump(to_json(report)));
            for (const auto& s : report.suites) {
                std::cerr << (s.passed ? "PASS " : "FAIL ") << s.name << "  " << s.detail << '\n';
            }
            return report.all_passed() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
