#include "survey/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include "survey/errors.hpp"
#include "survey/estimators.hpp"
#include "survey/inclusion.hpp"

namespace survey {

void PopulationSpec::validate() const {
    if (dims == 0) throw InvalidArgument("population needs at least one dimension");
    if (!(positive_variance > 0.0) || !(negative_variance > 0.0)) {
        throw InvalidArgument("covariance scales must be positive");
    }
    if (positive_train + negative_train == 0) throw InvalidArgument("empty training population");
    if (positive_test + negative_test == 0) throw InvalidArgument("empty test population");
}

namespace {

Population draw_gaussians(const PopulationSpec& spec, std::size_t n_pos, std::size_t n_neg, Rng& rng) {
    std::vector<double> x;
    x.reserve((n_pos + n_neg) * spec.dims);
    std::vector<int> y;
    y.reserve(n_pos + n_neg);
    std::normal_distribution<double> pos(spec.positive_mean, std::sqrt(spec.positive_variance));
    std::normal_distribution<double> neg(spec.negative_mean, std::sqrt(spec.negative_variance));
    for (std::size_t i = 0; i < n_pos; ++i) {
        for (std::size_t k = 0; k < spec.dims; ++k) x.push_back(pos(rng));
        y.push_back(1);
    }
    for (std::size_t i = 0; i < n_neg; ++i) {
        for (std::size_t k = 0; k < spec.dims; ++k) x.push_back(neg(rng));
        y.push_back(-1);
    }
    return Population(spec.dims, std::move(x), std::move(y));
}

std::vector<double> class_pi(std::span<const int> labels, double pi_pos, double pi_neg) {
    std::vector<double> pi(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) pi[i] = labels[i] > 0 ? pi_pos : pi_neg;
    return pi;
}

DesignSpec design_for_labels(std::span<const int> labels, double pi_pos, double pi_neg) {
    for (double v : {pi_pos, pi_neg}) {
        if (!(v > 0.0 && v < 1.0)) throw InvalidArgument("class inclusion probabilities must lie in (0,1)");
    }
    auto pi = class_pi(labels, pi_pos, pi_neg);
    const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
    const double n = std::round(total);
    if (n < 1.0 || std::abs(total - n) > 1e-9 * std::max(1.0, total)) {
        throw InvalidArgument("class inclusion probabilities imply a non-integer sample size " + std::to_string(total));
    }
    const auto size = static_cast<std::size_t>(n);
    if (pi_pos == pi_neg) return DesignSpec::srswor(labels.size(), size);
    auto p = solve_canonical_p(InclusionProbs::from(std::move(pi)));
    return DesignSpec::rejective(std::move(p), size);
}

double summary_std(std::span<const double> v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

GeneratedData gen_gaussian_population(const PopulationSpec& spec, Rng& rng) {
    spec.validate();
    GeneratedData out;
    out.train = draw_gaussians(spec, spec.positive_train, spec.negative_train, rng);
    out.test = draw_gaussians(spec, spec.positive_test, spec.negative_test, rng);
    return out;
}

DesignSpec build_rejective_training_design(const Population& pop, double pi_pos, double pi_neg) {
    return design_for_labels(pop.labels(), pi_pos, pi_neg);
}

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::SvmWeighted: return "svm_weighted";
        case Variant::SvmUnweighted: return "svm_unweighted";
        case Variant::SvmSrswor: return "svm_srswor";
        case Variant::TreeWeighted: return "tree_weighted";
        case Variant::TreeUnweighted: return "tree_unweighted";
        case Variant::TreeSrswor: return "tree_srswor";
    }
    return "unknown";
}

void ExperimentConfig::validate() const {
    population.validate();
    if (replications == 0) throw InvalidArgument("replications must be at least 1");
    if (!(pi_positive > 0.0 && pi_positive < 1.0) || !(pi_negative > 0.0 && pi_negative < 1.0)) {
        throw InvalidArgument("class inclusion probabilities must lie in (0,1)");
    }
    if (cv.folds < 2) throw InvalidArgument("cross-validation needs at least two folds");
}

ExperimentConfig ExperimentConfig::full() { return ExperimentConfig{}; }

ExperimentConfig ExperimentConfig::desk() {
    ExperimentConfig c;
    c.population.positive_train = 2'500;
    c.population.negative_train = 2'500;
    c.population.positive_test = 250;
    c.population.negative_test = 250;
    c.replications = 20;
    return c;
}

void summarize(ExperimentReport& report) {
    report.failed_replications = 0;
    report.svm_gap_positive = 0;
    report.tree_gap_positive = 0;
    std::vector<double> values[kVariantCount];
    for (const auto& row : report.rows) {
        if (!row.ok()) {
            ++report.failed_replications;
            continue;
        }
        for (std::size_t v = 0; v < kVariantCount; ++v) values[v].push_back(row.test_error[v]);
        const auto e = [&](Variant v) { return row.test_error[static_cast<std::size_t>(v)]; };
        if (e(Variant::SvmUnweighted) > e(Variant::SvmWeighted)) ++report.svm_gap_positive;
        if (e(Variant::TreeUnweighted) > e(Variant::TreeWeighted)) ++report.tree_gap_positive;
    }
    for (std::size_t v = 0; v < kVariantCount; ++v) {
        auto& s = report.summary[v];
        s.count = values[v].size();
        s.mean = s.count ? std::accumulate(values[v].begin(), values[v].end(), 0.0) / static_cast<double>(s.count) : 0.0;
        s.std_dev = summary_std(values[v], s.mean);
    }
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    const auto& ps = config.population;

    // Labels are laid out identically in every replication, so one design serves all.
    std::vector<int> labels(ps.positive_train, 1);
    labels.resize(ps.positive_train + ps.negative_train, -1);
    const DesignSpec design = design_for_labels(labels, config.pi_positive, config.pi_negative);
    const std::size_t N = labels.size();
    const std::size_t n = *design.fixed_size();
    const auto pi = class_pi(labels, config.pi_positive, config.pi_negative);
    const std::vector<double> ones(N, 1.0);
    const std::vector<double> pi_srs(N, static_cast<double>(n) / static_cast<double>(N));

    ExperimentReport report;
    report.config = config;
    report.rows.resize(config.replications);

    auto run_one = [&](std::size_t r) {
        auto& row = report.rows[r];
        row.replication = r;
        row.seed = split_seed(config.master_seed, r);
        try {
            Rng data_rng(split_seed(row.seed, 0));
            const auto data = gen_gaussian_population(ps, data_rng);
            Rng draw_rng(split_seed(row.seed, 1));
            const auto sample = draw(design, draw_rng);
            Rng srs_rng(split_seed(row.seed, 2));
            const auto srs = srswor_draw(N, n, srs_rng);
            row.sample_size = sample.size();

            struct Setup {
                const SampleIndicator* s;
                const std::vector<double>* w;
                bool weighted_cv;
            };
            const Setup setups[3] = {{&sample, &pi, true}, {&sample, &ones, false}, {&srs, &pi_srs, true}};
            for (std::size_t k = 0; k < 3; ++k) {
                const auto& [s, w, weighted_cv] = setups[k];
                Rng rng(split_seed(row.seed, 10 + k));
                SvmOptions opts = config.svm;
                if (config.select_lambda) {
                    auto cv = config.cv;
                    cv.weighted_validation = weighted_cv;
                    opts.lambda = select_lambda_cv(data.train, *s, *w, opts, cv, rng).best_lambda;
                }
                row.lambda[k] = opts.lambda;
                const auto model = train_weighted_svm(data.train, *s, *w, opts, rng).model;
                row.test_error[k] = test_error(data.test, [&](std::span<const double> x) { return model.predict(x); }).value;

                const auto tree = train_weighted_tree(data.train, *s, *w, config.tree);
                row.test_error[3 + k] = test_error(data.test, [&](std::span<const double> x) { return tree.predict(x); }).value;
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    std::size_t workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, config.replications);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < config.replications; r = next++) run_one(r);
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    summarize(report);
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

}  // namespace survey
