// Acceptance run: one PASS/FAIL line per criterion. Exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "survey/bounds.hpp"
#include "survey/experiment.hpp"
#include "survey/validation.hpp"

using namespace survey;

namespace {

int failures = 0;

void line(int id, bool ok, const std::string& name, const std::string& detail, double seconds) {
    if (!ok) ++failures;
    std::printf("%s %d %s: %s (%.2fs)\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
}

template <class F>
double timed(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

void suite_line(int id, const std::string& name, const SuiteResult& r, double seconds) {
    line(id, r.passed,
         name,
         fmt("%zu instances, %zu checks, %zu violations, %zu skipped; %s", r.instances, r.checks, r.violations,
             r.skipped, r.detail.c_str()),
         seconds);
}

void table_one() {
    const auto config = ExperimentConfig::full();
    ExperimentReport r;
    const double s = timed([&] { r = run_experiment(config); });
    const auto& sw = r[Variant::SvmWeighted];
    const auto& su = r[Variant::SvmUnweighted];
    const auto& ss = r[Variant::SvmSrswor];
    const auto& tw = r[Variant::TreeWeighted];
    const auto& tu = r[Variant::TreeUnweighted];
    const auto& ts = r[Variant::TreeSrswor];
    const bool svm_ok = sw.mean <= 0.08;
    const bool ratio_ok = su.mean >= 1.5 * sw.mean;
    const bool tree_ok = tw.mean <= 0.10;
    const bool order_ok = tw.mean < tu.mean;
    const bool complete = !r.partial_failure() && sw.count == config.replications;
    std::string failed;
    if (!svm_ok) failed += " weighted-svm>0.08";
    if (!ratio_ok) failed += " unweighted/weighted<1.5";
    if (!tree_ok) failed += " weighted-tree>0.10";
    if (!order_ok) failed += " weighted-tree>=unweighted-tree";
    if (!complete) failed += " failed-replications";
    line(1, svm_ok && ratio_ok && tree_ok && order_ok && complete, "two-gaussian study",
         fmt("%zu reps; svm weighted %.4f (sd %.4f), unweighted %.4f (sd %.4f, ratio %.2f), srswor %.4f (sd %.4f); "
             "tree weighted %.4f (sd %.4f), unweighted %.4f (sd %.4f), srswor %.4f (sd %.4f); "
             "gap>0 in %zu/%zu svm, %zu/%zu tree%s%s",
             config.replications, sw.mean, sw.std_dev, su.mean, su.std_dev, su.mean / sw.mean, ss.mean, ss.std_dev,
             tw.mean, tw.std_dev, tu.mean, tu.std_dev, ts.mean, ts.std_dev, r.svm_gap_positive, config.replications,
             r.tree_gap_positive, config.replications, failed.empty() ? "" : "; failed:", failed.c_str()),
         s);
}

void rate_shape() {
    // Fixed kappa = 1, V = 1, delta = 0.05; N = n^2.
    std::vector<double> x, y;
    const double s = timed([&] {
        for (double n : {1e2, 1e3, 1e4, 1e5}) {
            BoundInputs in;
            in.n = n;
            in.N = n * n;
            x.push_back(std::log(n));
            y.push_back(std::log(prop1_deviation_bound(in)));
        }
    });
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    line(9, std::abs(slope + 0.5) <= 0.05, "deviation-bound rate shape",
         fmt("log-log slope %.4f over n = 1e2..1e5 (target -0.5 +/- 0.05)", slope), s);
}

}  // namespace

int main(int argc, char** argv) {
    // --skip-study leaves criterion 1 out (reported as FAIL, never as PASS).
    const bool skip_study = argc > 1 && std::string(argv[1]) == "--skip-study";
    const std::uint64_t seed = 2017;
    const std::size_t max_N = 12;

    SuiteResult r;
    double s = 0;

    if (skip_study) {
        line(1, false, "two-gaussian study", "not run (--skip-study)", 0.0);
    } else {
        table_one();
    }

    s = timed([&] { r = check_unbiasedness(100, max_N, split_seed(seed, 2)); });
    suite_line(2, "exact unbiasedness", r, s);

    s = timed([&] { r = check_inclusion_exactness(100, max_N, split_seed(seed, 3)); });
    suite_line(3, "exact inclusion probabilities", r, s);

    s = timed([&] { r = check_negative_association(100, max_N, split_seed(seed, 4)); });
    suite_line(4, "negative association", r, s);

    const std::vector<std::size_t> sizes{3, 4, 5};
    // Sizes cycle, so 60 instances give 20 at each n.
    s = timed([&] { r = check_bernstein(60, 10, sizes, 50, split_seed(seed, 5)); });
    suite_line(5, "bernstein validity", r, s);

    s = timed([&] { r = check_bias_lemma(100, max_N, split_seed(seed, 6), 200); });
    suite_line(6, "bias bound", r, s);

    s = timed([&] { r = check_hajek_trend(10, split_seed(seed, 7)); });
    suite_line(7, "hajek approximation trend", r, s);

    s = timed([&] { r = check_theorem2(20, 5, split_seed(seed, 8)); });
    r.passed = r.passed && std::isfinite(r.worst) && r.worst <= 10.0;
    suite_line(8, "general-design excess bound", r, s);

    rate_shape();

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
