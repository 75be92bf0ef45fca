#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "eicsr/bench.hpp"
#include "eicsr/eval.hpp"
#include "eicsr/parse.hpp"

using namespace eicsr;

namespace {

double mean(const std::vector<double>& v) {
    double t = 0.0;
    for (double x : v) t += x;
    return t / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
    const double m = mean(v);
    double t = 0.0;
    for (double x : v) t += (x - m) * (x - m);
    return std::sqrt(t / static_cast<double>(v.size()));
}

} // namespace

TEST_CASE("the builtin suite splits ten and ten") {
    const auto& suite = builtin_suite();
    REQUIRE(suite.size() == 20);
    int path = 0;
    std::set<std::string> names;
    for (const auto& p : suite) {
        names.insert(p.name);
        if (p.pathological) ++path;
        const Expr e = parse(p.formula); // every formula parses
        CHECK(e.max_var_index() < p.num_vars);
        CHECK(p.lo < p.hi);
    }
    CHECK(path == 10);
    CHECK(names.size() == 20); // unique names
}

TEST_CASE("add_noise perturbs at the requested scale and nowhere else") {
    Dataset d = uniform_dataset(10000, 1, 0.0, 1.0, 5);
    d.target.assign(d.rows(), 0.0);
    for (std::size_t i = 0; i < d.rows(); ++i) d.target[i] = 3.0 * d.columns[0][i];

    const double base_sd = stddev(d.target);
    const Dataset noisy = add_noise(d, 0.1, 99);
    REQUIRE(noisy.rows() == d.rows());
    std::vector<double> delta(d.rows());
    for (std::size_t i = 0; i < d.rows(); ++i) delta[i] = noisy.target[i] - d.target[i];
    CHECK(std::abs(mean(delta)) < 0.01 * base_sd);
    CHECK(stddev(delta) == doctest::Approx(0.1 * base_sd).epsilon(0.05));
    // inputs untouched
    for (std::size_t i = 0; i < d.rows(); ++i) CHECK(noisy.columns[0][i] == d.columns[0][i]);

    // eta 0 and flat targets are exact no-ops
    const Dataset same = add_noise(d, 0.0, 99);
    for (std::size_t i = 0; i < d.rows(); ++i) CHECK(same.target[i] == d.target[i]);
    Dataset flat = d;
    flat.target.assign(flat.rows(), 4.0);
    const Dataset still = add_noise(flat, 0.5, 99);
    for (std::size_t i = 0; i < flat.rows(); ++i) CHECK(still.target[i] == 4.0);

    // seeded: reproducible, and a new seed moves the draws
    const Dataset again = add_noise(d, 0.1, 99);
    const Dataset other = add_noise(d, 0.1, 100);
    int differs = 0;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        CHECK(again.target[i] == noisy.target[i]);
        if (other.target[i] != noisy.target[i]) ++differs;
    }
    CHECK(differs > 9000);
}

TEST_CASE("split partitions rows exactly and deterministically") {
    Dataset d = uniform_dataset(100, 2, 0.0, 1.0, 7);
    d.target.resize(100);
    for (std::size_t i = 0; i < 100; ++i) d.target[i] = static_cast<double>(i);

    auto [train, test] = split(d, 0.75, 11);
    REQUIRE(train.rows() == 75);
    REQUIRE(test.rows() == 25);

    // disjoint and exhaustive: the targets are unique row labels
    std::set<double> seen;
    for (double y : train.target) seen.insert(y);
    for (double y : test.target) seen.insert(y);
    CHECK(seen.size() == 100);

    // source order within each side
    CHECK(std::is_sorted(train.target.begin(), train.target.end()));
    CHECK(std::is_sorted(test.target.begin(), test.target.end()));

    // rows stay glued to their features
    for (std::size_t i = 0; i < train.rows(); ++i) {
        const auto r = static_cast<std::size_t>(train.target[i]);
        CHECK(train.columns[0][i] == d.columns[0][r]);
        CHECK(train.columns[1][i] == d.columns[1][r]);
    }

    auto [t2, s2] = split(d, 0.75, 11);
    CHECK(t2.target == train.target);
    auto [t3, s3] = split(d, 0.75, 12);
    CHECK(t3.target != train.target);

    // rounding and clamping keep both sides nonempty
    Dataset three = uniform_dataset(3, 1, 0.0, 1.0, 1);
    three.target = {0.0, 1.0, 2.0};
    auto [a, b] = split(three, 0.5, 1);
    CHECK(a.rows() == 2); // round(1.5) -> 2
    CHECK(b.rows() == 1);
    auto [c, e] = split(three, 0.999, 1);
    CHECK(c.rows() == 2); // clamped below n
    CHECK(e.rows() == 1);
    auto [f, g] = split(three, 0.001, 1);
    CHECK(f.rows() == 1); // clamped above 0
    CHECK(g.rows() == 2);
}

TEST_CASE("ground-truth scores separate the two suite halves") {
    const auto& suite = builtin_suite();
    std::vector<BenchProblem> sample = {suite[0], suite[10]}; // one of each
    auto gt = suite_ground_truth_eic(sample, {}, 128, 3);
    REQUIRE(gt.size() == 2);
    CHECK(gt[0].problem == sample[0].name);
    CHECK(!gt[0].pathological);
    CHECK(gt[1].pathological);
    CHECK(gt[0].eic < gt[1].eic);
}

TEST_CASE("a tiny bench run produces a coherent, reproducible report") {
    std::vector<BenchProblem> problems = {builtin_suite()[3], builtin_suite()[4]};
    BenchConfig cfg;
    cfg.method = "mcts";
    cfg.trials = 2;
    cfg.rows = 64;
    cfg.seed = 17;
    cfg.stable_output = true;
    cfg.mcts.budget.count = 60;

    const BenchReport rep = run_bench(problems, cfg);
    CHECK(rep.method == "mcts");
    CHECK(rep.trials == 2);
    REQUIRE(rep.rows.size() == 4);
    // (problem, trial) emission order
    CHECK(rep.rows[0].problem == problems[0].name);
    CHECK(rep.rows[0].trial == 0);
    CHECK(rep.rows[1].trial == 1);
    CHECK(rep.rows[2].problem == problems[1].name);
    for (const auto& row : rep.rows) {
        CHECK(row.method == "mcts");
        CHECK(row.error.empty());
        CHECK(row.runtime_s == 0.0); // stable output zeroes timings
        CHECK(!row.formula.empty());
        CHECK(row.complexity >= 1);
    }
    REQUIRE(rep.aggregates.size() == 2);
    for (const auto& agg : rep.aggregates) CHECK(agg.retained + agg.excluded == 2);
    REQUIRE(rep.ground_truth.size() == 2);

    // byte-identical on a rerun
    const BenchReport rep2 = run_bench(problems, cfg);
    CHECK(report_json(rep) == report_json(rep2));
    CHECK(report_csv(rep) == report_csv(rep2));
}

TEST_CASE("reports survive the JSON round trip") {
    BenchReport rep;
    rep.method = "gp";
    rep.alpha = 0.002;
    rep.noise_eta = 0.05;
    rep.split_frac = 0.8;
    rep.trials = 2;
    rep.seed = 123456789ull;
    BenchRow ok;
    ok.problem = "kepler_period";
    ok.trial = 1;
    ok.method = "gp";
    ok.alpha = 0.002;
    ok.noise_eta = 0.05;
    ok.r2 = 0.9975;
    ok.nmse = 0.0025;
    ok.complexity = 7;
    ok.eic = 0.25;
    ok.runtime_s = 1.5;
    ok.formula = "sqrt(x1^3/x2)";
    ok.retained = true;
    BenchRow failed;
    failed.problem = "gravity";
    failed.trial = 0;
    failed.method = "gp";
    failed.r2 = -std::numeric_limits<double>::infinity();
    failed.nmse = std::numeric_limits<double>::quiet_NaN();
    failed.retained = false;
    failed.error = "boom";
    rep.rows = {ok, failed};
    ProblemAggregate agg;
    agg.problem = "kepler_period";
    agg.mean_r2 = 0.9975;
    agg.mean_complexity = 7.0;
    agg.mean_eic = 0.25;
    agg.mean_runtime_s = 1.5;
    agg.retained = 1;
    agg.excluded = 1;
    rep.aggregates = {agg};
    rep.ground_truth = {{"kepler_period", false, 0.125}};

    const std::string text = report_json(rep);
    const BenchReport back = report_from_json(text);
    CHECK(back.method == rep.method);
    CHECK(back.alpha == rep.alpha);
    CHECK(back.noise_eta == rep.noise_eta);
    CHECK(back.split_frac == rep.split_frac);
    CHECK(back.trials == rep.trials);
    CHECK(back.seed == rep.seed);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[0].formula == "sqrt(x1^3/x2)");
    CHECK(back.rows[0].r2 == 0.9975);
    CHECK(back.rows[1].error == "boom");
    CHECK(back.rows[1].r2 == -std::numeric_limits<double>::infinity());
    // non-finite error crosses as null and lands on the +inf sentinel
    CHECK(back.rows[1].nmse == std::numeric_limits<double>::infinity());
    CHECK(back.rows[1].retained == false);
    REQUIRE(back.aggregates.size() == 1);
    CHECK(back.aggregates[0].mean_r2 == 0.9975);
    CHECK(back.aggregates[0].excluded == 1);
    REQUIRE(back.ground_truth.size() == 1);
    CHECK(back.ground_truth[0].eic == 0.125);

    // serializing the parsed report reproduces the text exactly
    CHECK(report_json(back) == text);
}

TEST_CASE("the CSV schema is fixed") {
    BenchReport rep;
    rep.method = "mcts";
    BenchRow row;
    row.problem = "ohm";
    row.trial = 3;
    row.method = "mcts";
    row.alpha = 0.01;
    row.noise_eta = 0.0;
    row.r2 = 0.5;
    row.nmse = 0.5;
    row.complexity = 3;
    row.eic = 1.0;
    row.runtime_s = 0.0;
    rep.rows = {row};
    const std::string csv = report_csv(rep);
    const std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header == "problem,trial,method,alpha,noise_eta,r2,nmse,complexity,eic,runtime_s");
    CHECK(csv.find("ohm,3,mcts,") != std::string::npos);
    // one header plus one data line
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}
