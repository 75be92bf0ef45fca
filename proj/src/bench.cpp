#include "eicsr/bench.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "eicsr/errors.hpp"
#include "eicsr/eval.hpp"
#include "eicsr/parse.hpp"
#include "eicsr/threads.hpp"

namespace eicsr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using ordered_json = nlohmann::ordered_json;

} // namespace

const std::vector<BenchProblem>& builtin_suite() {
    static const std::vector<BenchProblem> suite = {
        // physics-style: well-conditioned compositions
        {"kepler_period", "sqrt(x1^3/x2)", 2, 1.0, 5.0, false},
        {"gravity", "x1*x2/x3^2", 3, 1.0, 5.0, false},
        {"pendulum", "2*3.141592653589793*sqrt(x1/x2)", 2, 1.0, 5.0, false},
        {"ohm", "x1/x2", 2, 1.0, 5.0, false},
        {"kinetic_energy", "0.5*x1*x2^2", 2, 1.0, 5.0, false},
        {"projectile_range", "x1^2*sin(2*x2)/9.8", 2, 0.2, 1.3, false},
        {"wave_amplitude", "x1*sin(x2*x3)", 3, 1.0, 1.7, false},
        {"coulomb", "x1*x2/(x3*x4^2)", 4, 1.0, 5.0, false},
        {"decay", "x2*exp(-x1)", 2, 0.1, 2.0, false},
        {"lorentz_factor", "x1/sqrt(1-x2^2)", 2, 0.1, 0.7, false},
        // pathological: cancellation and amplification
        {"cancel_1e4", "(x1+10000)-10000", 1, 1.0, 2.0, true},
        {"cancel_1e6", "(x1+1000000)-1000000", 1, 1.0, 2.0, true},
        {"cancel_1e8", "(x1+100000000)-100000000", 1, 1.0, 2.0, true},
        {"cancel_1e100", "(x1+1e100)-1e100", 1, 1.0, 2.0, true},
        {"masked_cancel", "0*((x1+1e100)-1e100)+x1", 1, 1.0, 2.0, true},
        {"log1p_blowup", "10000000*log(1+x1/10000000)", 1, 1.0, 2.0, true},
        {"sqrt_cancel", "sqrt(x1+10000)-100", 1, 1.0, 2.0, true},
        {"exp_identity", "exp(2*x1)-exp(x1)^2", 1, 1.0, 3.0, true},
        {"sin_of_exp", "sin(exp(x1+x2))", 2, 1.5, 3.0, true},
        {"shared_term_cancel", "(x1+x2+10000)-(x2+10000)", 2, 1.0, 2.0, true},
    };
    return suite;
}

Dataset add_noise(const Dataset& data, double eta, std::uint64_t seed) {
    if (!(eta >= 0.0)) throw DomainError("noise eta must be >= 0");
    Dataset out = data;
    if (eta == 0.0 || out.rows() == 0) return out;
    double mean = 0.0;
    for (double y : out.target) mean += y;
    mean /= static_cast<double>(out.rows());
    double var = 0.0;
    for (double y : out.target) var += (y - mean) * (y - mean);
    var /= static_cast<double>(out.rows());
    const double sd = std::sqrt(var);
    if (!(sd > 0.0)) return out;
    for (std::size_t i = 0; i < out.rows(); ++i)
        out.target[i] += eta * sd * rng::normal(rng::combine(seed, i));
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double frac, std::uint64_t seed) {
    const std::size_t n = data.rows();
    if (!(frac > 0.0 && frac < 1.0)) throw DomainError("split fraction must be in (0, 1)");
    if (n < 2) throw InsufficientData("split needs at least 2 rows");

    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    rng::Stream s(seed);
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(idx[i], idx[s.below(i + 1)]);

    std::size_t ntrain = static_cast<std::size_t>(std::llround(frac * static_cast<double>(n)));
    ntrain = std::clamp<std::size_t>(ntrain, 1, n - 1);

    std::vector<std::size_t> a(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(ntrain));
    std::vector<std::size_t> b(idx.begin() + static_cast<std::ptrdiff_t>(ntrain), idx.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());

    auto take = [&](const std::vector<std::size_t>& rows) {
        Dataset d;
        d.names = data.names;
        d.columns.resize(data.num_features());
        for (std::size_t j = 0; j < data.num_features(); ++j) {
            d.columns[j].reserve(rows.size());
            for (std::size_t r : rows) d.columns[j].push_back(data.columns[j][r]);
        }
        d.target.reserve(rows.size());
        for (std::size_t r : rows) d.target.push_back(data.target[r]);
        return d;
    };
    return {take(a), take(b)};
}

std::vector<GroundTruthEic> suite_ground_truth_eic(const std::vector<BenchProblem>& problems,
                                                   const EicConfig& ecfg, std::size_t rows,
                                                   std::uint64_t seed) {
    std::vector<GroundTruthEic> out;
    out.reserve(problems.size());
    for (std::size_t p = 0; p < problems.size(); ++p) {
        const BenchProblem& prob = problems[p];
        const Dataset X = uniform_dataset(rows, prob.num_vars, prob.lo, prob.hi,
                                          rng::combine(seed, p));
        const double eic = calculate_eic(parse(prob.formula), X, ecfg).overall;
        out.push_back({prob.name, prob.pathological, eic});
    }
    return out;
}

namespace {

Dataset synthesize(const BenchProblem& prob, std::size_t rows, std::uint64_t key) {
    Dataset d = uniform_dataset(rows, prob.num_vars, prob.lo, prob.hi, key);
    d.target = evaluate(parse(prob.formula), d).values;
    // keep only rows with finite targets
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < d.rows(); ++i)
        if (std::isfinite(d.target[i])) keep.push_back(i);
    if (keep.size() == d.rows()) return d;
    Dataset out;
    out.columns.resize(d.num_features());
    for (std::size_t j = 0; j < d.num_features(); ++j)
        for (std::size_t i : keep) out.columns[j].push_back(d.columns[j][i]);
    for (std::size_t i : keep) out.target.push_back(d.target[i]);
    return out;
}

struct TestScore {
    double r2 = kNegInf;
    double nmse = std::numeric_limits<double>::infinity();
};

TestScore score_on(const Candidate& c, const Dataset& test) {
    TestScore s;
    const EvalResult pred = evaluate(c.fitted, test);
    double mean = 0.0;
    for (double y : test.target) mean += y;
    mean /= static_cast<double>(test.rows());
    double var = 0.0, mse = 0.0;
    for (std::size_t i = 0; i < test.rows(); ++i) {
        var += (test.target[i] - mean) * (test.target[i] - mean);
        const double d = pred.values[i] - test.target[i];
        mse += d * d;
    }
    var /= static_cast<double>(test.rows());
    mse /= static_cast<double>(test.rows());
    if (!(var > 0.0) || !std::isfinite(mse)) return s;
    s.nmse = mse / var;
    s.r2 = 1.0 - s.nmse;
    return s;
}

BenchRow run_trial(const BenchProblem& prob, std::size_t pidx, int trial,
                   const BenchConfig& cfg) {
    BenchRow row;
    row.problem = prob.name;
    row.trial = trial;
    row.method = cfg.method;
    row.noise_eta = cfg.noise_eta;
    row.alpha = cfg.method == "gp" ? cfg.gp.fitness_cfg.alpha : cfg.mcts.fitness_cfg.alpha;
    row.r2 = kNegInf;
    row.retained = false;

    const std::uint64_t trial_key =
        rng::combine(cfg.seed, rng::combine(pidx, static_cast<std::uint64_t>(trial)));
    try {
        Dataset data = synthesize(prob, cfg.rows, rng::combine(trial_key, 1));
        auto [train, test] = split(data, cfg.split_frac, rng::combine(trial_key, 2));
        train = add_noise(train, cfg.noise_eta, rng::combine(trial_key, 3));

        const auto t0 = std::chrono::steady_clock::now();
        std::vector<Candidate> archive;
        if (cfg.method == "gp") {
            GpConfig g = cfg.gp;
            g.seed = trial_key;
            archive = gp_search(train, g);
        } else if (cfg.method == "mcts") {
            MctsConfig m = cfg.mcts;
            m.seed = trial_key;
            archive = mcts_search(train, m);
        } else {
            throw DomainError("unknown method '" + cfg.method + "'");
        }
        const std::chrono::duration<double> el = std::chrono::steady_clock::now() - t0;

        if (archive.empty()) throw Error("search returned an empty archive");

        std::size_t best = 0;
        TestScore best_score;
        for (std::size_t i = 0; i < archive.size(); ++i) {
            const TestScore s = score_on(archive[i], test);
            const bool win = s.r2 > best_score.r2 ||
                             (s.r2 == best_score.r2 &&
                              archive[i].complexity < archive[best].complexity);
            if (i == 0 || win) {
                best = i;
                best_score = s;
            }
        }
        const Candidate& c = archive[best];
        row.r2 = best_score.r2;
        row.nmse = best_score.nmse;
        row.complexity = c.complexity;
        row.eic = c.eic;
        row.formula = to_string(c.fitted);
        row.runtime_s = cfg.stable_output ? 0.0 : el.count();
        row.retained = std::isfinite(row.r2) && row.r2 >= cfg.r2_filter;
    } catch (const std::exception& ex) {
        row.error = ex.what();
    }
    return row;
}

} // namespace

BenchReport run_bench(const std::vector<BenchProblem>& problems, const BenchConfig& cfg) {
    if (problems.empty()) throw InsufficientData("benchmark needs at least one problem");
    if (cfg.trials < 1) throw DomainError("trials must be >= 1");

    BenchReport rpt;
    rpt.method = cfg.method;
    rpt.alpha = cfg.method == "gp" ? cfg.gp.fitness_cfg.alpha : cfg.mcts.fitness_cfg.alpha;
    rpt.noise_eta = cfg.noise_eta;
    rpt.split_frac = cfg.split_frac;
    rpt.trials = cfg.trials;
    rpt.seed = cfg.seed;

    const std::size_t total = problems.size() * static_cast<std::size_t>(cfg.trials);
    rpt.rows.resize(total);
    const int threads = worker_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(total); ++k) {
        const std::size_t pidx = static_cast<std::size_t>(k) / static_cast<std::size_t>(cfg.trials);
        const int trial = static_cast<int>(static_cast<std::size_t>(k) %
                                           static_cast<std::size_t>(cfg.trials));
        rpt.rows[static_cast<std::size_t>(k)] = run_trial(problems[pidx], pidx, trial, cfg);
    }

    for (std::size_t p = 0; p < problems.size(); ++p) {
        ProblemAggregate agg;
        agg.problem = problems[p].name;
        double sr = 0, sc = 0, se = 0, st = 0;
        for (int t = 0; t < cfg.trials; ++t) {
            const BenchRow& row = rpt.rows[p * static_cast<std::size_t>(cfg.trials) +
                                           static_cast<std::size_t>(t)];
            if (!row.retained) {
                ++agg.excluded;
                continue;
            }
            ++agg.retained;
            sr += row.r2;
            sc += row.complexity;
            se += row.eic;
            st += row.runtime_s;
        }
        if (agg.retained > 0) {
            agg.mean_r2 = sr / agg.retained;
            agg.mean_complexity = sc / agg.retained;
            agg.mean_eic = se / agg.retained;
            agg.mean_runtime_s = st / agg.retained;
        }
        rpt.aggregates.push_back(std::move(agg));
    }

    rpt.ground_truth = suite_ground_truth_eic(problems, cfg.method == "gp" ? cfg.gp.eic_cfg
                                                                           : cfg.mcts.eic_cfg,
                                              cfg.rows, rng::combine(cfg.seed, 0x6774ull));
    return rpt;
}

namespace {

// JSON has no -inf; the R2 sentinel crosses as null.
ordered_json num_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

double null_or_num(const ordered_json& j) {
    if (j.is_null()) return kNegInf;
    return j.get<double>();
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace

std::string report_json(const BenchReport& report) {
    ordered_json j;
    j["method"] = report.method;
    j["alpha"] = report.alpha;
    j["noise_eta"] = report.noise_eta;
    j["split_frac"] = report.split_frac;
    j["trials"] = report.trials;
    j["seed"] = report.seed;
    j["results"] = ordered_json::array();
    for (const BenchRow& r : report.rows) {
        ordered_json o;
        o["problem"] = r.problem;
        o["trial"] = r.trial;
        o["method"] = r.method;
        o["alpha"] = r.alpha;
        o["noise_eta"] = r.noise_eta;
        o["r2"] = num_or_null(r.r2);
        o["nmse"] = num_or_null(r.nmse);
        o["complexity"] = r.complexity;
        o["eic"] = num_or_null(r.eic);
        o["runtime_s"] = r.runtime_s;
        o["formula"] = r.formula;
        o["retained"] = r.retained;
        o["error"] = r.error;
        j["results"].push_back(std::move(o));
    }
    j["aggregates"] = ordered_json::array();
    for (const ProblemAggregate& a : report.aggregates) {
        ordered_json o;
        o["problem"] = a.problem;
        o["mean_r2"] = num_or_null(a.mean_r2);
        o["mean_complexity"] = a.mean_complexity;
        o["mean_eic"] = a.mean_eic;
        o["mean_runtime_s"] = a.mean_runtime_s;
        o["retained"] = a.retained;
        o["excluded"] = a.excluded;
        j["aggregates"].push_back(std::move(o));
    }
    j["ground_truth_eic"] = ordered_json::array();
    for (const GroundTruthEic& g : report.ground_truth) {
        ordered_json o;
        o["problem"] = g.problem;
        o["pathological"] = g.pathological;
        o["eic"] = num_or_null(g.eic);
        j["ground_truth_eic"].push_back(std::move(o));
    }
    return j.dump(2) + "\n";
}

BenchReport report_from_json(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    BenchReport rpt;
    rpt.method = j.at("method").get<std::string>();
    rpt.alpha = j.at("alpha").get<double>();
    rpt.noise_eta = j.at("noise_eta").get<double>();
    rpt.split_frac = j.at("split_frac").get<double>();
    rpt.trials = j.at("trials").get<int>();
    rpt.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& o : j.at("results")) {
        BenchRow r;
        r.problem = o.at("problem").get<std::string>();
        r.trial = o.at("trial").get<int>();
        r.method = o.at("method").get<std::string>();
        r.alpha = o.at("alpha").get<double>();
        r.noise_eta = o.at("noise_eta").get<double>();
        r.r2 = null_or_num(o.at("r2"));
        r.nmse = o.at("nmse").is_null() ? std::numeric_limits<double>::infinity()
                                        : o.at("nmse").get<double>();
        r.complexity = o.at("complexity").get<int>();
        r.eic = null_or_num(o.at("eic"));
        r.runtime_s = o.at("runtime_s").get<double>();
        r.formula = o.at("formula").get<std::string>();
        r.retained = o.at("retained").get<bool>();
        r.error = o.at("error").get<std::string>();
        rpt.rows.push_back(std::move(r));
    }
    for (const auto& o : j.at("aggregates")) {
        ProblemAggregate a;
        a.problem = o.at("problem").get<std::string>();
        a.mean_r2 = null_or_num(o.at("mean_r2"));
        a.mean_complexity = o.at("mean_complexity").get<double>();
        a.mean_eic = o.at("mean_eic").get<double>();
        a.mean_runtime_s = o.at("mean_runtime_s").get<double>();
        a.retained = o.at("retained").get<int>();
        a.excluded = o.at("excluded").get<int>();
        rpt.aggregates.push_back(std::move(a));
    }
    for (const auto& o : j.at("ground_truth_eic")) {
        GroundTruthEic g;
        g.problem = o.at("problem").get<std::string>();
        g.pathological = o.at("pathological").get<bool>();
        g.eic = null_or_num(o.at("eic"));
        rpt.ground_truth.push_back(std::move(g));
    }
    return rpt;
}

std::string report_csv(const BenchReport& report) {
    std::string out = "problem,trial,method,alpha,noise_eta,r2,nmse,complexity,eic,runtime_s\n";
    for (const BenchRow& r : report.rows) {
        out += r.problem;
        out += ',' + std::to_string(r.trial);
        out += ',' + r.method;
        out += ',' + format_double(r.alpha);
        out += ',' + format_double(r.noise_eta);
        out += ',' + format_double(r.r2);
        out += ',' + format_double(r.nmse);
        out += ',' + std::to_string(r.complexity);
        out += ',' + format_double(r.eic);
        out += ',' + format_double(r.runtime_s);
        out += '\n';
    }
    return out;
}

} // namespace eicsr
