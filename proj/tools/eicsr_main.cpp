// Command-line front end: eval, search, gen, compare, bench.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "eicsr/bench.hpp"
#include "eicsr/eic.hpp"
#include "eicsr/errors.hpp"
#include "eicsr/generator.hpp"
#include "eicsr/gp.hpp"
#include "eicsr/histogram.hpp"
#include "eicsr/mcts.hpp"
#include "eicsr/parse.hpp"
#include "eicsr/threads.hpp"

using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

void write_out(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::fwrite(content.data(), 1, content.size(), stdout);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw eicsr::Error("cannot open '" + path + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw eicsr::Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// "60s" / "2.5s" -> seconds; "200gen" / "500it" / "500" -> count.
eicsr::SearchBudget parse_budget(const std::string& text) {
    eicsr::SearchBudget b;
    std::string num = text;
    bool seconds = false;
    auto strip = [&](const char* suffix) {
        const std::size_t n = std::string(suffix).size();
        if (num.size() > n && num.compare(num.size() - n, n, suffix) == 0) {
            num.resize(num.size() - n);
            return true;
        }
        return false;
    };
    if (strip("gen") || strip("it")) {
        // count forms
    } else if (strip("s")) {
        seconds = true;
    }
    const char* first = num.data();
    const char* last = num.data() + num.size();
    if (seconds) {
        double v = 0.0;
        auto [p, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || p != last || !(v > 0.0))
            throw CLI::ValidationError("--budget", "expected e.g. 60s, 200gen or 500");
        b.seconds = v;
    } else {
        long long v = 0;
        auto [p, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || p != last || v <= 0)
            throw CLI::ValidationError("--budget", "expected e.g. 60s, 200gen or 500");
        b.count = v;
    }
    return b;
}

std::vector<eicsr::Expr> load_corpus_jsonl(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<eicsr::Expr> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const ordered_json j = ordered_json::parse(line);
        out.push_back(eicsr::parse(j.at("formula").get<std::string>()));
    }
    if (out.empty()) throw eicsr::Error("no formulas in '" + path + "'");
    return out;
}

ordered_json divergence_json(const eicsr::FeatureDivergence& d) {
    ordered_json j;
    j["variables"] = d.variables;
    j["constants"] = d.constants;
    j["operators"] = d.operators;
    j["length"] = d.length;
    return j;
}

int cmd_eval(const std::string& formula, const std::string& data_path,
             const std::string& target, double sigma, bool per_node, std::uint64_t seed,
             bool as_json) {
    const eicsr::Dataset data = eicsr::load_csv(data_path, target);
    const eicsr::Expr e = eicsr::parse(formula, data.names);
    eicsr::EicConfig cfg;
    cfg.sigma_r = sigma;
    cfg.seed = seed;
    const eicsr::EicReport rpt = eicsr::calculate_eic(e, data, cfg);

    if (as_json) {
        ordered_json j;
        j["formula"] = eicsr::to_string(e);
        j["eic"] = rpt.overall;
        j["delta_r2_root"] = std::isfinite(rpt.delta_r2_root)
                                 ? ordered_json(rpt.delta_r2_root)
                                 : ordered_json(nullptr);
        j["invalid_samples"] = rpt.invalid_samples;
        j["clipped"] = rpt.clipped;
        if (per_node) {
            j["per_node"] = ordered_json::array();
            for (const auto& [path, score] : rpt.per_node) {
                ordered_json o;
                o["path"] = path;
                o["formula"] = eicsr::to_string(eicsr::subtree_at_path(e, path));
                o["eic"] = score;
                j["per_node"].push_back(std::move(o));
            }
        }
        write_out("", j.dump(2) + "\n");
        return 0;
    }

    std::string out = "eic: " + fmt(rpt.overall) + "\n";
    out += "delta_r2_root: " + fmt(rpt.delta_r2_root) + "\n";
    out += "invalid_samples: " + std::to_string(rpt.invalid_samples) + "\n";
    out += std::string("clipped: ") + (rpt.clipped ? "true" : "false") + "\n";
    if (per_node) {
        for (const auto& [path, score] : rpt.per_node) {
            const std::string label = path.empty() ? "(root)" : path;
            out += fmt(score) + "\t" + label + "\t" +
                   eicsr::to_string(eicsr::subtree_at_path(e, path)) + "\n";
        }
    }
    write_out("", out);
    return 0;
}

std::string archive_json(const std::vector<eicsr::Candidate>& archive) {
    ordered_json arr = ordered_json::array();
    for (const eicsr::Candidate& c : archive) {
        ordered_json o;
        o["formula"] = eicsr::to_string(c.fitted);
        o["r2"] = std::isfinite(c.model.r2) ? ordered_json(c.model.r2) : ordered_json(nullptr);
        o["nmse"] = std::isfinite(c.model.nmse) ? ordered_json(c.model.nmse)
                                                : ordered_json(nullptr);
        o["complexity"] = c.complexity;
        o["eic"] = c.eic;
        o["fitness"] = c.fitness;
        arr.push_back(std::move(o));
    }
    ordered_json j;
    j["archive"] = std::move(arr);
    return j.dump(2) + "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"digit-loss scored symbolic regression"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: EICSR_THREADS or OpenMP)");

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "score one formula's digit loss on a dataset");
    std::string ev_formula, ev_data, ev_target;
    double ev_sigma = 1e-6;
    bool ev_per_node = false, ev_json = false;
    std::uint64_t ev_seed = 0;
    eval->add_option("--formula", ev_formula, "formula text")->required();
    eval->add_option("--data", ev_data, "input CSV")->required();
    eval->add_option("--target", ev_target, "target column name (default: last)");
    eval->add_option("--sigma", ev_sigma, "relative noise std");
    eval->add_flag("--per-node", ev_per_node, "annotate every operator node");
    eval->add_option("--seed", ev_seed, "noise stream seed");
    eval->add_flag("--json", ev_json, "JSON output");

    // ---- search ----
    auto* search = app.add_subcommand("search", "run a symbolic regression search");
    std::string s_method = "mcts", s_data, s_target, s_budget, s_out;
    double s_alpha = 0.0, s_eta = 0.999, s_sigma = 1e-6, s_ucb_c = 1.4142135623730951;
    int s_max_children = 16, s_pop = 256, s_max_nodes = 50;
    std::uint64_t s_seed = 0;
    search->add_option("--method", s_method, "gp or mcts")
        ->check(CLI::IsMember({"gp", "mcts"}));
    search->add_option("--data", s_data, "training CSV")->required();
    search->add_option("--target", s_target, "target column name (default: last)");
    auto* s_alpha_opt = search->add_option("--alpha", s_alpha,
                                           "digit-loss penalty (default 0.002 gp / 0.01 mcts)");
    search->add_option("--eta", s_eta, "complexity discount base");
    search->add_option("--budget", s_budget, "e.g. 60s, 200gen, 2000it")->required();
    search->add_option("--seed", s_seed, "search seed");
    search->add_option("--out", s_out, "archive JSON path (default: stdout)");
    search->add_option("--sigma", s_sigma, "relative noise std for scoring");
    search->add_option("--ucb-c", s_ucb_c, "mcts exploration constant");
    search->add_option("--max-children", s_max_children, "mcts expansion width");
    search->add_option("--pop", s_pop, "gp population size");
    search->add_option("--max-nodes", s_max_nodes, "expression size limit");

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "sample a random formula corpus");
    int g_count = 100, g_vars = 1, g_max_binary = 8, g_max_unary = 4;
    double g_theta = 0.0;
    std::uint64_t g_seed = 0;
    std::string g_out;
    gen->add_option("--count", g_count, "corpus size");
    gen->add_option("--vars", g_vars, "number of input variables");
    auto* g_theta_opt = gen->add_option("--filter-eic", g_theta,
                                        "keep only formulas scoring at or below this");
    gen->add_option("--seed", g_seed, "generator seed");
    gen->add_option("--out", g_out, "corpus JSONL path (default: stdout)");
    gen->add_option("--max-binary", g_max_binary, "binary op budget bound");
    gen->add_option("--max-unary", g_max_unary, "unary op budget bound");

    // ---- compare ----
    auto* compare = app.add_subcommand("compare", "feature-divergence matrix between corpora");
    std::vector<std::string> c_corpora;
    std::string c_reference = "builtin", c_out;
    bool c_csv = false;
    compare->add_option("--corpus", c_corpora, "corpus JSONL (repeatable)")->required();
    compare->add_option("--reference", c_reference,
                        "reference corpus JSONL, or 'builtin'");
    compare->add_flag("--csv", c_csv, "CSV instead of JSON");
    compare->add_option("--out", c_out, "output path (default: stdout)");

    // ---- bench ----
    auto* bench = app.add_subcommand("bench", "multi-trial benchmark over a problem suite");
    std::string b_suite = "builtin", b_method = "mcts", b_budget, b_out, b_csv;
    double b_alpha = 0.0, b_noise = 0.0, b_split = 0.75;
    int b_trials = 10;
    std::size_t b_rows = 256;
    std::uint64_t b_seed = 0;
    bool b_stable = false;
    bench->add_option("--suite", b_suite, "problem suite")
        ->check(CLI::IsMember({"builtin"}));
    bench->add_option("--method", b_method, "gp or mcts")
        ->check(CLI::IsMember({"gp", "mcts"}));
    auto* b_alpha_opt = bench->add_option("--alpha", b_alpha,
                                          "digit-loss penalty (default 0.002 gp / 0.01 mcts)");
    bench->add_option("--noise", b_noise, "training-target noise eta");
    bench->add_option("--trials", b_trials, "trials per problem");
    bench->add_option("--seed", b_seed, "experiment seed");
    bench->add_option("--out", b_out, "report JSON path (default: stdout)");
    bench->add_option("--csv", b_csv, "also write the CSV table here");
    bench->add_option("--rows", b_rows, "synthetic rows per problem");
    bench->add_option("--split", b_split, "train fraction");
    bench->add_option("--budget", b_budget, "per-trial search budget (e.g. 1000it, 10gen)");
    bench->add_flag("--stable-output", b_stable, "zero runtime fields for byte-stable reports");

    CLI11_PARSE(app, argc, argv);

    try {
        if (threads > 0) eicsr::set_worker_threads(threads);

        if (*eval)
            return cmd_eval(ev_formula, ev_data, ev_target, ev_sigma, ev_per_node, ev_seed,
                            ev_json);

        if (*search) {
            const eicsr::Dataset data = eicsr::load_csv(s_data, s_target);
            std::vector<eicsr::Candidate> archive;
            if (s_method == "gp") {
                eicsr::GpConfig cfg;
                cfg.population_size = s_pop;
                cfg.max_nodes = s_max_nodes;
                cfg.budget = parse_budget(s_budget);
                cfg.seed = s_seed;
                cfg.fitness_cfg.eta = s_eta;
                if (s_alpha_opt->count()) cfg.fitness_cfg.alpha = s_alpha;
                cfg.eic_cfg.sigma_r = s_sigma;
                archive = eicsr::gp_search(data, cfg);
            } else {
                eicsr::MctsConfig cfg;
                cfg.ucb_c = s_ucb_c;
                cfg.max_children = s_max_children;
                cfg.max_nodes = s_max_nodes;
                cfg.budget = parse_budget(s_budget);
                cfg.seed = s_seed;
                cfg.fitness_cfg.eta = s_eta;
                if (s_alpha_opt->count()) cfg.fitness_cfg.alpha = s_alpha;
                cfg.eic_cfg.sigma_r = s_sigma;
                archive = eicsr::mcts_search(data, cfg);
            }
            write_out(s_out, archive_json(archive));
            return 0;
        }

        if (*gen) {
            eicsr::GeneratorConfig gcfg;
            gcfg.num_vars = g_vars;
            gcfg.max_binary_ops = g_max_binary;
            gcfg.max_unary_ops = g_max_unary;
            gcfg.seed = g_seed;
            eicsr::FilterConfig fcfg;
            const bool filtered = g_theta_opt->count() > 0;
            if (filtered) fcfg.theta = g_theta;
            const std::vector<eicsr::FilteredSample> corpus =
                eicsr::generate_corpus(gcfg, fcfg, g_count, filtered);
            std::string out;
            for (const eicsr::FilteredSample& s : corpus) {
                ordered_json j;
                j["formula"] = eicsr::to_string(s.expr);
                j["eic"] = s.eic;
                j["attempts"] = s.attempts;
                j["complexity"] = eicsr::complexity(s.expr);
                out += j.dump() + "\n";
            }
            write_out(g_out, out);
            return 0;
        }

        if (*compare) {
            const std::vector<eicsr::Expr> ref = c_reference == "builtin"
                                                     ? eicsr::reference_physics_corpus()
                                                     : load_corpus_jsonl(c_reference);
            const eicsr::FeatureHistogram href = eicsr::featurize(ref);
            if (c_csv) {
                std::string out = "corpus,metric,variables,constants,operators,length\n";
                for (const std::string& path : c_corpora) {
                    const eicsr::FeatureHistogram h =
                        eicsr::featurize(load_corpus_jsonl(path));
                    const eicsr::FeatureDivergence js = eicsr::js_divergence(h, href);
                    const eicsr::FeatureDivergence kl = eicsr::kl_divergence(h, href);
                    out += path + ",js," + fmt(js.variables) + ',' + fmt(js.constants) +
                           ',' + fmt(js.operators) + ',' + fmt(js.length) + "\n";
                    out += path + ",kl," + fmt(kl.variables) + ',' + fmt(kl.constants) +
                           ',' + fmt(kl.operators) + ',' + fmt(kl.length) + "\n";
                }
                write_out(c_out, out);
            } else {
                ordered_json j;
                j["reference"] = c_reference;
                j["corpora"] = ordered_json::array();
                for (const std::string& path : c_corpora) {
                    const std::vector<eicsr::Expr> corpus = load_corpus_jsonl(path);
                    const eicsr::FeatureHistogram h = eicsr::featurize(corpus);
                    ordered_json o;
                    o["corpus"] = path;
                    o["count"] = corpus.size();
                    o["js"] = divergence_json(eicsr::js_divergence(h, href));
                    o["kl"] = divergence_json(eicsr::kl_divergence(h, href));
                    j["corpora"].push_back(std::move(o));
                }
                write_out(c_out, j.dump(2) + "\n");
            }
            return 0;
        }

        if (*bench) {
            eicsr::BenchConfig cfg;
            cfg.method = b_method;
            cfg.noise_eta = b_noise;
            cfg.split_frac = b_split;
            cfg.trials = b_trials;
            cfg.rows = b_rows;
            cfg.seed = b_seed;
            cfg.stable_output = b_stable;
            const eicsr::SearchBudget budget =
                parse_budget(!b_budget.empty() ? b_budget
                                               : (b_method == "gp" ? std::string("25gen")
                                                                   : std::string("2000it")));
            cfg.gp.budget = budget;
            cfg.mcts.budget = budget;
            if (b_alpha_opt->count()) {
                cfg.gp.fitness_cfg.alpha = b_alpha;
                cfg.mcts.fitness_cfg.alpha = b_alpha;
            }
            const eicsr::BenchReport rpt = eicsr::run_bench(eicsr::builtin_suite(), cfg);
            write_out(b_out, eicsr::report_json(rpt));
            if (!b_csv.empty()) write_out(b_csv, eicsr::report_csv(rpt));
            return 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
