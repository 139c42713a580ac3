// wp: solve word-problem instances over integer matrix generators, benchmark
// the solver family, estimate identity probabilities, inspect the modulus
// schedule, and emit Markov-chain analysis reports.
//
// Exit codes: 0 = solved/emitted (the answer itself is data, not a status),
// 2 = input or format error, 3 = resource or precondition error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wp/wp.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw wp::FormatError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

wp::GeneratorSystem load_system(const std::string& path) {
    return wp::load_generator_system(read_file(path));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<std::size_t> parse_lengths(const std::string& s) {
    std::vector<std::size_t> out;
    for (const std::string& tok : split_list(s)) {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(tok, &pos);
        if (pos != tok.size()) throw wp::ParseError("bad length: " + tok);
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw wp::ParseError("--lengths: at least one length required");
    return out;
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw wp::FormatError("cannot open output file: " + out_path);
    out << content;
}

struct SolveOpts {
    std::string generators;
    std::string word_text;
    std::string word_file;
    std::string algo = "quickwp";
    bool show_matrix = false;
};

int run_solve(const SolveOpts& o) {
    const wp::GeneratorSystem sys = load_system(o.generators);
    if (o.word_text.empty() == o.word_file.empty())
        throw wp::ParseError("solve: provide exactly one of --word or --word-file");
    const std::string text = o.word_file.empty() ? o.word_text : read_file(o.word_file);
    const wp::Word w = wp::parse_word(sys, text);

    const auto algo = wp::algo_from_name(o.algo);
    if (!algo) throw wp::ParseError("unknown algorithm: " + o.algo);

    bool trivial = false;
    std::optional<wp::ExactMatrix> exact;
    switch (*algo) {
        case wp::Algo::naive:
            exact = wp::evaluate_naive(sys, w);
            trivial = wp::is_identity(*exact);
            break;
        case wp::Algo::dc:
            exact = wp::evaluate_dc(sys, w);
            trivial = wp::is_identity(*exact);
            break;
        case wp::Algo::dc_mod: {
            const wp::QModulus& q = wp::cached_q(w.size());
            trivial = q.value < 2 ||
                      wp::mod_is_identity(wp::evaluate_dc_mod(sys, w, q.value));
            std::cout << (trivial ? "trivial" : "nontrivial") << "\n";
            std::cout << "decided: modular verdict only, q = " << q.value.get_str() << "\n";
            if (o.show_matrix) {
                exact = wp::evaluate_dc(sys, w);
                std::cout << exact->to_string() << "\n";
            }
            return 0;
        }
        case wp::Algo::quickwp: {
            const wp::QuickWpResult r = wp::quick_wp_detailed(sys, w);
            trivial = r.trivial;
            std::cout << (trivial ? "trivial" : "nontrivial") << "\n";
            std::cout << "decided: "
                      << (r.stage == wp::DecisionStage::modular ? "modular stage" : "exact stage")
                      << ", q = " << wp::cached_q(w.size()).value.get_str() << "\n";
            if (o.show_matrix) {
                exact = wp::evaluate_dc(sys, w);
                std::cout << exact->to_string() << "\n";
            }
            return 0;
        }
    }
    std::cout << (trivial ? "trivial" : "nontrivial") << "\n";
    if (o.show_matrix) std::cout << exact->to_string() << "\n";
    return 0;
}

struct BenchOpts {
    std::string generators;
    std::string algos = "quickwp";
    std::string lengths;
    std::size_t trials = 10;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
};

int run_bench_cmd(const BenchOpts& o) {
    const wp::GeneratorSystem sys = load_system(o.generators);
    const auto lengths = parse_lengths(o.lengths);
    std::vector<wp::Algo> algos;
    for (const std::string& name : split_list(o.algos)) {
        const auto a = wp::algo_from_name(name);
        if (!a) throw wp::ParseError("unknown algorithm: " + name);
        algos.push_back(*a);
    }
    if (algos.empty()) throw wp::ParseError("--algo: at least one algorithm required");

    std::vector<wp::BenchRecord> records;
    for (wp::Algo a : algos) {
        for (std::size_t n : lengths) {
            records.push_back(wp::run_bench(sys, a, n, o.trials, o.seed));
        }
    }

    std::ostringstream body;
    if (o.format == "csv") {
        body << wp::bench_csv_header() << "\n";
        for (const auto& r : records) body << wp::bench_csv_row(r) << "\n";
    } else if (o.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : records) {
            arr.push_back({{"algo", wp::algo_name(r.algorithm)},
                           {"n", r.n},
                           {"trials", r.trials},
                           {"mean_ns", r.mean_ns},
                           {"median_ns", r.median_ns},
                           {"trivial_count", r.trivial_count},
                           {"modular_decisions", r.modular_decisions},
                           {"exact_decisions", r.exact_decisions},
                           {"seed", r.seed},
                           {"rng", r.rng_id}});
        }
        body << arr.dump(2) << "\n";
    } else {
        throw wp::ParseError("--format must be csv or json");
    }
    write_output(o.out, body.str());
    return 0;
}

struct PnOpts {
    std::string generators;
    std::string lengths;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    bool exhaustive = false;
    std::string out;
};

int run_pn(const PnOpts& o) {
    const wp::GeneratorSystem sys = load_system(o.generators);
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t n : parse_lengths(o.lengths)) {
        arr.push_back(wp::pn_json(wp::estimate_pn(sys, n, o.trials, o.seed, o.exhaustive)));
    }
    write_output(o.out, arr.dump(2) + "\n");
    return 0;
}

int run_q(std::uint64_t n) {
    const wp::QModulus q = wp::compute_q(static_cast<std::size_t>(n));
    std::ostringstream os;
    os << "q = " << q.value.get_str() << ", primes = [";
    for (std::size_t i = 0; i < q.primes.size(); ++i) {
        if (i) os << ",";
        os << q.primes[i];
    }
    os << "], bits = " << wp::bit_count(q.value) << "\n";
    std::cout << os.str();
    return 0;
}

struct ChainOpts {
    std::string generators;
    std::int64_t modulus = 0;
    std::size_t cap = 200000;
    std::string out;
};

int run_chain(const ChainOpts& o) {
    const wp::GeneratorSystem sys = load_system(o.generators);
    if (o.modulus < 2) throw wp::ParseError("--modulus must be >= 2");
    const wp::Chain base = wp::build_chain(sys, wp::Int(static_cast<long>(o.modulus)), o.cap);
    const wp::Chain lazy = wp::build_lazy_chain(base);
    const auto table = wp::tv_decay_table(lazy, 200);

    nlohmann::json j;
    if (lazy.states.size() <= 2000) {
        j = wp::chain_report_json(wp::spectral_report(lazy), table);
    } else {
        // Too large for the dense eigensolve: sizes, period and the
        // TV-decay table still tell the mixing story.
        wp::ChainAnalysis partial;
        partial.m = lazy.modulus;
        partial.size_H = lazy.base_size;
        partial.size_H_tilde = lazy.states.size();
        partial.period = lazy.period;
        partial.k = lazy.k;
        j = wp::chain_report_json(partial, table);
        j.erase("beta1");
        j.erase("beta_min");
        j.erase("beta_star");
        j.erase("bound");
        j.erase("eigenvalues");
    }
    write_output(o.out, j.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"word problem in integer matrix groups: solvers, benchmarks, chain analysis"};
    app.require_subcommand(1);

    SolveOpts so;
    CLI::App* solve = app.add_subcommand("solve", "decide whether a word is the identity");
    solve->add_option("--generators", so.generators, "generator file (JSON)")->required();
    solve->add_option("--word", so.word_text, "word as signed 1-based indices, e.g. \"1 -2 1\"");
    solve->add_option("--word-file", so.word_file, "file containing the word");
    solve->add_option("--algo", so.algo, "naive|dc|dc_mod|quickwp (default quickwp)");
    solve->add_flag("--show-matrix", so.show_matrix, "also print the exact matrix");

    BenchOpts bo;
    CLI::App* bench = app.add_subcommand("bench", "time the solvers on random words");
    bench->add_option("--generators", bo.generators, "generator file (JSON)")->required();
    bench->add_option("--algo", bo.algos, "comma list of naive,dc,dc_mod,quickwp");
    bench->add_option("--lengths", bo.lengths, "comma list of word lengths")->required();
    bench->add_option("--trials", bo.trials, "trials per (algorithm, length) cell");
    bench->add_option("--seed", bo.seed, "master seed for the word streams");
    bench->add_option("--out", bo.out, "output path (default stdout)");
    bench->add_option("--format", bo.format, "csv|json (default csv)");

    PnOpts po;
    CLI::App* pn = app.add_subcommand("pn", "estimate P_n = Pr[M(w) = Id mod q(n)]");
    pn->add_option("--generators", po.generators, "generator file (JSON)")->required();
    pn->add_option("--lengths", po.lengths, "comma list of word lengths")->required();
    pn->add_option("--trials", po.trials, "Monte-Carlo trials per length");
    pn->add_option("--seed", po.seed, "master seed");
    pn->add_flag("--exhaustive", po.exhaustive, "enumerate all (2k)^n words instead of sampling");
    pn->add_option("--out", po.out, "output path (default stdout)");

    std::uint64_t q_n = 0;
    CLI::App* qc = app.add_subcommand("q", "print the modulus schedule value q(n)");
    qc->add_option("n", q_n, "word length")->required();

    ChainOpts co;
    CLI::App* chain = app.add_subcommand("chain", "analyze the walk on H_m and emit a JSON report");
    chain->add_option("--generators", co.generators, "generator file (JSON)")->required();
    chain->add_option("--modulus", co.modulus, "modulus m >= 2")->required();
    chain->add_option("--cap", co.cap, "state budget for the subgroup closure");
    chain->add_option("--out", co.out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (solve->parsed()) return run_solve(so);
        if (bench->parsed()) return run_bench_cmd(bo);
        if (pn->parsed()) return run_pn(po);
        if (qc->parsed()) return run_q(q_n);
        if (chain->parsed()) return run_chain(co);
    } catch (const wp::PreconditionViolationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const wp::BudgetExceededError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const wp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
