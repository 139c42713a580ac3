#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wp/bigint.hpp"
#include "wp/error.hpp"
#include "wp/rng.hpp"
#include "wp/solvers.hpp"
#include "wp/words.hpp"

namespace wp {

/// Monte-Carlo (or exhaustive) estimate of P_n, the probability that a
/// uniform word of length n is the identity modulo q(n).
struct PnEstimate {
    std::size_t n = 0;
    std::size_t trials = 0;
    std::size_t hits = 0;
    double fraction = 0.0;
    std::size_t q_bits = 1;  // binary digits of q(n)
    std::uint64_t seed = 0;
    bool exhaustive = false;
};

namespace detail {

constexpr std::size_t kExhaustiveBudget = 10'000'000;

inline bool word_hits_identity_mod_q(const GeneratorSystem& sys, const Word& w,
                                     const QModulus& q) {
    // q = 1: the ring is trivial, every word projects to the identity, which
    // is exactly the case where the two-stage algorithm skips the filter.
    if (q.value < 2) return true;
    return mod_is_identity(evaluate_dc_mod(sys, w, q.value));
}

} // namespace detail

/// Sample (or enumerate, with `exhaustive`) length-n words and count those
/// with M(w) = Id mod q(n). Exhaustive mode walks all (2k)^n words and is
/// budgeted at 10^7; sampling uses one RNG substream per trial, so the
/// estimate is reproducible and trial-parallelizable.
inline PnEstimate estimate_pn(const GeneratorSystem& sys, std::size_t n, std::size_t trials,
                              std::uint64_t seed, bool exhaustive) {
    const QModulus& q = cached_q(n);
    PnEstimate est;
    est.n = n;
    est.seed = seed;
    est.exhaustive = exhaustive;
    est.q_bits = bit_count(q.value);

    if (exhaustive) {
        const std::size_t two_k = sys.alphabet_size();
        std::size_t total = 1;
        for (std::size_t i = 0; i < n; ++i) {
            total *= two_k;
            if (total > detail::kExhaustiveBudget)
                throw BudgetExceededError("estimate_pn: (2k)^n exceeds the exhaustive budget");
        }
        Word w;
        w.letters.assign(n, 0);
        for (std::size_t idx = 0; idx < total; ++idx) {
            if (detail::word_hits_identity_mod_q(sys, w, q)) ++est.hits;
            // Odometer increment in base 2k.
            for (std::size_t pos = 0; pos < n; ++pos) {
                if (++w.letters[pos] < two_k) break;
                w.letters[pos] = 0;
            }
        }
        est.trials = total;
    } else {
        est.trials = trials;
        for (std::size_t i = 0; i < trials; ++i) {
            SeededRng rng = SeededRng::substream(seed, i);
            Word w = sample_uniform_word(sys, n, rng);
            if (detail::word_hits_identity_mod_q(sys, w, q)) ++est.hits;
        }
    }
    est.fraction =
        est.trials == 0 ? 0.0 : static_cast<double>(est.hits) / static_cast<double>(est.trials);
    return est;
}

inline nlohmann::json pn_json(const PnEstimate& e) {
    return nlohmann::json{{"n", e.n},           {"trials", e.trials},
                          {"hits", e.hits},     {"fraction", e.fraction},
                          {"q_bits", e.q_bits}, {"seed", e.seed},
                          {"exhaustive", e.exhaustive}, {"rng", SeededRng::algorithm_id()}};
}

enum class Algo { naive, dc, dc_mod, quickwp };

inline const char* algo_name(Algo a) {
    switch (a) {
        case Algo::naive: return "naive";
        case Algo::dc: return "dc";
        case Algo::dc_mod: return "dc_mod";
        case Algo::quickwp: return "quickwp";
    }
    return "?";
}

inline std::optional<Algo> algo_from_name(const std::string& s) {
    if (s == "naive") return Algo::naive;
    if (s == "dc") return Algo::dc;
    if (s == "dc_mod") return Algo::dc_mod;
    if (s == "quickwp") return Algo::quickwp;
    return std::nullopt;
}

/// One benchmark cell: a fixed algorithm on `trials` pre-sampled words of
/// one length. Decision counts are part of the record so reruns with the
/// same seed can be checked column-for-column; only the timing columns are
/// expected to move.
struct BenchRecord {
    Algo algorithm = Algo::dc;
    std::size_t n = 0;
    std::size_t trials = 0;
    std::vector<double> times_ns; // one entry per measured trial
    double mean_ns = 0.0;
    double median_ns = 0.0;
    std::size_t trivial_count = 0;
    std::size_t nontrivial_count = 0;
    std::size_t modular_decisions = 0; // settled by the mod-q(n) verdict
    std::size_t exact_decisions = 0;   // settled by an exact computation
    std::uint64_t seed = 0;
    std::string rng_id = SeededRng::algorithm_id();
};

/// Run one (algorithm, n) cell. Words are sampled outside the timed region
/// from substreams keyed by (seed, trial), identically for every algorithm,
/// and q(n) is pre-warmed so the timings measure the solver, not the sieve.
/// The first word is evaluated once untimed as a warm-up.
inline BenchRecord run_bench(const GeneratorSystem& sys, Algo algo, std::size_t n,
                             std::size_t trials, std::uint64_t seed) {
    BenchRecord rec;
    rec.algorithm = algo;
    rec.n = n;
    rec.trials = trials;
    rec.seed = seed;

    std::vector<Word> words;
    words.reserve(trials);
    for (std::size_t i = 0; i < trials; ++i) {
        SeededRng rng = SeededRng::substream(seed, i);
        words.push_back(sample_uniform_word(sys, n, rng));
    }
    const QModulus& q = cached_q(n);

    auto decide = [&](const Word& w) -> std::pair<bool, bool> { // (trivial, modular stage)
        switch (algo) {
            case Algo::naive:
                return {is_identity(evaluate_naive(sys, w)), false};
            case Algo::dc:
                return {is_identity(evaluate_dc(sys, w)), false};
            case Algo::dc_mod:
                // The modular verdict alone; q(n) = 1 carries no information
                // and counts every word as passing.
                return {q.value < 2 || mod_is_identity(evaluate_dc_mod(sys, w, q.value)), true};
            case Algo::quickwp: {
                QuickWpResult r = quick_wp_detailed(sys, w);
                return {r.trivial, r.stage == DecisionStage::modular};
            }
        }
        return {false, false};
    };

    if (!words.empty()) decide(words[0]); // warm-up, not recorded

    rec.times_ns.reserve(trials);
    for (const Word& w : words) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto [trivial, modular] = decide(w);
        const auto t1 = std::chrono::steady_clock::now();
        rec.times_ns.push_back(static_cast<double>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count()));
        if (trivial) ++rec.trivial_count;
        else ++rec.nontrivial_count;
        if (modular) ++rec.modular_decisions;
        else ++rec.exact_decisions;
    }

    if (!rec.times_ns.empty()) {
        double sum = 0.0;
        for (double t : rec.times_ns) sum += t;
        rec.mean_ns = sum / static_cast<double>(rec.times_ns.size());
        std::vector<double> sorted = rec.times_ns;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t mid = sorted.size() / 2;
        rec.median_ns = sorted.size() % 2 == 1 ? sorted[mid]
                                               : 0.5 * (sorted[mid - 1] + sorted[mid]);
    }
    return rec;
}

inline std::string bench_csv_header() {
    return "algo,n,trials,mean_ns,median_ns,trivial_count,modular_decisions,exact_decisions,seed";
}

inline std::string bench_csv_row(const BenchRecord& r) {
    std::ostringstream os;
    os << algo_name(r.algorithm) << ',' << r.n << ',' << r.trials << ',';
    os.setf(std::ios::fixed);
    os.precision(1);
    os << r.mean_ns << ',' << r.median_ns << ',';
    os << r.trivial_count << ',' << r.modular_decisions << ',' << r.exact_decisions << ','
       << r.seed;
    return os.str();
}

} // namespace wp
