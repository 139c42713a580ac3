#include <catch2/catch.hpp>

#include <string>

#include "test_support.hpp"
#include "wp/wp.hpp"

using namespace wp;
using namespace wptest;

TEST_CASE("estimate_pn trivial lengths") {
    const auto sys = sanov_system();
    const auto e0 = estimate_pn(sys, 0, 50, 1, false);
    CHECK(e0.fraction == 1.0); // empty word is the identity; q(0) = 1
    CHECK(e0.q_bits == 1);

    // q(2) = 1: the filter carries no information, every word is a hit.
    const auto e2 = estimate_pn(sys, 2, 50, 1, false);
    CHECK(e2.fraction == 1.0);
}

TEST_CASE("estimate_pn is deterministic in the seed") {
    const auto sys = sanov_system();
    const auto a = estimate_pn(sys, 24, 300, 99, false);
    const auto b = estimate_pn(sys, 24, 300, 99, false);
    CHECK(a.hits == b.hits);
    CHECK(a.fraction == b.fraction);
    const auto c = estimate_pn(sys, 24, 300, 100, false);
    CHECK((c.hits != a.hits || c.seed != a.seed)); // different stream recorded
}

TEST_CASE("estimate_pn exhaustive matches the free-reduction oracle") {
    // Sanov generates a free group and the entries of a length-8 value stay
    // far below q(8), so mod-q identity == free reduction to the empty word.
    // The stack oracle over all 4^8 words counts 2092 hits.
    const auto sys = sanov_system();
    const auto e = estimate_pn(sys, 8, 0, 0, true);
    CHECK(e.exhaustive);
    CHECK(e.trials == 65536);
    CHECK(e.hits == 2092);

    std::size_t oracle_hits = 0;
    Word w;
    w.letters.assign(8, 0);
    for (std::size_t idx = 0; idx < 65536; ++idx) {
        if (freely_reduces_to_empty(w, sys.generator_count())) ++oracle_hits;
        for (std::size_t pos = 0; pos < 8; ++pos) {
            if (++w.letters[pos] < 4) break;
            w.letters[pos] = 0;
        }
    }
    CHECK(oracle_hits == e.hits);
}

TEST_CASE("estimate_pn exhaustive budget") {
    CHECK_THROWS_AS(estimate_pn(sanov_system(), 13, 0, 0, true), BudgetExceededError);
}

TEST_CASE("pn JSON fields") {
    const auto j = pn_json(estimate_pn(sanov_system(), 8, 0, 0, true));
    CHECK(j["n"] == 8);
    CHECK(j["trials"] == 65536);
    CHECK(j["hits"] == 2092);
    CHECK(j["exhaustive"] == true);
    CHECK(j["rng"] == SeededRng::algorithm_id());
}

TEST_CASE("run_bench records decisions and timings") {
    const auto sys = sanov_system();
    const auto rec = run_bench(sys, Algo::quickwp, 32, 20, 7);
    CHECK(rec.trials == 20);
    CHECK(rec.times_ns.size() == 20);
    CHECK(rec.trivial_count + rec.nontrivial_count == 20);
    CHECK(rec.modular_decisions + rec.exact_decisions == 20);
    CHECK(rec.mean_ns > 0.0);
    CHECK(rec.median_ns > 0.0);
}

TEST_CASE("run_bench decision columns reproduce under one seed") {
    const auto sys = sanov_system();
    for (Algo algo : {Algo::naive, Algo::dc, Algo::dc_mod, Algo::quickwp}) {
        const auto a = run_bench(sys, algo, 24, 15, 5);
        const auto b = run_bench(sys, algo, 24, 15, 5);
        CHECK(a.trivial_count == b.trivial_count);
        CHECK(a.nontrivial_count == b.nontrivial_count);
        CHECK(a.modular_decisions == b.modular_decisions);
        CHECK(a.exact_decisions == b.exact_decisions);
    }
}

TEST_CASE("all algorithms agree on the benchmarked words") {
    // The word streams depend only on (seed, trial), never the algorithm,
    // so the trivial/nontrivial tallies must coincide.
    const auto sys = sanov_system();
    for (std::size_t n : {16u, 64u}) {
        const auto naive = run_bench(sys, Algo::naive, n, 25, 11);
        const auto dc = run_bench(sys, Algo::dc, n, 25, 11);
        const auto dcm = run_bench(sys, Algo::dc_mod, n, 25, 11);
        const auto qwp = run_bench(sys, Algo::quickwp, n, 25, 11);
        CHECK(naive.trivial_count == dc.trivial_count);
        CHECK(naive.trivial_count == dcm.trivial_count);
        CHECK(naive.trivial_count == qwp.trivial_count);
    }
}

TEST_CASE("bench CSV format") {
    CHECK(bench_csv_header() ==
          "algo,n,trials,mean_ns,median_ns,trivial_count,modular_decisions,exact_decisions,seed");
    BenchRecord r;
    r.algorithm = Algo::dc;
    r.n = 1024;
    r.trials = 10;
    r.mean_ns = 1234.5;
    r.median_ns = 1200.0;
    r.trivial_count = 1;
    r.modular_decisions = 0;
    r.exact_decisions = 10;
    r.seed = 42;
    CHECK(bench_csv_row(r) == "dc,1024,10,1234.5,1200.0,1,0,10,42");
}

TEST_CASE("algo names round-trip") {
    for (Algo a : {Algo::naive, Algo::dc, Algo::dc_mod, Algo::quickwp}) {
        auto back = algo_from_name(algo_name(a));
        REQUIRE(back.has_value());
        CHECK(*back == a);
    }
    CHECK_FALSE(algo_from_name("strassen").has_value());
}
