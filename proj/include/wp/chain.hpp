#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "wp/bigint.hpp"
#include "wp/error.hpp"
#include "wp/exact_matrix.hpp"
#include "wp/mod_matrix.hpp"
#include "wp/sieve.hpp"
#include "wp/solvers.hpp"
#include "wp/words.hpp"

namespace wp {

/// Random walk on the projection of the generated subgroup modulo m.
///
/// Base chains step by one uniformly chosen element of the symmetrized
/// alphabet (probability 1/(2k) per edge, no self-loops under the
/// admissibility checks of build_chain). Lazy chains are the two-step walk
/// restricted to the states reachable from the identity, with self-loop
/// probability exactly 1/(2k).
///
/// Transition probabilities are exact rationals so that symmetry, row sums,
/// stationarity and reversibility are equality checks, not tolerances.
struct Chain {
    enum class Kind { base, lazy };

    Kind kind = Kind::base;
    Int modulus;
    std::size_t k = 0;                 // generator count of the system
    std::vector<ModMatrix> states;     // BFS order from the identity
    std::size_t id_index = 0;
    std::vector<std::vector<std::pair<std::size_t, Rat>>> rows; // sorted by target

    std::size_t base_size = 0; // |H_m|; equals states.size() for base chains
    int period = 0;            // 1 or 2 for lazy chains; 0 for base chains
};

/// Breadth-first closure of {Id} under right-multiplication by the
/// symmetrized alphabet reduced mod m. Deterministic: neighbors are visited
/// in letter-index order, so state indices are reproducible.
inline std::vector<ModMatrix> enumerate_subgroup(const GeneratorSystem& sys, const Int& m,
                                                 std::size_t cap) {
    if (m < 2) throw Error("enumerate_subgroup: modulus must be >= 2");
    const std::size_t two_k = sys.alphabet_size();
    std::vector<ModMatrix> letters_mod;
    letters_mod.reserve(two_k);
    for (std::size_t a = 0; a < two_k; ++a)
        letters_mod.push_back(mod_reduce(sys.letter_matrix(a), m));

    std::vector<ModMatrix> states;
    std::unordered_map<std::string, std::size_t> seen;
    states.push_back(ModMatrix::identity(sys.dim(), m));
    seen.emplace(canonical_key(states[0]), 0);
    for (std::size_t cursor = 0; cursor < states.size(); ++cursor) {
        for (std::size_t a = 0; a < two_k; ++a) {
            ModMatrix next = mod_mul(states[cursor], letters_mod[a]);
            std::string key = canonical_key(next);
            if (seen.find(key) != seen.end()) continue;
            if (states.size() >= cap)
                throw BudgetExceededError("enumerate_subgroup: state budget " +
                                          std::to_string(cap) + " exceeded");
            seen.emplace(std::move(key), states.size());
            states.push_back(std::move(next));
        }
    }
    return states;
}

/// The one-step walk on H_m. Requires m to exceed the largest generator
/// entry in absolute value, and verifies outright that the symmetrized
/// alphabet stays pairwise distinct and identity-free mod m (the norm
/// hypothesis alone does not always force this; m = 2 with a unipotent
/// generator is the standard counterexample).
inline Chain build_chain(const GeneratorSystem& sys, const Int& m, std::size_t cap) {
    if (m < 2) throw Error("build_chain: modulus must be >= 2");
    const std::size_t two_k = sys.alphabet_size();

    Int norm = 0;
    for (std::size_t a = 0; a < two_k; ++a) {
        Int t = max_norm(sys.letter_matrix(a));
        if (t > norm) norm = t;
    }
    if (m <= norm)
        throw PreconditionViolationError(
            "build_chain: modulus must exceed the max generator norm " + norm.get_str());

    std::vector<ModMatrix> letters_mod;
    letters_mod.reserve(two_k);
    for (std::size_t a = 0; a < two_k; ++a)
        letters_mod.push_back(mod_reduce(sys.letter_matrix(a), m));
    for (std::size_t a = 0; a < two_k; ++a) {
        if (mod_is_identity(letters_mod[a]))
            throw PreconditionViolationError(
                "build_chain: a generator projects to the identity mod " + m.get_str());
        for (std::size_t b = a + 1; b < two_k; ++b) {
            if (letters_mod[a] == letters_mod[b])
                throw PreconditionViolationError(
                    "build_chain: the symmetrized alphabet collapses mod " + m.get_str());
        }
    }

    Chain c;
    c.kind = Chain::Kind::base;
    c.modulus = m;
    c.k = sys.generator_count();
    c.states = enumerate_subgroup(sys, m, cap);
    c.id_index = 0;
    c.base_size = c.states.size();

    std::unordered_map<std::string, std::size_t> index_of;
    index_of.reserve(c.states.size());
    for (std::size_t i = 0; i < c.states.size(); ++i)
        index_of.emplace(canonical_key(c.states[i]), i);

    const Rat step(1, static_cast<unsigned long>(two_k));
    c.rows.resize(c.states.size());
    for (std::size_t x = 0; x < c.states.size(); ++x) {
        std::map<std::size_t, Rat> row;
        for (std::size_t a = 0; a < two_k; ++a) {
            ModMatrix y = mod_mul(c.states[x], letters_mod[a]);
            const std::size_t iy = index_of.at(canonical_key(y));
            row[iy] += step;
        }
        // Distinctness makes the 2k targets distinct and never x itself.
        if (row.size() != two_k || row.count(x) != 0)
            throw Error("build_chain: edge merge or self-loop despite distinct alphabet");
        c.rows[x].assign(row.begin(), row.end());
    }
    return c;
}

/// 1 if the walk's graph is non-bipartite, 2 if bipartite; no other period
/// can occur because every generator pairs with its inverse in a 2-cycle.
inline int chain_period(const Chain& c) {
    if (c.kind != Chain::Kind::base)
        throw Error("chain_period: defined on base chains");
    std::vector<int> color(c.states.size(), -1);
    std::vector<std::size_t> queue;
    color[c.id_index] = 0;
    queue.push_back(c.id_index);
    bool bipartite = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::size_t x = queue[head];
        for (const auto& [y, p] : c.rows[x]) {
            if (color[y] == -1) {
                color[y] = 1 - color[x];
                queue.push_back(y);
            } else if (color[y] == color[x]) {
                bipartite = false;
            }
        }
    }
    return bipartite ? 2 : 1;
}

/// The two-step chain restricted to the states reachable from the identity
/// in an even number of base steps. State order is the base order filtered
/// to the reachable set, so indices stay deterministic.
inline Chain build_lazy_chain(const Chain& base) {
    if (base.kind != Chain::Kind::base)
        throw Error("build_lazy_chain: input must be a base chain");
    const std::size_t n = base.states.size();

    // Reachability in the two-step graph.
    std::vector<bool> reach(n, false);
    std::vector<std::size_t> queue;
    reach[base.id_index] = true;
    queue.push_back(base.id_index);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::size_t x = queue[head];
        for (const auto& [z, p1] : base.rows[x]) {
            for (const auto& [y, p2] : base.rows[z]) {
                if (!reach[y]) {
                    reach[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }

    Chain lazy;
    lazy.kind = Chain::Kind::lazy;
    lazy.modulus = base.modulus;
    lazy.k = base.k;
    lazy.base_size = n;
    lazy.period = chain_period(base);

    std::vector<std::size_t> lazy_index(n, SIZE_MAX);
    for (std::size_t i = 0; i < n; ++i) {
        if (!reach[i]) continue;
        lazy_index[i] = lazy.states.size();
        lazy.states.push_back(base.states[i]);
    }
    lazy.id_index = lazy_index[base.id_index];

    const std::size_t h = lazy.states.size();
    if (lazy.period == 1 ? (h != n) : (2 * h != n))
        throw Error("build_lazy_chain: period/state-count relation violated");

    const Rat self_loop(1, static_cast<unsigned long>(2 * base.k));
    lazy.rows.resize(h);
    std::size_t li = 0;
    for (std::size_t x = 0; x < n; ++x) {
        if (!reach[x]) continue;
        std::map<std::size_t, Rat> row;
        for (const auto& [z, p1] : base.rows[x]) {
            for (const auto& [y, p2] : base.rows[z]) {
                row[lazy_index[y]] += p1 * p2;
            }
        }
        Rat sum = 0;
        for (const auto& [y, p] : row) sum += p;
        if (sum != 1)
            throw Error("build_lazy_chain: row sum is not 1");
        if (row[li] != self_loop)
            throw Error("build_lazy_chain: self-loop probability is not 1/(2k)");
        lazy.rows[li].assign(row.begin(), row.end());
        ++li;
    }
    return lazy;
}

/// Probability vector over a chain's states.
struct DistributionVector {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Uniform distribution on n states.
inline DistributionVector uniform_distribution(std::size_t n) {
    DistributionVector d;
    d.values.assign(n, 1.0 / static_cast<double>(n));
    return d;
}

namespace detail {

using SparseRowsD = std::vector<std::vector<std::pair<std::size_t, double>>>;

inline SparseRowsD rows_as_double(const Chain& c) {
    SparseRowsD rows_d(c.rows.size());
    for (std::size_t x = 0; x < c.rows.size(); ++x) {
        rows_d[x].reserve(c.rows[x].size());
        for (const auto& [y, p] : c.rows[x]) rows_d[x].emplace_back(y, p.get_d());
    }
    return rows_d;
}

/// One step of cur * P with compensated (Kahan) accumulation per entry.
inline void propagate_once(const SparseRowsD& rows_d, std::vector<double>& cur,
                           std::vector<double>& next, std::vector<double>& comp) {
    std::fill(next.begin(), next.end(), 0.0);
    std::fill(comp.begin(), comp.end(), 0.0);
    for (std::size_t x = 0; x < rows_d.size(); ++x) {
        const double vx = cur[x];
        if (vx == 0.0) continue;
        for (const auto& [y, p] : rows_d[x]) {
            const double term = vx * p - comp[y];
            const double t = next[y] + term;
            comp[y] = (t - next[y]) - term;
            next[y] = t;
        }
    }
    cur.swap(next);
}

} // namespace detail

/// Point mass at the identity propagated `steps` times through the
/// transition rows. Floating arithmetic with compensated summation.
inline DistributionVector distribution_after(const Chain& c, std::size_t steps) {
    const std::size_t n = c.states.size();
    const detail::SparseRowsD rows_d = detail::rows_as_double(c);
    std::vector<double> cur(n, 0.0);
    cur[c.id_index] = 1.0;
    std::vector<double> next(n), comp(n);
    for (std::size_t s = 0; s < steps; ++s) detail::propagate_once(rows_d, cur, next, comp);
    DistributionVector out;
    out.values = std::move(cur);
    return out;
}

/// Total variation distance: half the l1 distance between the vectors
/// (equal to the sup over subsets of the probability gap).
inline double total_variation(const DistributionVector& u, const DistributionVector& v) {
    if (u.size() != v.size())
        throw DimensionMismatchError("total_variation: dimension mismatch");
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double term = std::abs(u.values[i] - v.values[i]) - comp;
        const double t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    return 0.5 * sum;
}

/// Spectral summary of a lazy chain together with the mixing bound
/// 1 - 1/(4 k^2 |H~|^2) it is checked against.
struct ChainAnalysis {
    Int m;
    std::size_t size_H = 0;
    std::size_t size_H_tilde = 0;
    int period = 0;
    std::size_t k = 0;
    double beta1 = 0.0;    // second-largest eigenvalue
    double beta_min = 0.0; // smallest eigenvalue
    double beta_star = 0.0;
    double bound = 0.0;
    std::vector<double> eigenvalues; // descending
};

/// Dense symmetric eigensolve of a lazy chain's transition matrix. Asserts
/// the spectral facts behind the mixing rate: beta* within the Poincare
/// bound and beta_min >= -1 + 1/k from the self-loops.
inline ChainAnalysis spectral_report(const Chain& c, std::size_t budget = 2000) {
    if (c.kind != Chain::Kind::lazy)
        throw Error("spectral_report: defined on lazy chains");
    const std::size_t n = c.states.size();
    if (n > budget)
        throw BudgetExceededError("spectral_report: " + std::to_string(n) +
                                  " states exceed the dense eigensolve budget " +
                                  std::to_string(budget));

    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (std::size_t x = 0; x < n; ++x) {
        for (const auto& [y, p] : c.rows[x]) {
            P(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = p.get_d();
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(P, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw Error("spectral_report: eigensolve failed to converge");

    ChainAnalysis a;
    a.m = c.modulus;
    a.size_H = c.base_size;
    a.size_H_tilde = n;
    a.period = c.period;
    a.k = c.k;
    const auto& ev = solver.eigenvalues(); // ascending
    a.eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        a.eigenvalues[i] = ev(static_cast<Eigen::Index>(n - 1 - i));
    a.beta_min = a.eigenvalues[n - 1];
    a.beta1 = n >= 2 ? a.eigenvalues[1] : a.eigenvalues[0];
    a.beta_star = std::max(a.beta1, std::abs(a.beta_min));
    const double hk = static_cast<double>(4 * c.k * c.k) * static_cast<double>(n) *
                      static_cast<double>(n);
    a.bound = 1.0 - 1.0 / hk;

    if (a.beta_star > a.bound + 1e-9)
        throw Error("spectral_report: beta* exceeds the Poincare bound");
    if (a.beta_min < -1.0 + 1.0 / static_cast<double>(c.k) - 1e-9)
        throw Error("spectral_report: beta_min below the self-loop bound");
    return a;
}

/// One row of the TV-decay table emitted with chain reports.
struct TvDecayEntry {
    std::size_t nu = 0;
    double tv = 0.0;
    double bound = 0.0;
};

/// Measured total variation between the nu-step distribution from Id and
/// uniform, against the spectral envelope (1/2) sqrt(|H~|) r^nu.
inline std::vector<TvDecayEntry> tv_decay_table(const Chain& c, std::size_t max_nu) {
    const std::size_t n = c.states.size();
    const DistributionVector pi = uniform_distribution(n);
    const detail::SparseRowsD rows_d = detail::rows_as_double(c);
    const double rate =
        1.0 - 1.0 / (static_cast<double>(4 * c.k * c.k) * static_cast<double>(n) *
                     static_cast<double>(n));
    std::vector<TvDecayEntry> table;
    table.reserve(max_nu + 1);
    DistributionVector cur;
    cur.values.assign(n, 0.0);
    cur.values[c.id_index] = 1.0;
    std::vector<double> next(n), comp(n);
    double envelope = 0.5 * std::sqrt(static_cast<double>(n));
    for (std::size_t nu = 0; nu <= max_nu; ++nu) {
        if (nu > 0) detail::propagate_once(rows_d, cur.values, next, comp);
        table.push_back({nu, total_variation(cur, pi), envelope});
        envelope *= rate;
    }
    return table;
}

namespace detail {

/// Machine-width matrices mod p for the order computations; behaviorally
/// identical to the ModMatrix route, just without bignum traffic.
struct SmallMat {
    std::size_t d = 0;
    std::vector<std::uint64_t> e;
};

inline SmallMat small_reduce(const ExactMatrix& a, std::uint64_t p) {
    SmallMat s;
    s.d = a.dim();
    s.e.resize(s.d * s.d);
    Int t;
    for (std::size_t i = 0; i < s.e.size(); ++i) {
        mpz_fdiv_r_ui(t.get_mpz_t(), a.entries()[i].get_mpz_t(), p);
        s.e[i] = t.get_ui();
    }
    return s;
}

inline SmallMat small_mul(const SmallMat& a, const SmallMat& b, std::uint64_t p) {
    const std::size_t d = a.d;
    SmallMat out;
    out.d = d;
    out.e.resize(d * d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            unsigned __int128 acc = 0;
            for (std::size_t k = 0; k < d; ++k)
                acc += static_cast<unsigned __int128>(a.e[i * d + k]) * b.e[k * d + j];
            out.e[i * d + j] = static_cast<std::uint64_t>(acc % p);
        }
    }
    return out;
}

inline bool small_is_id(const SmallMat& a) {
    for (std::size_t i = 0; i < a.d; ++i)
        for (std::size_t j = 0; j < a.d; ++j)
            if (a.e[i * a.d + j] != (i == j ? 1u : 0u)) return false;
    return true;
}

/// True iff the order of a mod p is at most `bound` (iterates at most
/// `bound` multiplications). p must fit the machine-width fast path.
inline bool small_order_at_most(const ExactMatrix& a, std::uint64_t p, std::uint64_t bound) {
    const SmallMat base = small_reduce(a, p);
    SmallMat cur = base;
    for (std::uint64_t j = 1; j <= bound; ++j) {
        if (small_is_id(cur)) return true;
        cur = small_mul(cur, base, p);
    }
    return false;
}

} // namespace detail

/// Least positive power of a that is the identity mod p, by iterated
/// multiplication. The cap p^(d^2) bounds the group order; reaching it
/// signals a bug, not an input condition.
inline Int order_mod_prime(const ExactMatrix& a, std::uint64_t p) {
    if (p < 2) throw Error("order_mod_prime: p must be >= 2");
    Int cap = 1;
    for (std::size_t i = 0; i < a.dim() * a.dim(); ++i) cap *= static_cast<unsigned long>(p);

    if (p < (1ull << 31)) {
        const detail::SmallMat base = detail::small_reduce(a, p);
        detail::SmallMat cur = base;
        Int ord = 1;
        while (!detail::small_is_id(cur)) {
            cur = detail::small_mul(cur, base, p);
            ++ord;
            if (ord > cap) throw Error("order_mod_prime: group order cap exceeded");
        }
        return ord;
    }
    const ModMatrix base = mod_reduce(a, Int(static_cast<unsigned long>(p)));
    ModMatrix cur = base;
    Int ord = 1;
    while (!mod_is_identity(cur)) {
        cur = mod_mul(cur, base);
        ++ord;
        if (ord > cap) throw Error("order_mod_prime: group order cap exceeded");
    }
    return ord;
}

/// |{p prime <= prime_bound : order of a mod p <= order_bound}|.
inline std::size_t count_small_order_primes(const ExactMatrix& a, std::uint64_t order_bound,
                                            std::uint64_t prime_bound) {
    std::size_t count = 0;
    for (std::uint64_t p : primes_up_to(prime_bound)) {
        if (detail::small_order_at_most(a, p, order_bound)) ++count;
    }
    return count;
}

/// Smallest prime factor p of q(n) such that a mod p has order at least
/// 2 (log2 n)^2; absent when no factor qualifies (finite-order matrices,
/// or small n). Absence is a value, not an error.
inline std::optional<std::uint64_t> find_good_prime(const ExactMatrix& a, std::size_t n) {
    if (n < 2) return std::nullopt;
    const std::uint64_t threshold = detail::order_threshold(n);
    for (std::uint64_t p : cached_q(n).primes) {
        // order >= threshold iff no power below threshold hits Id.
        if (threshold <= 1 || !detail::small_order_at_most(a, p, threshold - 1))
            return p;
    }
    return std::nullopt;
}

/// JSON report: the analysis fields, the full spectrum, and the TV-decay
/// table. Shapes are stable so downstream tooling can diff runs.
inline nlohmann::json chain_report_json(const ChainAnalysis& a,
                                        const std::vector<TvDecayEntry>& tv) {
    nlohmann::json j;
    if (a.m.fits_slong_p())
        j["m"] = a.m.get_si();
    else
        j["m"] = a.m.get_str();
    j["size_H"] = a.size_H;
    j["size_H_tilde"] = a.size_H_tilde;
    j["period"] = a.period;
    j["k"] = a.k;
    j["beta1"] = a.beta1;
    j["beta_min"] = a.beta_min;
    j["beta_star"] = a.beta_star;
    j["bound"] = a.bound;
    j["eigenvalues"] = a.eigenvalues;
    nlohmann::json rows = nlohmann::json::array();
    for (const TvDecayEntry& e : tv) {
        rows.push_back({{"nu", e.nu}, {"tv", e.tv}, {"bound", e.bound}});
    }
    j["tv_decay"] = rows;
    return j;
}

} // namespace wp
