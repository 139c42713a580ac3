#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "wp/bigint.hpp"
#include "wp/error.hpp"
#include "wp/exact_matrix.hpp"
#include "wp/mod_matrix.hpp"
#include "wp/sieve.hpp"
#include "wp/words.hpp"

namespace wp {

namespace detail {

constexpr unsigned kLogFracBits = 128;

/// log2(n) in fixed point with 128 fractional bits, n >= 2. The integer
/// part is exact; the fraction is extracted by repeated squaring and is a
/// truncation (error below 2^-120), far beyond the 80 bits of precision the
/// modulus schedule requires. Pure integer arithmetic, so every build
/// produces the same value.
inline Int log2_fixed(std::uint64_t n) {
    unsigned e = 63;
    while (!((n >> e) & 1)) --e; // n >= 2, so e >= 1
    Int y = Int(static_cast<unsigned long>(n)) << kLogFracBits >> e; // in [1,2) scaled
    const Int two = Int(1) << (kLogFracBits + 1);
    Int frac = 0;
    for (unsigned b = 0; b < kLogFracBits; ++b) {
        y = (y * y) >> kLogFracBits;
        frac <<= 1;
        if (y >= two) {
            y >>= 1;
            frac |= 1;
        }
    }
    return (Int(e) << kLogFracBits) | frac;
}

/// floor((log2 n)^power) for n >= 2. Exact when n is a power of two; the
/// fixed-point route cannot misplace the floor otherwise because the
/// threshold is then irrational and the error is below 2^-90.
inline std::uint64_t log2_power_floor(std::uint64_t n, unsigned power) {
    if ((n & (n - 1)) == 0) {
        std::uint64_t j = 0;
        while ((n >> j) != 1) ++j;
        std::uint64_t r = 1;
        for (unsigned i = 0; i < power; ++i) r *= j;
        return r;
    }
    Int t = log2_fixed(n);
    Int acc = t;
    for (unsigned i = 1; i < power; ++i) acc *= t;
    acc >>= kLogFracBits * power;
    return acc.get_ui();
}

/// ceil(2 * (log2 n)^2) for n >= 2, same precision discipline.
inline std::uint64_t order_threshold(std::uint64_t n) {
    if ((n & (n - 1)) == 0) {
        std::uint64_t j = 0;
        while ((n >> j) != 1) ++j;
        return 2 * j * j;
    }
    Int t = log2_fixed(n);
    Int acc = (t * t) << 1;
    const Int scale = Int(1) << (2 * kLogFracBits);
    Int c = (acc + scale - 1) >> (2 * kLogFracBits);
    return c.get_ui();
}

/// Product of the elements of primes[lo, hi) as a balanced tree.
inline Int balanced_product(const std::vector<std::uint64_t>& primes, std::size_t lo,
                            std::size_t hi) {
    if (lo >= hi) return 1;
    if (hi - lo == 1) return Int(static_cast<unsigned long>(primes[lo]));
    const std::size_t mid = lo + (hi - lo) / 2;
    return balanced_product(primes, lo, mid) * balanced_product(primes, mid, hi);
}

} // namespace detail

/// The modulus schedule: q(n) is the product of all primes up to
/// (log2 n)^5, with q(0) = q(1) = 1. Squarefree by construction.
struct QModulus {
    std::size_t n = 0;
    std::vector<std::uint64_t> primes; // ascending
    Int value = 1;                     // product of primes; empty product = 1
};

inline QModulus compute_q(std::size_t n) {
    QModulus q;
    q.n = n;
    if (n <= 1) return q;
    const std::uint64_t limit = detail::log2_power_floor(n, 5);
    q.primes = primes_up_to(limit);
    q.value = detail::balanced_product(q.primes, 0, q.primes.size());
    return q;
}

/// Memoized q(n); the schedule depends only on n and is immutable once
/// computed, so callers share one instance per length.
inline const QModulus& cached_q(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, QModulus> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_q(n)).first;
    return it->second;
}

namespace detail {

/// Balanced product over letters[0, n) with the same splits as the
/// divide-and-conquer recursion (prefix of length floor(n/2)), driven by an
/// explicit work stack so the evaluation depth is a handful of frames
/// regardless of n.
template <typename Elem, typename LeafFn, typename MulFn>
Elem dc_fold(std::size_t n, const Elem& identity_value, LeafFn&& leaf, MulFn&& mul) {
    if (n == 0) return identity_value;
    struct Range {
        std::size_t lo, hi; // hi == lo marks a pending combine
    };
    std::vector<Range> todo;
    std::vector<Elem> vals;
    todo.push_back({0, n});
    while (!todo.empty()) {
        const Range r = todo.back();
        todo.pop_back();
        if (r.lo == r.hi) { // combine: right result is on top
            Elem rhs = std::move(vals.back());
            vals.pop_back();
            Elem lhs = std::move(vals.back());
            vals.pop_back();
            vals.push_back(mul(lhs, rhs));
        } else if (r.hi - r.lo == 1) {
            vals.push_back(leaf(r.lo));
        } else {
            const std::size_t mid = r.lo + (r.hi - r.lo) / 2;
            todo.push_back({0, 0});
            todo.push_back({mid, r.hi});
            todo.push_back({r.lo, mid});
        }
    }
    return std::move(vals.back());
}

} // namespace detail

/// M(w) by n-1 left-to-right multiplications; the reference evaluator.
inline ExactMatrix evaluate_naive(const GeneratorSystem& sys, const Word& w) {
    ExactMatrix acc = ExactMatrix::identity(sys.dim());
    for (std::uint32_t letter : w.letters) acc = mat_mul(acc, sys.letter_matrix(letter));
    return acc;
}

/// M(w) by divide and conquer, splitting at floor(n/2). Exactly equal to
/// evaluate_naive; only the multiplication tree differs.
inline ExactMatrix evaluate_dc(const GeneratorSystem& sys, const Word& w) {
    return detail::dc_fold<ExactMatrix>(
        w.size(), ExactMatrix::identity(sys.dim()),
        [&](std::size_t i) { return sys.letter_matrix(w.letters[i]); },
        [](const ExactMatrix& a, const ExactMatrix& b) { return mat_mul(a, b); });
}

namespace detail {

/// Working representation for the modular divide and conquer: entries kept
/// as signed integers centered in (-m/2, m/2]. Reduction of an entry is
/// skipped while it is provably below m/2 in magnitude, so small operands
/// never get inflated to the size of the modulus; results are identical to
/// canonical [0, m) arithmetic and are canonicalized on return.
struct CenteredMat {
    std::size_t dim;
    std::vector<Int> e;
};

inline void center_entry(Int& x, const Int& m) {
    mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t()); // into [0, m)
    Int twice = x << 1;
    if (twice > m) x -= m;
}

inline void center_reduce_lazy(Int& x, const Int& m, std::size_t m_bits) {
    if (sgn(x) == 0) return;
    if (mpz_sizeinbase(x.get_mpz_t(), 2) + 1 < m_bits) return; // |x| < m/2 already
    center_entry(x, m);
}

inline CenteredMat centered_mul(const CenteredMat& a, const CenteredMat& b, const Int& m,
                                std::size_t m_bits) {
    const std::size_t d = a.dim;
    CenteredMat out{d, std::vector<Int>(d * d)};
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            Int& acc = out.e[i * d + j];
            for (std::size_t k = 0; k < d; ++k) {
                mpz_addmul(acc.get_mpz_t(), a.e[i * d + k].get_mpz_t(),
                           b.e[k * d + j].get_mpz_t());
            }
            center_reduce_lazy(acc, m, m_bits);
        }
    }
    return out;
}

} // namespace detail

/// M(w) mod m by divide and conquer with all arithmetic in Z/mZ; equals
/// mod_reduce(evaluate_dc(sys, w), m). The generators are reduced mod m
/// once up front.
inline ModMatrix evaluate_dc_mod(const GeneratorSystem& sys, const Word& w, const Int& m) {
    if (m < 2) throw Error("evaluate_dc_mod: modulus must be >= 2");
    const std::size_t d = sys.dim();
    const std::size_t m_bits = bit_count(m);

    std::vector<detail::CenteredMat> letters;
    letters.reserve(sys.alphabet_size());
    for (std::size_t a = 0; a < sys.alphabet_size(); ++a) {
        const ExactMatrix& g = sys.letter_matrix(a);
        detail::CenteredMat cm{d, g.entries()};
        for (Int& x : cm.e) detail::center_entry(x, m);
        letters.push_back(std::move(cm));
    }

    detail::CenteredMat id{d, std::vector<Int>(d * d)};
    for (std::size_t i = 0; i < d; ++i) id.e[i * d + i] = 1;

    detail::CenteredMat prod = detail::dc_fold<detail::CenteredMat>(
        w.size(), id, [&](std::size_t i) { return letters[w.letters[i]]; },
        [&](const detail::CenteredMat& a, const detail::CenteredMat& b) {
            return detail::centered_mul(a, b, m, m_bits);
        });

    ModMatrix out(d, m);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            mpz_fdiv_r(out.at(i, j).get_mpz_t(), prod.e[i * d + j].get_mpz_t(), m.get_mpz_t());
        }
    }
    return out;
}

/// Which stage of the two-stage decision procedure settled the answer.
enum class DecisionStage { modular, exact };

struct QuickWpResult {
    bool trivial = false;
    DecisionStage stage = DecisionStage::exact;
    std::size_t q_bits = 1; // binary digits of q(n)
};

/// Two-stage word problem decision: compute M(w) mod q(n) first; a
/// non-identity residue certifies a non-trivial word. Only words that pass
/// the modular filter (or lengths with q(n) = 1, where the filter carries
/// no information) fall through to the exact divide and conquer.
inline QuickWpResult quick_wp_detailed(const GeneratorSystem& sys, const Word& w) {
    const QModulus& q = cached_q(w.size());
    QuickWpResult r;
    r.q_bits = bit_count(q.value);
    if (q.value >= 2) {
        ModMatrix residue = evaluate_dc_mod(sys, w, q.value);
        if (!mod_is_identity(residue)) {
            r.trivial = false;
            r.stage = DecisionStage::modular;
            return r;
        }
    }
    r.trivial = is_identity(evaluate_dc(sys, w));
    r.stage = DecisionStage::exact;
    return r;
}

inline bool quick_wp(const GeneratorSystem& sys, const Word& w) {
    return quick_wp_detailed(sys, w).trivial;
}

enum class Triangularity { upper, lower, none };

/// "upper" iff every generator is upper-triangular (inverses then are too),
/// symmetrically "lower"; otherwise "none". Reporting only: the standard
/// divide and conquer is automatically linear in the triangular case.
inline Triangularity is_triangular_system(const GeneratorSystem& sys) {
    bool upper = true, lower = true;
    for (const ExactMatrix& g : sys.generators()) {
        const std::size_t d = g.dim();
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                if (sgn(g.at(i, j)) == 0) continue;
                if (i > j) upper = false;
                if (i < j) lower = false;
            }
        }
    }
    if (upper) return Triangularity::upper;
    if (lower) return Triangularity::lower;
    return Triangularity::none;
}

} // namespace wp
