#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wp/bigint.hpp"
#include "wp/error.hpp"
#include "wp/exact_matrix.hpp"
#include "wp/rng.hpp"

namespace wp {

/// A word over the symmetrized alphabet, stored as letter indices.
/// Letter i in [0, k) is the i-th generator; letter k+i is its inverse.
struct Word {
    std::vector<std::uint32_t> letters;

    Word() = default;
    explicit Word(std::vector<std::uint32_t> l) : letters(std::move(l)) {}

    std::size_t size() const { return letters.size(); }
    bool empty() const { return letters.empty(); }
};

/// A validated generator system: the matrices of the alphabet, their
/// inverses (computed at load, never user-supplied), and the bit-length
/// bound L over the symmetrized alphabet.
///
/// Validation enforces the alphabet convention: no identity generator, no
/// duplicates, and no mutually inverse pair inside the generator list (an
/// involution counts as its own inverse). Violations are rejected, never
/// silently repaired.
class GeneratorSystem {
public:
    GeneratorSystem(std::vector<ExactMatrix> sigma, std::vector<std::string> names = {})
        : sigma_(std::move(sigma)), names_(std::move(names)) {
        if (sigma_.empty())
            throw ConventionViolationError("generator system: at least one generator required");
        dim_ = sigma_[0].dim();
        for (const ExactMatrix& g : sigma_) {
            if (g.dim() != dim_)
                throw FormatError("generator system: generators must share one dimension");
        }
        if (!names_.empty() && names_.size() != sigma_.size())
            throw FormatError("generator system: names list must match generator count");

        sigma_inv_.reserve(sigma_.size());
        for (const ExactMatrix& g : sigma_) {
            if (is_identity(g))
                throw ConventionViolationError("generator system: identity matrix is not allowed");
            sigma_inv_.push_back(mat_inverse_unimodular(g)); // throws NotUnimodular if det != +-1
        }

        // Pairwise distinctness over the symmetrized alphabet. This covers
        // duplicate generators, (A, A^-1) pairs across the list, and
        // involutions A = A^-1 in one check.
        const std::size_t two_k = 2 * sigma_.size();
        for (std::size_t i = 0; i < two_k; ++i) {
            for (std::size_t j = i + 1; j < two_k; ++j) {
                if (letter_matrix(i) == letter_matrix(j))
                    throw ConventionViolationError(
                        "generator system: the symmetrized alphabet must be pairwise distinct");
            }
        }

        bit_bound_ = 0;
        for (std::size_t i = 0; i < two_k; ++i) {
            std::size_t l = max_entry_bit_length(letter_matrix(i));
            if (l > bit_bound_) bit_bound_ = l;
        }
    }

    std::size_t dim() const { return dim_; }
    std::size_t generator_count() const { return sigma_.size(); }       // k
    std::size_t alphabet_size() const { return 2 * sigma_.size(); }     // |sigma tilde|
    std::size_t entry_bit_bound() const { return bit_bound_; }          // L

    const std::vector<ExactMatrix>& generators() const { return sigma_; }
    const std::vector<ExactMatrix>& inverses() const { return sigma_inv_; }
    const std::vector<std::string>& names() const { return names_; }

    /// Matrix for a letter index: generators first, then inverses.
    const ExactMatrix& letter_matrix(std::size_t letter) const {
        const std::size_t k = sigma_.size();
        if (letter < k) return sigma_[letter];
        if (letter < 2 * k) return sigma_inv_[letter - k];
        throw Error("letter_matrix: letter " + std::to_string(letter) + " out of range [0, " +
                    std::to_string(2 * k) + ")");
    }

private:
    std::vector<ExactMatrix> sigma_;
    std::vector<ExactMatrix> sigma_inv_;
    std::vector<std::string> names_;
    std::size_t dim_ = 0;
    std::size_t bit_bound_ = 0;
};

inline const ExactMatrix& letter_matrix(const GeneratorSystem& sys, std::size_t letter) {
    return sys.letter_matrix(letter);
}

/// Parse the generator file format:
///   {"d": <int>, "generators": [<d x d integer arrays>], "names": [<str>]?}
/// Entries must be exact JSON integers; floating values are rejected.
inline GeneratorSystem load_generator_system(const std::string& doc) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(doc);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("generator file: ") + e.what());
    }
    if (!j.is_object() || !j.contains("d") || !j.contains("generators"))
        throw FormatError("generator file: expected object with \"d\" and \"generators\"");
    if (!j["d"].is_number_integer())
        throw FormatError("generator file: \"d\" must be an integer");
    const long d = j["d"].get<long>();
    if (d < 1) throw FormatError("generator file: \"d\" must be positive");
    if (!j["generators"].is_array() || j["generators"].empty())
        throw FormatError("generator file: \"generators\" must be a non-empty array");

    std::vector<ExactMatrix> sigma;
    for (const auto& gj : j["generators"]) {
        if (!gj.is_array() || gj.size() != static_cast<std::size_t>(d))
            throw FormatError("generator file: each generator must be a d x d array");
        ExactMatrix g(static_cast<std::size_t>(d));
        for (std::size_t r = 0; r < static_cast<std::size_t>(d); ++r) {
            const auto& row = gj[r];
            if (!row.is_array() || row.size() != static_cast<std::size_t>(d))
                throw FormatError("generator file: each generator must be a d x d array");
            for (std::size_t c = 0; c < static_cast<std::size_t>(d); ++c) {
                if (!row[c].is_number_integer())
                    throw FormatError("generator file: entries must be exact integers");
                g.at(r, c) = Int(row[c].get<long>());
            }
        }
        sigma.push_back(std::move(g));
    }

    std::vector<std::string> names;
    if (j.contains("names")) {
        if (!j["names"].is_array())
            throw FormatError("generator file: \"names\" must be an array of strings");
        for (const auto& nj : j["names"]) {
            if (!nj.is_string())
                throw FormatError("generator file: \"names\" must be an array of strings");
            names.push_back(nj.get<std::string>());
        }
    }
    return GeneratorSystem(std::move(sigma), std::move(names));
}

/// n letters drawn independently and uniformly from the symmetrized
/// alphabet. Identical seeds yield identical words.
inline Word sample_uniform_word(const GeneratorSystem& sys, std::size_t n, SeededRng& rng) {
    const std::uint64_t two_k = sys.alphabet_size();
    Word w;
    w.letters.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        w.letters.push_back(static_cast<std::uint32_t>(rng.uniform_below(two_k)));
    return w;
}

/// Parse whitespace-separated signed 1-based indices: "i" or "+i" is the
/// i-th generator, "-i" its inverse.
inline Word parse_word(const GeneratorSystem& sys, const std::string& text) {
    const long k = static_cast<long>(sys.generator_count());
    Word w;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        errno = 0;
        char* end = nullptr;
        const long v = std::strtol(tok.c_str(), &end, 10);
        if (errno != 0 || end == tok.c_str() || *end != '\0')
            throw ParseError("parse_word: not an integer token: \"" + tok + "\"");
        if (v == 0)
            throw ParseError("parse_word: index 0 is not a letter");
        if (v > k || v < -k)
            throw ParseError("parse_word: index " + tok + " out of range for k = " +
                             std::to_string(k));
        w.letters.push_back(static_cast<std::uint32_t>(v > 0 ? v - 1 : k + (-v) - 1));
    }
    return w;
}

} // namespace wp
