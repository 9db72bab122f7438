#pragma once

// Monomials over a SymbolTable, block-lexicographic orders, vdc signatures
// and aggregate units of measure.
//
// Exponents are held densely (tables are small); the canonical invariant is
// observational: exponent 0 for absent symbols, equality is exponent-map
// equality, and serialization never emits zero powers.

#include "syntheory/symbols.hpp"

#include <algorithm>
#include <compare>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace syntheory {

class Monomial {
public:
    Monomial() = default;
    explicit Monomial(std::size_t num_symbols) : exps_(num_symbols, 0) {}

    static Monomial unit(std::size_t num_symbols) { return Monomial(num_symbols); }

    static Monomial of(std::size_t num_symbols, std::initializer_list<std::pair<SymbolId, int>> powers) {
        Monomial m(num_symbols);
        for (auto [id, e] : powers) m.set_exponent(id, e);
        return m;
    }

    std::size_t num_symbols() const { return exps_.size(); }

    int exponent(SymbolId id) const { return id < exps_.size() ? exps_[id] : 0; }

    void set_exponent(SymbolId id, int e) {
        if (e < 0) throw std::invalid_argument("negative monomial exponent");
        exps_.at(id) = e;
    }

    bool is_unit() const {
        return std::all_of(exps_.begin(), exps_.end(), [](int e) { return e == 0; });
    }

    int total_degree() const { return std::accumulate(exps_.begin(), exps_.end(), 0); }

    /// Number of distinct factors (symbols with positive exponent).
    int num_factors() const {
        return static_cast<int>(std::count_if(exps_.begin(), exps_.end(), [](int e) { return e > 0; }));
    }

    std::vector<SymbolId> support() const {
        std::vector<SymbolId> out;
        for (SymbolId i = 0; i < exps_.size(); ++i)
            if (exps_[i] > 0) out.push_back(i);
        return out;
    }

    friend Monomial operator*(const Monomial& a, const Monomial& b) {
        Monomial out(a.matched_size(b));
        for (std::size_t i = 0; i < out.exps_.size(); ++i) out.exps_[i] = a.exponent(i) + b.exponent(i);
        return out;
    }

    bool divides(const Monomial& other) const {
        for (std::size_t i = 0; i < std::max(exps_.size(), other.exps_.size()); ++i)
            if (exponent(static_cast<SymbolId>(i)) > other.exponent(static_cast<SymbolId>(i))) return false;
        return true;
    }

    /// other / this; caller guarantees divisibility.
    Monomial divide_into(const Monomial& other) const {
        Monomial out(matched_size(other));
        for (std::size_t i = 0; i < out.exps_.size(); ++i) {
            int e = other.exponent(static_cast<SymbolId>(i)) - exponent(static_cast<SymbolId>(i));
            if (e < 0) throw std::invalid_argument("monomial division underflow");
            out.exps_[i] = e;
        }
        return out;
    }

    friend Monomial lcm(const Monomial& a, const Monomial& b) {
        Monomial out(a.matched_size(b));
        for (std::size_t i = 0; i < out.exps_.size(); ++i)
            out.exps_[i] = std::max(a.exponent(static_cast<SymbolId>(i)), b.exponent(static_cast<SymbolId>(i)));
        return out;
    }

    friend Monomial gcd(const Monomial& a, const Monomial& b) {
        Monomial out(a.matched_size(b));
        for (std::size_t i = 0; i < out.exps_.size(); ++i)
            out.exps_[i] = std::min(a.exponent(static_cast<SymbolId>(i)), b.exponent(static_cast<SymbolId>(i)));
        return out;
    }

    bool operator==(const Monomial& other) const {
        for (std::size_t i = 0; i < std::max(exps_.size(), other.exps_.size()); ++i)
            if (exponent(static_cast<SymbolId>(i)) != other.exponent(static_cast<SymbolId>(i))) return false;
        return true;
    }

    std::size_t hash() const {
        std::size_t h = 1469598103934665603ull;
        for (int e : exps_) {
            h ^= static_cast<std::size_t>(e);
            h *= 1099511628211ull;
        }
        return h;
    }

    std::string str(const SymbolTable& table) const {
        if (is_unit()) return "1";
        std::ostringstream out;
        bool first = true;
        for (SymbolId i = 0; i < exps_.size(); ++i) {
            if (exps_[i] == 0) continue;
            if (!first) out << "*";
            out << table.info(i).name;
            if (exps_[i] != 1) out << "^" << exps_[i];
            first = false;
        }
        return out.str();
    }

private:
    std::size_t matched_size(const Monomial& other) const { return std::max(exps_.size(), other.exps_.size()); }

    std::vector<int> exps_;
};

/// Pure lexicographic order along a permutation of the symbol table. The
/// first entries of the permutation are the greatest (first-compared)
/// indeterminates. With the non-measured block placed first, every basis
/// polynomial whose leading monomial avoids that block lies in the
/// elimination ideal of the measured sub-ring.
class BlockLexOrder {
public:
    /// Canonical order: symbol 0 greatest.
    static BlockLexOrder canonical(std::size_t num_symbols) {
        std::vector<SymbolId> perm(num_symbols);
        for (std::size_t i = 0; i < num_symbols; ++i) perm[i] = static_cast<SymbolId>(i);
        return BlockLexOrder(std::move(perm));
    }

    /// Elimination order for a measured subset: non-measured symbols first
    /// (greatest), measured last; table order within each block.
    static BlockLexOrder eliminating(std::size_t num_symbols, const std::vector<bool>& measured) {
        std::vector<SymbolId> perm;
        perm.reserve(num_symbols);
        for (std::size_t i = 0; i < num_symbols; ++i)
            if (!measured[i]) perm.push_back(static_cast<SymbolId>(i));
        for (std::size_t i = 0; i < num_symbols; ++i)
            if (measured[i]) perm.push_back(static_cast<SymbolId>(i));
        return BlockLexOrder(std::move(perm));
    }

    explicit BlockLexOrder(std::vector<SymbolId> perm) : perm_(std::move(perm)) {
        rank_.assign(perm_.size(), 0);
        std::vector<bool> seen(perm_.size(), false);
        for (std::size_t r = 0; r < perm_.size(); ++r) {
            SymbolId s = perm_[r];
            if (s >= perm_.size() || seen[s]) throw std::invalid_argument("order is not a permutation");
            seen[s] = true;
            rank_[s] = static_cast<SymbolId>(r);
        }
    }

    std::size_t num_symbols() const { return perm_.size(); }
    const std::vector<SymbolId>& permutation() const { return perm_; }

    std::strong_ordering compare(const Monomial& a, const Monomial& b) const {
        for (SymbolId s : perm_) {
            int ea = a.exponent(s), eb = b.exponent(s);
            if (ea != eb) return ea < eb ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        return std::strong_ordering::equal;
    }

    bool less(const Monomial& a, const Monomial& b) const { return compare(a, b) == std::strong_ordering::less; }
    bool greater(const Monomial& a, const Monomial& b) const { return compare(a, b) == std::strong_ordering::greater; }

    bool operator==(const BlockLexOrder& other) const { return perm_ == other.perm_; }

private:
    std::vector<SymbolId> perm_;
    std::vector<SymbolId> rank_;
};

/// Dot-separated sorted power multisets for the variable / derivative /
/// constant factors of a monomial; theta auxiliaries count as variables.
inline std::string vdc_signature(const Monomial& m, const SymbolTable& table) {
    std::vector<int> var_pows, deriv_pows, const_pows;
    for (SymbolId i = 0; i < table.size(); ++i) {
        int e = m.exponent(i);
        if (e == 0) continue;
        switch (table.info(i).kind) {
            case SymbolKind::Variable:
            case SymbolKind::ThetaAux: var_pows.push_back(e); break;
            case SymbolKind::Derivatif: deriv_pows.push_back(e); break;
            default: const_pows.push_back(e); break;
        }
    }
    auto segment = [](std::vector<int>& v) {
        std::sort(v.begin(), v.end());
        std::string s;
        for (int e : v) s += std::to_string(e);
        return s;
    };
    return segment(var_pows) + "." + segment(deriv_pows) + "." + segment(const_pows);
}

/// Aggregate unit of measure of a monomial.
inline Dimension dim_of_monomial(const Monomial& m, const SymbolTable& table) {
    Dimension out;
    for (SymbolId i = 0; i < table.size(); ++i) {
        int e = m.exponent(i);
        if (e != 0) out = dim_mul(out, dim_pow(table.info(i).unit, e));
    }
    return out;
}

/// True iff the componentwise-min exponent vector over all monomials is
/// nonzero somewhere (i.e. a common factor divides every one of them).
inline bool has_common_factor(const std::vector<Monomial>& monomials) {
    if (monomials.empty()) throw std::invalid_argument("has_common_factor: empty list");
    Monomial common = monomials.front();
    for (std::size_t i = 1; i < monomials.size(); ++i) common = gcd(common, monomials[i]);
    return !common.is_unit();
}

}  // namespace syntheory
