#pragma once

// Buchberger engine: S-polynomials, multivariate division, reduced Groebner
// bases under a BlockLexOrder, elimination ideals and consistency checks.
//
// Pair selection uses the normal strategy (smallest lcm under the ambient
// order) with the product and chain criteria for pruning. The output basis
// is fully auto-reduced, monic over the rationals, and sorted ascending by
// leading monomial then term count, so "the first polynomial in the basis"
// is deterministic. A step budget aborts pathological instances; callers
// treat that as a resample signal.

#include "syntheory/polynomial.hpp"

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

namespace syntheory {

struct OrderMismatch : std::runtime_error {
    OrderMismatch() : std::runtime_error("Groebner basis order mismatch") {}
};

struct OrderInconsistentWithMeasuredSet : std::runtime_error {
    OrderInconsistentWithMeasuredSet()
        : std::runtime_error("elimination order does not place the measured block last") {}
};

struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct GroebnerOptions {
    std::uint64_t step_budget = 1'000'000;   // lead-cancellation steps
    std::uint64_t work_budget = 20'000'000;  // term-merge operations across all steps
    std::size_t term_guard = 100'000;        // max terms of any intermediate polynomial
};

namespace gbdetail {

struct Budget {
    std::uint64_t remaining;
    std::uint64_t work_remaining;
    std::size_t term_guard;

    void spend(std::size_t work) {
        if (remaining == 0) throw BudgetExceeded("Groebner reduction step budget exhausted");
        --remaining;
        if (work_remaining < work) throw BudgetExceeded("Groebner reduction work budget exhausted");
        work_remaining -= work;
    }
    void guard(std::size_t terms) const {
        if (terms > term_guard) throw BudgetExceeded("Groebner intermediate polynomial too large");
    }
};

// Term vectors sorted descending under an explicit order.
using OrdTerms = std::vector<Term>;

inline OrdTerms to_ordered(const Polynomial& p, const BlockLexOrder& order) {
    OrdTerms t = p.terms();
    std::sort(t.begin(), t.end(), [&](const Term& a, const Term& b) { return order.greater(a.mono, b.mono); });
    return t;
}

inline Polynomial from_ordered(const SymbolTable& table, const OrdTerms& t) {
    return Polynomial(table, t);
}

/// f + c * (m * g), both inputs sorted; merge keeps the invariant.
inline OrdTerms add_scaled(const OrdTerms& f, const Rational& c, const Monomial& m, const OrdTerms& g,
                           const BlockLexOrder& order) {
    OrdTerms out;
    out.reserve(f.size() + g.size());
    std::size_t i = 0, j = 0;
    while (i < f.size() || j < g.size()) {
        if (j == g.size()) {
            out.push_back(f[i++]);
            continue;
        }
        Monomial gm = g[j].mono * m;
        if (i == f.size()) {
            out.push_back({c * g[j].coeff, std::move(gm)});
            ++j;
            continue;
        }
        auto cmp = order.compare(f[i].mono, gm);
        if (cmp == std::strong_ordering::greater) {
            out.push_back(f[i++]);
        } else if (cmp == std::strong_ordering::less) {
            out.push_back({c * g[j].coeff, std::move(gm)});
            ++j;
        } else {
            Rational sum = f[i].coeff + c * g[j].coeff;
            if (sum != 0) out.push_back({std::move(sum), f[i].mono});
            ++i;
            ++j;
        }
    }
    return out;
}

/// gcd of numerators over lcm of denominators; positive.
inline Rational rational_content(const OrdTerms& t) {
    BigInt n = 0, d = 1;
    for (const auto& term : t) {
        n = gcd(n, num(term.coeff));
        d = lcm(d, den(term.coeff));
    }
    if (n == 0) return 1;
    if (n < 0) n = -n;
    return Rational(n, d);
}

/// Full multivariate division remainder of p by the (nonzero, ordered)
/// divisor set. The remainder's scale is exact.
inline OrdTerms reduce_full(OrdTerms f, const std::vector<OrdTerms>& divisors, const BlockLexOrder& order,
                            Budget& budget) {
    OrdTerms remainder;
    Rational scale = 1;
    int steps_since_rescale = 0;
    while (!f.empty()) {
        budget.guard(f.size());
        bool reduced = false;
        for (const auto& g : divisors) {
            if (g.empty()) continue;
            if (g.front().mono.divides(f.front().mono)) {
                budget.spend(f.size() + g.size());
                Rational c = -f.front().coeff / g.front().coeff;
                Monomial m = g.front().mono.divide_into(f.front().mono);
                f = add_scaled(f, c, m, g, order);
                reduced = true;
                if (++steps_since_rescale >= 32) {
                    steps_since_rescale = 0;
                    OrdTerms joint = f;
                    joint.insert(joint.end(), remainder.begin(), remainder.end());
                    Rational content = rational_content(joint);
                    if (content != 1 && content != 0) {
                        Rational inv = 1 / content;
                        for (auto& t : f) t.coeff *= inv;
                        for (auto& t : remainder) t.coeff *= inv;
                        scale *= content;
                    }
                }
                break;
            }
        }
        if (!reduced) {
            remainder.push_back(f.front());
            f.erase(f.begin());
        }
    }
    if (scale != 1)
        for (auto& t : remainder) t.coeff *= scale;
    return remainder;
}

inline OrdTerms make_primitive(OrdTerms t) {
    if (t.empty()) return t;
    Rational c = rational_content(t);
    if (t.front().coeff < 0) c = -c;
    Rational inv = 1 / c;
    for (auto& term : t) term.coeff *= inv;
    return t;
}

inline OrdTerms s_poly(const OrdTerms& f, const OrdTerms& g, const BlockLexOrder& order) {
    const Monomial L = lcm(f.front().mono, g.front().mono);
    OrdTerms lhs;
    {
        Rational c = 1 / f.front().coeff;
        Monomial m = f.front().mono.divide_into(L);
        lhs.reserve(f.size());
        for (const auto& t : f) lhs.push_back({t.coeff * c, t.mono * m});
    }
    return add_scaled(lhs, Rational(-1) / g.front().coeff, g.front().mono.divide_into(L), g, order);
}

}  // namespace gbdetail

class GroebnerBasis {
public:
    GroebnerBasis(const SymbolTable& table, std::vector<Polynomial> generators, BlockLexOrder order)
        : table_(&table), generators_(std::move(generators)), order_(std::move(order)) {}

    const SymbolTable& table() const { return *table_; }
    const std::vector<Polynomial>& generators() const { return generators_; }
    const BlockLexOrder& order() const { return order_; }

    /// False iff the basis is {1} (the ideal is the whole ring).
    bool is_consistent() const {
        return !(generators_.size() == 1 && generators_.front().num_terms() == 1 &&
                 generators_.front().leading_term().mono.is_unit());
    }

private:
    const SymbolTable* table_;
    std::vector<Polynomial> generators_;
    BlockLexOrder order_;
};

inline Polynomial s_polynomial(const Polynomial& f, const Polynomial& g, const BlockLexOrder& order) {
    if (!f.same_context(g)) throw ContextMismatch();
    if (f.is_zero() || g.is_zero()) throw std::invalid_argument("s_polynomial of zero polynomial");
    auto fo = gbdetail::to_ordered(f, order);
    auto go = gbdetail::to_ordered(g, order);
    return gbdetail::from_ordered(f.table(), gbdetail::s_poly(fo, go, order));
}

/// Multivariate division remainder; zero iff p is in the ideal when the
/// divisor set is a Groebner basis under the same order.
inline Polynomial normal_form(const Polynomial& p, const GroebnerBasis& basis, GroebnerOptions opts = {}) {
    if (&p.table() != &basis.table()) throw ContextMismatch();
    const auto& order = basis.order();
    if (order.num_symbols() != p.table().size()) throw OrderMismatch();
    std::vector<gbdetail::OrdTerms> divisors;
    divisors.reserve(basis.generators().size());
    for (const auto& g : basis.generators()) divisors.push_back(gbdetail::to_ordered(g, order));
    gbdetail::Budget budget{opts.step_budget, opts.work_budget, opts.term_guard};
    auto r = gbdetail::reduce_full(gbdetail::to_ordered(p, order), divisors, order, budget);
    return gbdetail::from_ordered(p.table(), r);
}

/// Reduced Groebner basis of the ideal generated by `gens`.
inline GroebnerBasis buchberger(const std::vector<Polynomial>& gens, const BlockLexOrder& order,
                                GroebnerOptions opts = {}) {
    using namespace gbdetail;
    if (gens.empty()) throw std::invalid_argument("buchberger: empty generating set");
    const SymbolTable& table = gens.front().table();
    if (order.num_symbols() != table.size()) throw OrderMismatch();

    Budget budget{opts.step_budget, opts.work_budget, opts.term_guard};

    std::vector<OrdTerms> basis;
    for (const auto& g : gens) {
        if (g.is_zero()) throw std::invalid_argument("buchberger: zero generator");
        if (!g.same_context(gens.front())) throw ContextMismatch();
        basis.push_back(make_primitive(to_ordered(g, order)));
    }

    auto trivial_basis = [&]() {
        std::vector<Polynomial> one{Polynomial::constant(table, 1)};
        return GroebnerBasis(table, std::move(one), order);
    };
    for (const auto& g : basis)
        if (g.front().mono.is_unit()) return trivial_basis();

    struct Pair {
        std::size_t i, j;
        Monomial lcm_mono;
    };
    std::vector<Pair> pending;
    std::set<std::pair<std::size_t, std::size_t>> treated;
    auto push_pairs_for = [&](std::size_t k) {
        for (std::size_t i = 0; i < k; ++i)
            pending.push_back({i, k, lcm(basis[i].front().mono, basis[k].front().mono)});
    };
    for (std::size_t k = 1; k < basis.size(); ++k) push_pairs_for(k);

    while (!pending.empty()) {
        // normal strategy: smallest lcm; ties by total degree then indices
        std::size_t best = 0;
        for (std::size_t p = 1; p < pending.size(); ++p) {
            auto cmp = order.compare(pending[p].lcm_mono, pending[best].lcm_mono);
            if (cmp == std::strong_ordering::less ||
                (cmp == std::strong_ordering::equal &&
                 std::tie(pending[p].i, pending[p].j) < std::tie(pending[best].i, pending[best].j)))
                best = p;
        }
        Pair pair = pending[best];
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));
        treated.insert({pair.i, pair.j});

        const Monomial& lmi = basis[pair.i].front().mono;
        const Monomial& lmj = basis[pair.j].front().mono;
        if (gcd(lmi, lmj).is_unit()) continue;  // product criterion
        bool chained = false;
        for (std::size_t k = 0; k < basis.size() && !chained; ++k) {
            if (k == pair.i || k == pair.j) continue;
            if (!basis[k].front().mono.divides(pair.lcm_mono)) continue;
            auto key = [&](std::size_t a, std::size_t b) {
                return std::make_pair(std::min(a, b), std::max(a, b));
            };
            if (treated.count(key(pair.i, k)) && treated.count(key(pair.j, k))) chained = true;
        }
        if (chained) continue;

        OrdTerms s = s_poly(basis[pair.i], basis[pair.j], order);
        OrdTerms r = reduce_full(std::move(s), basis, order, budget);
        if (r.empty()) continue;
        if (r.front().mono.is_unit()) return trivial_basis();
        basis.push_back(make_primitive(std::move(r)));
        push_pairs_for(basis.size() - 1);
    }

    // minimalize: drop generators whose lead is divisible by another lead
    std::vector<bool> keep(basis.size(), true);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (!keep[i]) continue;
        for (std::size_t j = 0; j < basis.size(); ++j) {
            if (i == j || !keep[j]) continue;
            if (basis[j].front().mono.divides(basis[i].front().mono) &&
                !(i < j && basis[i].front().mono == basis[j].front().mono)) {
                keep[i] = false;
                break;
            }
        }
    }
    std::vector<OrdTerms> minimal;
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (keep[i]) minimal.push_back(std::move(basis[i]));

    // inter-reduce tails
    std::vector<OrdTerms> reduced;
    for (std::size_t i = 0; i < minimal.size(); ++i) {
        std::vector<OrdTerms> others;
        for (std::size_t j = 0; j < minimal.size(); ++j)
            if (j != i) others.push_back(minimal[j]);
        for (const auto& r : reduced) others.push_back(r);
        OrdTerms r = reduce_full(minimal[i], others, order, budget);
        if (!r.empty()) reduced.push_back(make_primitive(std::move(r)));
    }

    // monic over the rationals, deterministic sort
    std::vector<Polynomial> out;
    out.reserve(reduced.size());
    for (auto& g : reduced) {
        Rational inv = 1 / g.front().coeff;
        for (auto& t : g) t.coeff *= inv;
        out.push_back(from_ordered(table, g));
    }
    std::sort(out.begin(), out.end(), [&](const Polynomial& a, const Polynomial& b) {
        auto ao = to_ordered(a, order), bo = to_ordered(b, order);
        auto cmp = order.compare(ao.front().mono, bo.front().mono);
        if (cmp != std::strong_ordering::equal) return cmp == std::strong_ordering::less;
        return a.num_terms() < b.num_terms();
    });
    return GroebnerBasis(table, std::move(out), order);
}

/// Generators of the elimination ideal: the basis elements supported
/// entirely inside the measured set, in basis order.
inline std::vector<Polynomial> eliminate(const GroebnerBasis& basis, const std::set<SymbolId>& measured) {
    const auto& perm = basis.order().permutation();
    bool in_measured_block = false;
    for (SymbolId s : perm) {
        bool m = measured.count(s) > 0;
        if (m) in_measured_block = true;
        if (!m && in_measured_block) throw OrderInconsistentWithMeasuredSet();
    }
    std::vector<Polynomial> out;
    for (const auto& g : basis.generators()) {
        auto support = g.support();
        bool inside = std::all_of(support.begin(), support.end(),
                                  [&](SymbolId s) { return measured.count(s) > 0; });
        if (inside) out.push_back(g);
    }
    return out;
}

inline bool is_consistent(const GroebnerBasis& basis) { return basis.is_consistent(); }

}  // namespace syntheory
