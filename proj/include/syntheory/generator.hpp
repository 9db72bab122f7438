#pragma once

// Probabilistic synthesis of terms, equations (free and dimensionally
// consistent modes), whole axiom systems, and replacement axioms, driven by
// seeded randomness and frequency tables gleaned from a corpus of physics
// equations. Generation is a pure function of (config, table, seed).

#include "syntheory/groebner.hpp"
#include "syntheory/polynomial.hpp"
#include "syntheory/rng.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <vector>

namespace syntheory {

struct ExhaustedAttempts : std::runtime_error {
    explicit ExhaustedAttempts(const std::string& what) : std::runtime_error(what) {}
};

struct Inconsistent : std::runtime_error {
    Inconsistent() : std::runtime_error("generated system is inconsistent") {}
};

struct GeneratorConfig {
    int max_power = 3;
    int max_factors = 4;
    // probability that a term has 1, 2, ... factors; draws truncate to the
    // first max_factors entries and renormalize
    std::vector<double> prob_factors_per_term{0.246, 0.413, 0.225, 0.088, 0.025, 0.004};
    // probability that an equation has 1, 2, ... terms
    std::vector<double> prob_num_terms{0.0, 0.6, 0.29, 0.09, 0.03};
    // relative frequency of the small integer constants 1, 2, 3, 4
    std::vector<double> prob_small_constants{0.82, 0.07, 0.06, 0.05};
    // P(power = k) is proportional to bias^(k-1), k in [1, max_power]
    double same_factor_variable_bias = 0.3;
    double same_factor_derivative_bias = 0.1;
    double prob_all_positive = 0.05;
    bool dimensional_mode = true;
    std::uint64_t seed = 0;

    int vdc_samples = 10'000;
    std::uint64_t uom_enumeration_cap = 10'000'000;
    int equation_attempts = 1000;
    int system_attempts = 1000;
    int replacement_attempts = 2000;
    // generation-path basis computations give up early and resample; the
    // module-level defaults stay at GroebnerOptions{}
    GroebnerOptions groebner{.step_budget = 1'000'000, .work_budget = 4'000'000, .term_guard = 20'000};

    void validate() const {
        if (max_power < 1 || max_factors < 1) throw std::invalid_argument("max_power and max_factors must be >= 1");
        auto check_probs = [](const std::vector<double>& p, const char* name) {
            if (p.empty()) throw std::invalid_argument(std::string(name) + " must be nonempty");
            double sum = 0;
            for (double v : p) {
                if (v < 0) throw std::invalid_argument(std::string(name) + " has a negative entry");
                sum += v;
            }
            if (sum <= 0) throw std::invalid_argument(std::string(name) + " sums to zero");
        };
        check_probs(prob_factors_per_term, "prob_factors_per_term");
        check_probs(prob_num_terms, "prob_num_terms");
        check_probs(prob_small_constants, "prob_small_constants");
    }

    /// Digest of everything term/equation generation depends on; the
    /// dictionary cache key and the provenance config digest both use it.
    std::string generation_key() const {
        std::ostringstream out;
        out.precision(17);
        out << max_power << "|" << max_factors << "|";
        for (double v : prob_factors_per_term) out << v << ",";
        out << "|";
        for (double v : prob_num_terms) out << v << ",";
        out << "|";
        for (double v : prob_small_constants) out << v << ",";
        out << "|" << same_factor_variable_bias << "|" << same_factor_derivative_bias << "|"
            << prob_all_positive << "|" << dimensional_mode << "|" << vdc_samples;
        return out.str();
    }
};

// ---------------------------------------------------------------------------
// Dictionaries

/// Unit-of-measure to primitive-term lookup. A primitive term has unit
/// coefficient, 1..max_factors distinct factors with powers in
/// [1, max_power], and at most one distinct derivative factor.
struct UomTermDict {
    std::map<Dimension, std::vector<Monomial>> buckets;
    std::uint64_t enumeration_bound = 0;
    std::size_t total_terms = 0;

    const std::vector<Monomial>* bucket(const Dimension& d) const {
        auto it = buckets.find(d);
        return it == buckets.end() ? nullptr : &it->second;
    }
};

struct VdcSigDict {
    std::map<std::string, long> counts;
    long total = 0;

    long count(const std::string& sig) const {
        auto it = counts.find(sig);
        return it == counts.end() ? 0 : it->second;
    }
};

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t out = 1;
    for (std::uint64_t i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
}

/// The runtime bound (max_power+1)^max_factors * C(num_monomials, max_factors).
inline std::uint64_t uom_enumeration_bound(std::size_t num_monomials, int max_factors, int max_power) {
    std::uint64_t powers = 1;
    for (int i = 0; i < max_factors; ++i) powers *= static_cast<std::uint64_t>(max_power) + 1;
    return powers * binomial(num_monomials, static_cast<std::uint64_t>(max_factors));
}

/// Exact number of primitive terms: sum over k of (k-subsets with at most
/// one derivative) * max_power^k.
inline std::uint64_t uom_primitive_term_count(std::size_t num_nonderiv, std::size_t num_deriv,
                                              int max_factors, int max_power) {
    std::uint64_t total = 0;
    for (int k = 1; k <= max_factors; ++k) {
        std::uint64_t subsets = binomial(num_nonderiv, static_cast<std::uint64_t>(k));
        if (k >= 1) subsets += num_deriv * binomial(num_nonderiv, static_cast<std::uint64_t>(k - 1));
        std::uint64_t powers = 1;
        for (int i = 0; i < k; ++i) powers *= static_cast<std::uint64_t>(max_power);
        total += subsets * powers;
    }
    return total;
}

inline UomTermDict build_uom_term_dict(const GeneratorConfig& cfg, const SymbolTable& table) {
    cfg.validate();
    UomTermDict dict;
    dict.enumeration_bound = uom_enumeration_bound(table.size(), cfg.max_factors, cfg.max_power);
    if (dict.enumeration_bound > cfg.uom_enumeration_cap)
        throw BudgetExceeded("unit-of-measure dictionary enumeration bound exceeds the cap");

    const std::size_t n = table.size();
    const int max_k = std::min<int>(cfg.max_factors, static_cast<int>(n));
    std::vector<SymbolId> subset;

    // enumerate k-subsets, then all power assignments from [1, max_power]^k
    auto emit_all_powers = [&](auto&& self, Monomial& mono, std::size_t pos) -> void {
        if (pos == subset.size()) {
            dict.buckets[dim_of_monomial(mono, table)].push_back(mono);
            ++dict.total_terms;
            return;
        }
        for (int e = 1; e <= cfg.max_power; ++e) {
            mono.set_exponent(subset[pos], e);
            self(self, mono, pos + 1);
        }
        mono.set_exponent(subset[pos], 1);
    };
    auto choose = [&](auto&& self, SymbolId next, int derivs) -> void {
        if (!subset.empty()) {
            Monomial mono(n);
            for (SymbolId s : subset) mono.set_exponent(s, 1);
            emit_all_powers(emit_all_powers, mono, 0);
        }
        if (static_cast<int>(subset.size()) == max_k) return;
        for (SymbolId s = next; s < n; ++s) {
            bool is_deriv = table.info(s).kind == SymbolKind::Derivatif;
            if (is_deriv && derivs >= 1) continue;  // at most one distinct derivative factor
            subset.push_back(s);
            self(self, s + 1, derivs + (is_deriv ? 1 : 0));
            subset.pop_back();
        }
    };
    choose(choose, 0, 0);
    return dict;
}

// ---------------------------------------------------------------------------
// Term generation

namespace gendetail {

inline int draw_from_probs(std::span<const double> probs, RngStream& rng) {
    return static_cast<int>(rng.categorical(probs)) + 1;
}

/// P(power = k) proportional to bias^(k-1) over [1, max_power].
inline int draw_power(double bias, int max_power, RngStream& rng) {
    std::vector<double> w(static_cast<std::size_t>(max_power));
    double cur = 1.0;
    for (int k = 0; k < max_power; ++k) {
        w[static_cast<std::size_t>(k)] = cur;
        cur *= bias;
    }
    return static_cast<int>(rng.weighted_index(w)) + 1;
}

inline int draw_small_constant(const GeneratorConfig& cfg, RngStream& rng) {
    return draw_from_probs(cfg.prob_small_constants, rng);
}

inline int draw_num_factors(const GeneratorConfig& cfg, const SymbolTable& table, RngStream& rng) {
    std::size_t limit = std::min<std::size_t>(
        {static_cast<std::size_t>(cfg.max_factors), cfg.prob_factors_per_term.size(), table.size()});
    std::span<const double> probs(cfg.prob_factors_per_term.data(), limit);
    return draw_from_probs(probs, rng);
}

inline int draw_num_terms(const GeneratorConfig& cfg, RngStream& rng) {
    return draw_from_probs(cfg.prob_num_terms, rng);
}

}  // namespace gendetail

/// Algorithm: draw a factor count, draw that many distinct symbols (factor
/// sets with two distinct derivatives are resampled, the count is kept),
/// assign kind-biased powers, and attach a small integer coefficient.
inline Term gen_term(const GeneratorConfig& cfg, const SymbolTable& table, RngStream& rng) {
    cfg.validate();
    std::vector<SymbolId> ids(table.size());
    for (SymbolId i = 0; i < table.size(); ++i) ids[i] = i;
    const std::size_t nonderiv = table.size() - table.count(SymbolKind::Derivatif);

    int k = gendetail::draw_num_factors(cfg, table, rng);
    // a k-factor term needs at least k-1 non-derivative symbols
    while (k > 1 && static_cast<std::size_t>(k) > nonderiv + 1) --k;

    while (true) {
        // partial Fisher-Yates draw of k distinct symbols
        for (int i = 0; i < k; ++i) {
            std::size_t j = i + rng.uniform_below(ids.size() - static_cast<std::size_t>(i));
            std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
        }
        int derivs = 0;
        for (int i = 0; i < k; ++i)
            if (table.info(ids[static_cast<std::size_t>(i)]).kind == SymbolKind::Derivatif) ++derivs;
        if (derivs > 1) continue;

        Monomial mono(table.size());
        for (int i = 0; i < k; ++i) {
            SymbolId s = ids[static_cast<std::size_t>(i)];
            double bias = table.info(s).kind == SymbolKind::Derivatif ? cfg.same_factor_derivative_bias
                                                                      : cfg.same_factor_variable_bias;
            mono.set_exponent(s, gendetail::draw_power(bias, cfg.max_power, rng));
        }
        return Term{Rational(gendetail::draw_small_constant(cfg, rng)), std::move(mono)};
    }
}

inline VdcSigDict build_vdc_dict(const GeneratorConfig& cfg, const SymbolTable& table, RngStream& rng) {
    VdcSigDict dict;
    for (int i = 0; i < cfg.vdc_samples; ++i) {
        Term t = gen_term(cfg, table, rng);
        ++dict.counts[vdc_signature(t.mono, table)];
        ++dict.total;
    }
    return dict;
}

// ---------------------------------------------------------------------------
// Equation generation

namespace gendetail {

inline bool two_single_indeterminate_terms(const std::vector<Term>& terms) {
    return terms.size() == 2 && terms[0].mono.num_factors() == 1 && terms[1].mono.num_factors() == 1;
}

inline bool equal_modulo_constants(const std::vector<Term>& terms) {
    for (std::size_t i = 0; i < terms.size(); ++i)
        for (std::size_t j = i + 1; j < terms.size(); ++j)
            if (terms[i].mono == terms[j].mono) return true;
    return false;
}

/// The common-factor rejection flags a redundant symbol; when the whole
/// term set spans a single symbol there is nothing redundant to flag, so
/// the check is waived (a one-symbol table could never emit otherwise).
inline bool all_terms_share_factor(const std::vector<Term>& terms) {
    std::vector<Monomial> monos;
    std::set<SymbolId> span;
    monos.reserve(terms.size());
    for (const auto& t : terms) {
        monos.push_back(t.mono);
        for (SymbolId s : t.mono.support()) span.insert(s);
    }
    if (span.size() <= 1) return false;
    return has_common_factor(monos);
}

/// All-positive with probability prob_all_positive; otherwise random signs
/// with the last term forced opposite when all prior signs agree.
inline std::vector<int> assign_signs(std::size_t n, const GeneratorConfig& cfg, RngStream& rng) {
    std::vector<int> signs(n, 1);
    if (rng.bernoulli(cfg.prob_all_positive)) return signs;
    if (n == 1) {
        signs[0] = rng.coin() ? 1 : -1;
        return signs;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) signs[i] = rng.coin() ? 1 : -1;
    bool all_same = true;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (signs[i] != signs[0]) all_same = false;
    signs[n - 1] = all_same ? -signs[0] : (rng.coin() ? 1 : -1);
    return signs;
}

inline Equation finish_equation(std::vector<Term> terms, const SymbolTable& table,
                                const GeneratorConfig& cfg, RngStream& rng) {
    auto signs = assign_signs(terms.size(), cfg, rng);
    Polynomial p(table);
    for (std::size_t i = 0; i < terms.size(); ++i)
        p = p + Polynomial::monomial(table, Rational(signs[i]) * terms[i].coeff, terms[i].mono);
    return Equation(p);
}

inline Term gen_term_containing(const GeneratorConfig& cfg, const SymbolTable& table, RngStream& rng,
                                std::optional<SymbolId> required, int budget) {
    for (int i = 0; i < budget; ++i) {
        Term t = gen_term(cfg, table, rng);
        if (!required || t.mono.exponent(*required) > 0) return t;
    }
    throw ExhaustedAttempts("could not generate a term containing the required symbol");
}

}  // namespace gendetail

/// Free mode: terms drawn independently; rejects term sets where two terms
/// are equal modulo constants, all terms share a common factor, or the
/// equation is exactly two single-indeterminate monomials.
inline Equation gen_equation_free(const GeneratorConfig& cfg, const SymbolTable& table, RngStream& rng,
                                  std::optional<SymbolId> required = std::nullopt) {
    cfg.validate();
    // num_terms is drawn once and kept across sanity-check resamples so the
    // emitted term-count distribution is exactly prob_num_terms
    int num_terms = gendetail::draw_num_terms(cfg, rng);
    bool infeasible_pair = num_terms == 2 && table.size() == 1;
    if (infeasible_pair) num_terms = 3;  // every 2-term set over one symbol is two monomials
    for (int attempt = 0; attempt < cfg.equation_attempts; ++attempt) {
        std::vector<Term> terms;
        terms.push_back(gendetail::gen_term_containing(cfg, table, rng, required, cfg.equation_attempts));
        for (int i = 1; i < num_terms; ++i) terms.push_back(gen_term(cfg, table, rng));
        if (gendetail::equal_modulo_constants(terms)) continue;
        if (gendetail::all_terms_share_factor(terms)) continue;
        if (gendetail::two_single_indeterminate_terms(terms)) continue;
        return gendetail::finish_equation(std::move(terms), table, cfg, rng);
    }
    throw ExhaustedAttempts("gen_equation_free");
}

/// Dimensionally consistent mode: the first term fixes the unit of measure
/// and the remaining terms are drawn without replacement from its bucket,
/// weighted by vdc-signature frequencies.
inline Equation gen_equation_dim(const GeneratorConfig& cfg, const SymbolTable& table,
                                 const UomTermDict& uom, const VdcSigDict& vdc, RngStream& rng,
                                 std::optional<SymbolId> required = std::nullopt) {
    cfg.validate();
    for (int attempt = 0; attempt < cfg.equation_attempts; ++attempt) {
        int num_terms = gendetail::draw_num_terms(cfg, rng);
        Term first = gendetail::gen_term_containing(cfg, table, rng, required, cfg.equation_attempts);
        Dimension dim = dim_of_monomial(first.mono, table);
        const auto* bucket = uom.bucket(dim);
        if (!bucket || bucket->size() < static_cast<std::size_t>(num_terms)) continue;

        std::vector<const Monomial*> candidates;
        std::vector<double> weights;
        for (const auto& m : *bucket) {
            if (m == first.mono) continue;
            long c = vdc.count(vdc_signature(m, table));
            if (c <= 0) continue;
            candidates.push_back(&m);
            weights.push_back(static_cast<double>(c));
        }
        if (candidates.size() < static_cast<std::size_t>(num_terms - 1)) continue;

        std::vector<Term> terms;
        terms.push_back(first);
        for (int i = 1; i < num_terms; ++i) {
            std::size_t pick = rng.weighted_index(weights);
            terms.push_back({Rational(gendetail::draw_small_constant(cfg, rng)), *candidates[pick]});
            weights[pick] = 0.0;  // without replacement
        }

        // divide out a common unnamed constant factor
        BigInt g = 0;
        for (const auto& t : terms) g = gcd(g, num(t.coeff));
        if (g > 1)
            for (auto& t : terms) t.coeff /= Rational(g);

        if (gendetail::equal_modulo_constants(terms)) continue;
        if (gendetail::all_terms_share_factor(terms)) continue;
        if (gendetail::two_single_indeterminate_terms(terms)) continue;
        return gendetail::finish_equation(std::move(terms), table, cfg, rng);
    }
    throw ExhaustedAttempts("gen_equation_dim");
}

// ---------------------------------------------------------------------------
// System generation

struct TheorySystem {
    const SymbolTable* table = nullptr;
    std::vector<Equation> axioms;
    bool includes_trig_identity = false;
    GeneratorConfig config;
    std::uint64_t seed = 0;

    const SymbolTable& symbols() const { return *table; }

    std::vector<Polynomial> axiom_polys() const {
        std::vector<Polynomial> out;
        out.reserve(axioms.size());
        for (const auto& a : axioms) out.push_back(a.poly());
        return out;
    }

    /// Index of the trig identity when present (always appended last).
    std::optional<std::size_t> trig_identity_index() const {
        if (!includes_trig_identity) return std::nullopt;
        return axioms.size() - 1;
    }
};

inline Equation trig_identity_equation(const SymbolTable& table) {
    auto sin_id = table.theta_aux(ThetaKind::Sin);
    auto cos_id = table.theta_aux(ThetaKind::Cos);
    if (!sin_id || !cos_id) throw std::logic_error("trig identity needs sin and cos auxiliaries");
    Polynomial p = Polynomial::symbol(table, *sin_id) * Polynomial::symbol(table, *sin_id) +
                   Polynomial::symbol(table, *cos_id) * Polynomial::symbol(table, *cos_id) -
                   Polynomial::constant(table, 1);
    return Equation(p);
}

namespace gendetail {

inline Dimension equation_dimension(const Equation& eq, const SymbolTable& table) {
    return dim_of_monomial(eq.poly().leading_term().mono, table);
}

inline bool var_deriv_overlap(const Equation& a, const Equation& b, const SymbolTable& table) {
    auto sa = a.poly().support();
    for (SymbolId s : b.poly().support())
        if (!is_constant_kind(table.info(s).kind) && sa.count(s)) return true;
    return false;
}

}  // namespace gendetail

/// Generates numEqns axioms (plus the trig identity when both sin and cos
/// auxiliaries exist), steering coverage toward unused symbols, rejecting
/// duplicates and same-dimension pairs with overlapping variables or
/// derivatives, and certifying consistency with a Groebner basis.
inline TheorySystem gen_system(const GeneratorConfig& cfg, const SymbolTable& table, int num_eqns,
                               const UomTermDict& uom, const VdcSigDict& vdc, RngStream& rng) {
    cfg.validate();
    if (num_eqns < 1) throw std::invalid_argument("num_eqns must be >= 1");

    TheorySystem system;
    system.table = &table;
    system.config = cfg;
    system.seed = cfg.seed;

    std::set<SymbolId> unused;
    for (SymbolId s = 0; s < table.size(); ++s) unused.insert(s);

    for (int i = 0; i < num_eqns; ++i) {
        bool accepted = false;
        for (int attempt = 0; attempt < cfg.system_attempts && !accepted; ++attempt) {
            std::optional<SymbolId> required;
            if (i > 0 && !unused.empty()) {
                std::vector<SymbolId> pool(unused.begin(), unused.end());
                required = pool[rng.uniform_below(pool.size())];
            }
            Equation eq;
            try {
                eq = cfg.dimensional_mode ? gen_equation_dim(cfg, table, uom, vdc, rng, required)
                                          : gen_equation_free(cfg, table, rng, required);
            } catch (const ExhaustedAttempts&) {
                continue;
            }
            bool bad = false;
            for (const auto& prev : system.axioms) {
                if (eq == prev) {
                    bad = true;
                    break;
                }
                if (cfg.dimensional_mode &&
                    gendetail::equation_dimension(eq, table) == gendetail::equation_dimension(prev, table) &&
                    gendetail::var_deriv_overlap(eq, prev, table)) {
                    bad = true;
                    break;
                }
            }
            if (bad) continue;
            for (SymbolId s : eq.poly().support()) unused.erase(s);
            system.axioms.push_back(std::move(eq));
            accepted = true;
        }
        if (!accepted) throw ExhaustedAttempts("gen_system: equation slot " + std::to_string(i));
    }

    if (table.theta_aux(ThetaKind::Sin) && table.theta_aux(ThetaKind::Cos)) {
        system.axioms.push_back(trig_identity_equation(table));
        system.includes_trig_identity = true;
    }

    auto gb = buchberger(system.axiom_polys(), BlockLexOrder::canonical(table.size()), cfg.groebner);
    if (!gb.is_consistent()) throw Inconsistent();
    return system;
}

/// Replacement axiom for the axiom at `index`: dimensionally consistent in
/// dimensional mode, contains every symbol used solely by the replaced
/// axiom, keeps the system consistent, is not a consequence of the
/// remaining axioms, and (when the original consequence is supplied) leaves
/// that consequence underivable. Pass the cofactor-lifted consequence
/// polynomial: rejecting the lifted form also rejects the stripped one.
inline Equation gen_replacement_axiom(const TheorySystem& system, std::size_t index,
                                      const std::optional<Polynomial>& original_consequence,
                                      const UomTermDict& uom, const VdcSigDict& vdc, RngStream& rng) {
    const GeneratorConfig& cfg = system.config;
    const SymbolTable& table = system.symbols();
    if (index >= system.axioms.size()) throw std::invalid_argument("replacement index out of range");
    if (system.trig_identity_index() && *system.trig_identity_index() == index)
        throw std::invalid_argument("the trig identity axiom is never replaced");

    std::set<SymbolId> unique_syms = system.axioms[index].poly().support();
    for (std::size_t j = 0; j < system.axioms.size(); ++j) {
        if (j == index) continue;
        for (SymbolId s : system.axioms[j].poly().support()) unique_syms.erase(s);
    }

    std::vector<Polynomial> remaining;
    for (std::size_t j = 0; j < system.axioms.size(); ++j)
        if (j != index) remaining.push_back(system.axioms[j].poly());
    auto order = BlockLexOrder::canonical(table.size());
    std::optional<GroebnerBasis> gb_remaining;
    if (!remaining.empty()) gb_remaining = buchberger(remaining, order, cfg.groebner);

    for (int attempt = 0; attempt < cfg.replacement_attempts; ++attempt) {
        std::optional<SymbolId> required;
        if (!unique_syms.empty()) {
            std::vector<SymbolId> pool(unique_syms.begin(), unique_syms.end());
            required = pool[rng.uniform_below(pool.size())];
        }
        Equation candidate;
        try {
            candidate = cfg.dimensional_mode ? gen_equation_dim(cfg, table, uom, vdc, rng, required)
                                             : gen_equation_free(cfg, table, rng, required);
        } catch (const ExhaustedAttempts&) {
            continue;
        }
        auto support = candidate.poly().support();
        bool covers = std::all_of(unique_syms.begin(), unique_syms.end(),
                                  [&](SymbolId s) { return support.count(s) > 0; });
        if (!covers) continue;
        bool duplicate = false;
        for (const auto& a : system.axioms)
            if (candidate == a) duplicate = true;
        if (duplicate) continue;

        try {
            // must genuinely change the theory
            if (gb_remaining && normal_form(candidate.poly(), *gb_remaining, cfg.groebner).is_zero())
                continue;
            std::vector<Polynomial> replaced = remaining;
            replaced.insert(replaced.begin() + static_cast<std::ptrdiff_t>(index), candidate.poly());
            auto gb_new = buchberger(replaced, order, cfg.groebner);
            if (!gb_new.is_consistent()) continue;
            if (original_consequence &&
                normal_form(*original_consequence, gb_new, cfg.groebner).is_zero())
                continue;
        } catch (const BudgetExceeded&) {
            continue;
        }
        return candidate;
    }
    throw ExhaustedAttempts("gen_replacement_axiom");
}

// ---------------------------------------------------------------------------
// Dictionary cache: built once per (config, table), shared read-only.

class DictCache {
public:
    std::shared_ptr<const UomTermDict> uom(const GeneratorConfig& cfg, const SymbolTable& table) {
        std::string key = std::to_string(cfg.max_power) + "#" + std::to_string(cfg.max_factors) + "#" +
                          table.spec_text();
        std::scoped_lock lock(mutex_);
        auto it = uom_cache_.find(key);
        if (it != uom_cache_.end()) {
            ++uom_hits_;
            return it->second;
        }
        auto built = std::make_shared<const UomTermDict>(build_uom_term_dict(cfg, table));
        uom_cache_.emplace(std::move(key), built);
        return built;
    }

    /// The vdc dictionary consumes randomness; its stream is derived from
    /// the config seed so sibling system streams are untouched.
    std::shared_ptr<const VdcSigDict> vdc(const GeneratorConfig& cfg, const SymbolTable& table) {
        std::string key = cfg.generation_key() + "#" + std::to_string(cfg.seed) + "#" + table.spec_text();
        std::scoped_lock lock(mutex_);
        auto it = vdc_cache_.find(key);
        if (it != vdc_cache_.end()) {
            ++vdc_hits_;
            return it->second;
        }
        RngStream rng(derive_seed(cfg.seed, {hash_string("vdc-dict"), hash_string(table.spec_text())}));
        auto built = std::make_shared<const VdcSigDict>(build_vdc_dict(cfg, table, rng));
        vdc_cache_.emplace(std::move(key), built);
        return built;
    }

    std::uint64_t uom_hits() const {
        std::scoped_lock lock(mutex_);
        return uom_hits_;
    }

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<const UomTermDict>> uom_cache_;
    std::map<std::string, std::shared_ptr<const VdcSigDict>> vdc_cache_;
    std::uint64_t uom_hits_ = 0;
    std::uint64_t vdc_hits_ = 0;
};

}  // namespace syntheory
