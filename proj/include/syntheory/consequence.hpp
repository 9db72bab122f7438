#pragma once

// Consequence derivation: sample measured subsets, compute the elimination
// ideal under the block order, and accept the first eliminated polynomial
// that survives the filters. The accepted polynomial is canonicalized by
// stripping its monomial content; the stripped cofactor is recorded so that
// exact ideal membership (cofactor * q in I) stays checkable.

#include "syntheory/generator.hpp"

#include <map>
#include <optional>
#include <string>
#include <variant>

namespace syntheory {

struct MeasuredSet {
    std::set<SymbolId> measured_vars;    // includes theta auxiliaries
    std::set<SymbolId> measured_derivs;
    std::set<SymbolId> observed_consts;

    static MeasuredSet from_ids(const std::set<SymbolId>& ids, const SymbolTable& table) {
        MeasuredSet out;
        for (SymbolId s : ids) {
            switch (table.info(s).kind) {
                case SymbolKind::Variable:
                case SymbolKind::ThetaAux: out.measured_vars.insert(s); break;
                case SymbolKind::Derivatif: out.measured_derivs.insert(s); break;
                default: out.observed_consts.insert(s); break;
            }
        }
        return out;
    }

    std::set<SymbolId> all() const {
        std::set<SymbolId> out = measured_vars;
        out.insert(measured_derivs.begin(), measured_derivs.end());
        out.insert(observed_consts.begin(), observed_consts.end());
        return out;
    }

    bool contains(SymbolId s) const {
        return measured_vars.count(s) || measured_derivs.count(s) || observed_consts.count(s);
    }
};

struct ConsequenceConfig {
    int term_limit = 8;     // T
    int max_attempts = 10;  // N_max
    GroebnerOptions groebner{.step_budget = 1'000'000, .work_budget = 4'000'000, .term_guard = 20'000};
};

struct Consequence {
    Equation polynomial;       // monomial-content-stripped, content-normalized
    Monomial cofactor;         // cofactor * polynomial lies in the ideal
    MeasuredSet measured;      // the accepted prefix, not the minimal support
    int attempt_index = 0;
    std::vector<SymbolId> elimination_order;  // permutation used for the basis
};

enum class FilterReject {
    Empty,
    IsMonomial,
    TooManyConstants,
    TooManyTerms,
    MultipleDependentVariables,
};

inline std::string to_string(FilterReject r) {
    switch (r) {
        case FilterReject::Empty: return "Empty";
        case FilterReject::IsMonomial: return "IsMonomial";
        case FilterReject::TooManyConstants: return "TooManyConstants";
        case FilterReject::TooManyTerms: return "TooManyTerms";
        case FilterReject::MultipleDependentVariables: return "MultipleDependentVariables";
    }
    return "?";
}

/// The five acceptance filters; only PhysicalConstant entries count toward
/// the constant budget (pi and e keep their true values at data time and
/// are exempt).
inline std::optional<FilterReject> check_consequence_filters(const Polynomial& p, const SymbolTable& table,
                                                             const ConsequenceConfig& cfg) {
    if (p.is_zero()) return FilterReject::Empty;
    if (p.num_terms() <= 1) return FilterReject::IsMonomial;
    if (p.num_terms() > static_cast<std::size_t>(cfg.term_limit)) return FilterReject::TooManyTerms;
    int physical = 0;
    std::set<std::string> dependents;
    for (SymbolId s : p.support()) {
        const auto& info = table.info(s);
        if (info.kind == SymbolKind::PhysicalConstant) ++physical;
        if (info.kind == SymbolKind::Derivatif) dependents.insert(info.deriv->dependent);
    }
    if (physical > 1) return FilterReject::TooManyConstants;
    if (dependents.size() > 1) return FilterReject::MultipleDependentVariables;
    return std::nullopt;
}

enum class ConsequenceStatus { Accepted, InconsistentSystem, Rejected };

struct ConsequenceResult {
    ConsequenceStatus status;
    std::optional<Consequence> value;  // set iff Accepted
};

/// Deterministic core: elimination ideal for one measured set, first basis
/// element, cofactor strip, filters. Used by Algorithm 4 and directly by
/// the re-derive command and the fixtures.
inline ConsequenceResult consequence_for_measured(const TheorySystem& system,
                                                  const std::set<SymbolId>& measured_ids,
                                                  const ConsequenceConfig& cfg, int attempt_index = 0) {
    const SymbolTable& table = system.symbols();
    std::vector<bool> measured(table.size(), false);
    for (SymbolId s : measured_ids) measured[s] = true;
    auto order = BlockLexOrder::eliminating(table.size(), measured);
    GroebnerBasis gb = buchberger(system.axiom_polys(), order, cfg.groebner);
    if (!gb.is_consistent()) return {ConsequenceStatus::InconsistentSystem, std::nullopt};
    auto elim = eliminate(gb, measured_ids);
    if (elim.empty()) return {ConsequenceStatus::Rejected, std::nullopt};

    const Polynomial& first = elim.front();
    Monomial cofactor = first.monomial_content();
    Polynomial stripped = first.divide_by_monomial(cofactor).content_normalized();
    if (check_consequence_filters(stripped, table, cfg)) return {ConsequenceStatus::Rejected, std::nullopt};

    Consequence out{Equation(stripped), cofactor, MeasuredSet::from_ids(measured_ids, table), attempt_index,
                    order.permutation()};
    return {ConsequenceStatus::Accepted, std::move(out)};
}

/// Algorithm: up to max_attempts shuffles of the full symbol list; per
/// shuffle grow a measured prefix one symbol at a time, skipping prefixes
/// contained in the support of any single axiom.
///
/// One lex basis per shuffle suffices: under the order that lists the
/// shuffle reversed (prefix symbols smallest), every prefix is a trailing
/// block, so the elimination theorem applies to all prefix lengths at once.
inline ConsequenceResult derive_consequence(const TheorySystem& system, const ConsequenceConfig& cfg,
                                            RngStream& rng) {
    const SymbolTable& table = system.symbols();
    std::vector<std::set<SymbolId>> axiom_supports;
    axiom_supports.reserve(system.axioms.size());
    for (const auto& a : system.axioms) axiom_supports.push_back(a.poly().support());

    std::vector<SymbolId> ids(table.size());
    for (SymbolId s = 0; s < table.size(); ++s) ids[s] = s;

    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        rng.shuffle(ids);
        std::vector<SymbolId> perm(ids.rbegin(), ids.rend());
        BlockLexOrder order{perm};
        std::optional<GroebnerBasis> gb;
        try {
            gb = buchberger(system.axiom_polys(), order, cfg.groebner);
        } catch (const BudgetExceeded&) {
            continue;
        }
        if (!gb->is_consistent()) return {ConsequenceStatus::InconsistentSystem, std::nullopt};

        std::set<SymbolId> prefix;
        for (std::size_t j = 0; j < ids.size(); ++j) {
            prefix.insert(ids[j]);
            bool inside_axiom = false;
            for (const auto& support : axiom_supports) {
                if (std::includes(support.begin(), support.end(), prefix.begin(), prefix.end())) {
                    inside_axiom = true;
                    break;
                }
            }
            if (inside_axiom) continue;
            auto elim = eliminate(*gb, prefix);
            if (elim.empty()) continue;

            const Polynomial& first = elim.front();
            Monomial cofactor = first.monomial_content();
            Polynomial stripped = first.divide_by_monomial(cofactor).content_normalized();
            if (check_consequence_filters(stripped, table, cfg)) continue;
            Consequence out{Equation(stripped), cofactor, MeasuredSet::from_ids(prefix, table), attempt,
                            perm};
            return {ConsequenceStatus::Accepted, std::move(out)};
        }
    }
    return {ConsequenceStatus::Rejected, std::nullopt};
}

/// Exact membership: cofactor * q reduces to zero modulo a Groebner basis
/// of the system's ideal.
inline bool verify_consequence(const TheorySystem& system, const Consequence& q,
                               GroebnerOptions opts = {}) {
    const SymbolTable& table = system.symbols();
    auto order = BlockLexOrder::canonical(table.size());
    auto gb = buchberger(system.axiom_polys(), order, opts);
    Polynomial lifted = q.polynomial.poly().times_term(1, q.cofactor);
    return normal_form(lifted, gb, opts).is_zero();
}

}  // namespace syntheory
