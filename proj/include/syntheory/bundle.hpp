#pragma once

// A TheoryBundle is everything one generated system ships with: axioms,
// the derived consequence, replacement axioms, clean and noisy datasets,
// and the provenance needed to regenerate all of it.

#include "syntheory/consequence.hpp"
#include "syntheory/datagen.hpp"

#include <optional>
#include <string>
#include <vector>

namespace syntheory {

struct Replacement {
    std::size_t axiom_index = 0;
    Equation axiom;

    TheorySystem replaced_system(const TheorySystem& original) const {
        TheorySystem out = original;
        out.axioms.at(axiom_index) = axiom;
        return out;
    }
};

struct TheoryBundle {
    // the table object lives here so the system can point at it
    std::shared_ptr<const SymbolTable> table;
    TheorySystem system;
    Consequence consequence;
    ConsequenceConfig consequence_config;
    std::vector<Replacement> replacements;

    DataTable consequence_data;
    std::vector<std::pair<NoiseSpec, DataTable>> consequence_noise;
    DataTable system_data;
    std::vector<std::pair<NoiseSpec, DataTable>> system_noise;

    std::string cell;  // directory token, e.g. vars6_derivs2_eqns4
    int system_index = 1;
    std::uint64_t seed = 0;  // per-system stream seed
    int points = 1000;
    NoiseFamily noise_family = NoiseFamily::Gaussian;

    Polynomial lifted_consequence() const {
        return consequence.polynomial.poly().times_term(1, consequence.cofactor);
    }
};

inline bool same_measured(const MeasuredSet& a, const MeasuredSet& b) {
    return a.measured_vars == b.measured_vars && a.measured_derivs == b.measured_derivs &&
           a.observed_consts == b.observed_consts;
}

inline bool operator==(const TheoryBundle& a, const TheoryBundle& b) {
    if (a.table->spec_text() != b.table->spec_text()) return false;
    if (a.system.axioms != b.system.axioms) return false;
    if (a.system.includes_trig_identity != b.system.includes_trig_identity) return false;
    if (!(a.consequence.polynomial == b.consequence.polynomial)) return false;
    if (!(a.consequence.cofactor == b.consequence.cofactor)) return false;
    if (!same_measured(a.consequence.measured, b.consequence.measured)) return false;
    if (a.replacements.size() != b.replacements.size()) return false;
    for (std::size_t i = 0; i < a.replacements.size(); ++i)
        if (a.replacements[i].axiom_index != b.replacements[i].axiom_index ||
            !(a.replacements[i].axiom == b.replacements[i].axiom))
            return false;
    if (!(a.consequence_data == b.consequence_data)) return false;
    if (!(a.system_data == b.system_data)) return false;
    auto noise_equal = [](const auto& x, const auto& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i].first.family != y[i].first.family) return false;
            if (x[i].first.epsilon != y[i].first.epsilon) return false;
            if (!(x[i].second == y[i].second)) return false;
        }
        return true;
    };
    if (!noise_equal(a.consequence_noise, b.consequence_noise)) return false;
    if (!noise_equal(a.system_noise, b.system_noise)) return false;
    return a.cell == b.cell && a.system_index == b.system_index && a.seed == b.seed &&
           a.points == b.points && a.noise_family == b.noise_family &&
           a.system.config.generation_key() == b.system.config.generation_key() &&
           a.system.config.seed == b.system.config.seed;
}

}  // namespace syntheory
