#pragma once

// The typed universe of indeterminates: variables, the distinguished
// dimensionless theta with its auxiliaries (sin, cos, exp), ordinary
// derivatives with dependent/independent metadata, and named constants
// (physical ones get scaled to 1 at data time, mathematical ones keep
// their true value). Tables are immutable after construction.

#include "syntheory/units.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace syntheory {

using SymbolId = std::uint32_t;

enum class SymbolKind { Variable, ThetaAux, Derivatif, PhysicalConstant, MathematicalConstant };

enum class ThetaKind { Theta, Sin, Cos, Exp };

struct DerivMeta {
    std::string dependent;
    std::string independent;
    int order = 1;  // 1 or 2
};

struct SymbolInfo {
    std::string name;
    SymbolKind kind = SymbolKind::Variable;
    Dimension unit;
    std::optional<DerivMeta> deriv;    // Derivatif only
    std::optional<double> value;       // MathematicalConstant only
    std::optional<ThetaKind> theta;    // ThetaAux only
};

enum class SymbolErrorCode { DuplicateName, BadDerivativeMeta, NonDimensionlessTheta, BadSpec };

struct SymbolError : std::runtime_error {
    SymbolErrorCode code;
    SymbolError(SymbolErrorCode c, const std::string& what) : std::runtime_error(what), code(c) {}
};

inline bool is_constant_kind(SymbolKind k) {
    return k == SymbolKind::PhysicalConstant || k == SymbolKind::MathematicalConstant;
}

/// Generation-time class of a symbol: theta auxiliaries behave as variables.
inline bool is_variable_like(SymbolKind k) {
    return k == SymbolKind::Variable || k == SymbolKind::ThetaAux;
}

class SymbolTable {
public:
    /// Validates and canonicalizes: variables, theta auxiliaries,
    /// derivatives, constants — stable within each class, except that an
    /// order-2 derivative is placed after the order-1 one for the same
    /// dependent variable.
    static SymbolTable build(std::vector<SymbolInfo> specs) {
        if (specs.empty()) throw SymbolError(SymbolErrorCode::BadSpec, "empty symbol spec");
        for (const auto& s : specs) validate_entry(s);

        std::stable_sort(specs.begin(), specs.end(), [](const SymbolInfo& a, const SymbolInfo& b) {
            return class_rank(a.kind) < class_rank(b.kind);
        });
        // order-1 before order-2 for a shared dependent variable
        for (std::size_t i = 0; i < specs.size(); ++i) {
            if (specs[i].kind != SymbolKind::Derivatif || specs[i].deriv->order != 2) continue;
            for (std::size_t j = i + 1; j < specs.size(); ++j) {
                if (specs[j].kind != SymbolKind::Derivatif) break;
                if (specs[j].deriv->order == 1 && specs[j].deriv->dependent == specs[i].deriv->dependent) {
                    std::swap(specs[i], specs[j]);
                    break;
                }
            }
        }

        SymbolTable table;
        std::string independent;
        for (auto& s : specs) {
            if (table.by_name_.count(s.name))
                throw SymbolError(SymbolErrorCode::DuplicateName, "duplicate symbol name: " + s.name);
            if (s.kind == SymbolKind::Derivatif) {
                if (independent.empty())
                    independent = s.deriv->independent;
                else if (independent != s.deriv->independent)
                    throw SymbolError(SymbolErrorCode::BadDerivativeMeta,
                                      "derivatives must share one independent variable: " + s.name);
            }
            table.by_name_.emplace(s.name, static_cast<SymbolId>(table.entries_.size()));
            table.entries_.push_back(std::move(s));
        }
        return table;
    }

    std::size_t size() const { return entries_.size(); }

    const SymbolInfo& info(SymbolId id) const { return entries_.at(id); }

    const std::vector<SymbolInfo>& entries() const { return entries_; }

    std::optional<SymbolId> find(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end()) return std::nullopt;
        return it->second;
    }

    SymbolId require(const std::string& name) const {
        auto id = find(name);
        if (!id) throw SymbolError(SymbolErrorCode::BadSpec, "unknown symbol: " + name);
        return *id;
    }

    /// Dependent-variable name of a derivative; the name need not itself be
    /// a table entry (latent variables are the normal case).
    const std::string& dependent_variable_of(SymbolId id) const {
        const auto& s = info(id);
        if (s.kind != SymbolKind::Derivatif)
            throw SymbolError(SymbolErrorCode::BadDerivativeMeta, "not a derivative: " + s.name);
        return s.deriv->dependent;
    }

    std::optional<SymbolId> theta_symbol() const {
        for (SymbolId i = 0; i < entries_.size(); ++i)
            if (entries_[i].theta && *entries_[i].theta == ThetaKind::Theta) return i;
        return std::nullopt;
    }

    std::optional<SymbolId> theta_aux(ThetaKind k) const {
        for (SymbolId i = 0; i < entries_.size(); ++i)
            if (entries_[i].theta && *entries_[i].theta == k) return i;
        return std::nullopt;
    }

    std::size_t count(SymbolKind k) const {
        return static_cast<std::size_t>(
            std::count_if(entries_.begin(), entries_.end(), [k](const auto& s) { return s.kind == k; }));
    }

    std::size_t count_variable_like() const {
        return count(SymbolKind::Variable) + count(SymbolKind::ThetaAux);
    }

    std::size_t count_constants() const {
        return count(SymbolKind::PhysicalConstant) + count(SymbolKind::MathematicalConstant);
    }

    bool operator==(const SymbolTable& other) const { return spec_text() == other.spec_text(); }

    // ---- symbol spec file: one symbol per line, `#` comments ----
    //   name var  unit
    //   name theta|sin|cos|exp 1
    //   name deriv unit dependent independent order
    //   name const unit
    //   name mathconst 1 value

    static SymbolTable parse_spec(const std::string& text) {
        std::vector<SymbolInfo> specs;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            std::istringstream ls(line);
            std::string name, kind;
            if (!(ls >> name)) continue;
            if (!(ls >> kind))
                throw SymbolError(SymbolErrorCode::BadSpec,
                                  "symbol spec line " + std::to_string(lineno) + ": missing kind");
            SymbolInfo s;
            s.name = name;
            std::string unit;
            auto need_unit = [&]() {
                if (!(ls >> unit))
                    throw SymbolError(SymbolErrorCode::BadSpec,
                                      "symbol spec line " + std::to_string(lineno) + ": missing unit");
                s.unit = Dimension::parse(unit);
            };
            if (kind == "var") {
                s.kind = SymbolKind::Variable;
                need_unit();
            } else if (kind == "theta" || kind == "sin" || kind == "cos" || kind == "exp") {
                s.kind = SymbolKind::ThetaAux;
                s.theta = kind == "theta"  ? ThetaKind::Theta
                          : kind == "sin" ? ThetaKind::Sin
                          : kind == "cos" ? ThetaKind::Cos
                                          : ThetaKind::Exp;
                need_unit();
            } else if (kind == "deriv") {
                s.kind = SymbolKind::Derivatif;
                need_unit();
                DerivMeta m;
                if (!(ls >> m.dependent >> m.independent >> m.order))
                    throw SymbolError(SymbolErrorCode::BadDerivativeMeta,
                                      "symbol spec line " + std::to_string(lineno) +
                                          ": expected `dependent independent order`");
                s.deriv = m;
            } else if (kind == "const") {
                s.kind = SymbolKind::PhysicalConstant;
                need_unit();
            } else if (kind == "mathconst") {
                s.kind = SymbolKind::MathematicalConstant;
                need_unit();
                double v;
                if (!(ls >> v))
                    throw SymbolError(SymbolErrorCode::BadSpec,
                                      "symbol spec line " + std::to_string(lineno) + ": missing value");
                s.value = v;
            } else {
                throw SymbolError(SymbolErrorCode::BadSpec,
                                  "symbol spec line " + std::to_string(lineno) + ": unknown kind " + kind);
            }
            std::string extra;
            if (ls >> extra)
                throw SymbolError(SymbolErrorCode::BadSpec,
                                  "symbol spec line " + std::to_string(lineno) + ": trailing token " + extra);
            specs.push_back(std::move(s));
        }
        return build(std::move(specs));
    }

    std::string spec_text() const {
        std::ostringstream out;
        for (const auto& s : entries_) {
            out << s.name << " ";
            switch (s.kind) {
                case SymbolKind::Variable: out << "var " << s.unit.str(); break;
                case SymbolKind::ThetaAux:
                    out << (*s.theta == ThetaKind::Theta  ? "theta"
                            : *s.theta == ThetaKind::Sin ? "sin"
                            : *s.theta == ThetaKind::Cos ? "cos"
                                                         : "exp")
                        << " 1";
                    break;
                case SymbolKind::Derivatif:
                    out << "deriv " << s.unit.str() << " " << s.deriv->dependent << " "
                        << s.deriv->independent << " " << s.deriv->order;
                    break;
                case SymbolKind::PhysicalConstant: out << "const " << s.unit.str(); break;
                case SymbolKind::MathematicalConstant: {
                    std::ostringstream v;
                    v.precision(17);
                    v << *s.value;
                    out << "mathconst 1 " << v.str();
                    break;
                }
            }
            out << "\n";
        }
        return out.str();
    }

    /// Base units referenced anywhere in the table, sorted by name.
    std::vector<std::string> base_units() const {
        std::map<std::string, int> seen;
        for (const auto& s : entries_)
            for (const auto& [name, e] : s.unit.exponents()) seen[name] = 1;
        std::vector<std::string> out;
        for (const auto& [name, one] : seen) out.push_back(name);
        return out;
    }

private:
    static int class_rank(SymbolKind k) {
        switch (k) {
            case SymbolKind::Variable: return 0;
            case SymbolKind::ThetaAux: return 1;
            case SymbolKind::Derivatif: return 2;
            default: return 3;
        }
    }

    static void validate_entry(const SymbolInfo& s) {
        if (s.name.empty()) throw SymbolError(SymbolErrorCode::BadSpec, "empty symbol name");
        if (!std::isalpha(static_cast<unsigned char>(s.name[0])) && s.name[0] != '_')
            throw SymbolError(SymbolErrorCode::BadSpec, "symbol name must be an identifier: " + s.name);
        for (char c : s.name)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
                throw SymbolError(SymbolErrorCode::BadSpec, "symbol name must be an identifier: " + s.name);
        switch (s.kind) {
            case SymbolKind::Derivatif:
                if (!s.deriv || s.deriv->dependent.empty() || s.deriv->independent.empty() ||
                    (s.deriv->order != 1 && s.deriv->order != 2))
                    throw SymbolError(SymbolErrorCode::BadDerivativeMeta,
                                      "bad derivative metadata for " + s.name);
                break;
            case SymbolKind::ThetaAux:
                if (!s.theta)
                    throw SymbolError(SymbolErrorCode::BadSpec, "theta kind missing for " + s.name);
                if (!s.unit.is_dimensionless())
                    throw SymbolError(SymbolErrorCode::NonDimensionlessTheta,
                                      "theta symbols must be dimensionless: " + s.name);
                break;
            case SymbolKind::MathematicalConstant:
                if (!s.value)
                    throw SymbolError(SymbolErrorCode::BadSpec, "value missing for " + s.name);
                if (!s.unit.is_dimensionless())
                    throw SymbolError(SymbolErrorCode::NonDimensionlessTheta,
                                      "mathematical constants must be dimensionless: " + s.name);
                break;
            default: break;
        }
    }

    std::vector<SymbolInfo> entries_;
    std::map<std::string, SymbolId> by_name_;
};

}  // namespace syntheory
