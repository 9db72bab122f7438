#pragma once

// Sparse multivariate polynomials with exact rational coefficients over a
// SymbolTable, plus homogeneous-form equations with a canonical integer
// text format. Terms are kept sorted descending under the canonical
// (table-index) lexicographic order; engines that need another order sort
// their own views.

#include "syntheory/monomial.hpp"
#include "syntheory/rational.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace syntheory {

struct ContextMismatch : std::runtime_error {
    ContextMismatch() : std::runtime_error("polynomial context mismatch") {}
};

struct MissingAssignment : std::runtime_error {
    explicit MissingAssignment(const std::string& name)
        : std::runtime_error("missing assignment for symbol: " + name) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct Term {
    Rational coeff;  // nonzero
    Monomial mono;
};

/// Drops the coefficient.
inline const Monomial& strip_constant(const Term& t) { return t.mono; }

class Polynomial {
public:
    Polynomial() : table_(nullptr) {}

    explicit Polynomial(const SymbolTable& table) : table_(&table) {}

    Polynomial(const SymbolTable& table, std::vector<Term> terms) : table_(&table) {
        for (auto& t : terms) add_term(t.coeff, t.mono);
        normalize();
    }

    static Polynomial zero(const SymbolTable& table) { return Polynomial(table); }

    static Polynomial constant(const SymbolTable& table, const Rational& c) {
        Polynomial p(table);
        if (c != 0) p.terms_.push_back({c, Monomial(table.size())});
        return p;
    }

    static Polynomial monomial(const SymbolTable& table, const Rational& c, const Monomial& m) {
        Polynomial p(table);
        if (c != 0) p.terms_.push_back({c, m});
        return p;
    }

    static Polynomial symbol(const SymbolTable& table, SymbolId id) {
        Monomial m(table.size());
        m.set_exponent(id, 1);
        return monomial(table, 1, m);
    }

    const SymbolTable& table() const {
        if (!table_) throw std::logic_error("polynomial without context");
        return *table_;
    }

    bool same_context(const Polynomial& other) const { return table_ == other.table_; }

    bool is_zero() const { return terms_.empty(); }

    std::size_t num_terms() const { return terms_.size(); }

    const std::vector<Term>& terms() const { return terms_; }

    /// Greatest term under the canonical order.
    const Term& leading_term() const {
        if (terms_.empty()) throw std::logic_error("leading term of zero polynomial");
        return terms_.front();
    }

    bool operator==(const Polynomial& other) const {
        if (terms_.size() != other.terms_.size()) return false;
        for (std::size_t i = 0; i < terms_.size(); ++i)
            if (terms_[i].coeff != other.terms_[i].coeff || !(terms_[i].mono == other.terms_[i].mono))
                return false;
        return true;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        a.check_context(b);
        Polynomial out = a;
        for (const auto& t : b.terms_) out.add_term(t.coeff, t.mono);
        out.normalize();
        return out;
    }

    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        a.check_context(b);
        Polynomial out = a;
        for (const auto& t : b.terms_) out.add_term(-t.coeff, t.mono);
        out.normalize();
        return out;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.check_context(b);
        Polynomial out(*a.table_);
        for (const auto& ta : a.terms_)
            for (const auto& tb : b.terms_) out.add_term(ta.coeff * tb.coeff, ta.mono * tb.mono);
        out.normalize();
        return out;
    }

    friend Polynomial operator*(const Rational& c, const Polynomial& p) {
        Polynomial out(*p.table_);
        if (c == 0) return out;
        out.terms_ = p.terms_;
        for (auto& t : out.terms_) t.coeff *= c;
        return out;
    }

    friend Polynomial operator-(const Polynomial& p) { return Rational(-1) * p; }

    /// Multiply by coeff * mono without building a second polynomial.
    Polynomial times_term(const Rational& c, const Monomial& m) const {
        Polynomial out(*table_);
        if (c == 0) return out;
        out.terms_.reserve(terms_.size());
        for (const auto& t : terms_) out.terms_.push_back({t.coeff * c, t.mono * m});
        out.normalize();  // multiplying by a monomial preserves strict ordering, but stay safe
        return out;
    }

    std::set<SymbolId> support() const {
        std::set<SymbolId> out;
        for (const auto& t : terms_)
            for (SymbolId s : t.mono.support()) out.insert(s);
        return out;
    }

    int degree_in(SymbolId s) const {
        int deg = 0;
        for (const auto& t : terms_) deg = std::max(deg, t.mono.exponent(s));
        return deg;
    }

    int total_degree() const {
        int deg = 0;
        for (const auto& t : terms_) deg = std::max(deg, t.mono.total_degree());
        return deg;
    }

    /// Componentwise-gcd monomial dividing every term.
    Monomial monomial_content() const {
        if (terms_.empty()) return Monomial(table_ ? table_->size() : 0);
        Monomial common = terms_.front().mono;
        for (std::size_t i = 1; i < terms_.size(); ++i) common = gcd(common, terms_[i].mono);
        return common;
    }

    /// Divide out a monomial that divides every term.
    Polynomial divide_by_monomial(const Monomial& m) const {
        Polynomial out(*table_);
        out.terms_.reserve(terms_.size());
        for (const auto& t : terms_) out.terms_.push_back({t.coeff, m.divide_into(t.mono)});
        out.normalize();
        return out;
    }

    /// Integer-primitive rescaling: integer coefficients with gcd 1, sign
    /// chosen so the canonical leading coefficient is positive.
    Polynomial content_normalized() const {
        if (terms_.empty()) return *this;
        BigInt denom_lcm = 1;
        for (const auto& t : terms_) denom_lcm = lcm(denom_lcm, den(t.coeff));
        BigInt numer_gcd = 0;
        for (const auto& t : terms_) numer_gcd = gcd(numer_gcd, num(t.coeff * Rational(denom_lcm)));
        Rational scale(denom_lcm, numer_gcd);
        if (terms_.front().coeff < 0) scale = -scale;
        return scale * *this;
    }

    /// Monic under the canonical order.
    Polynomial monic() const {
        if (terms_.empty()) return *this;
        return Rational(1) / terms_.front().coeff * *this;
    }

    double evaluate(const std::vector<double>& values) const {
        double acc = 0.0;
        for (const auto& t : terms_) {
            double prod = to_double(t.coeff);
            for (SymbolId s : t.mono.support()) prod *= std::pow(values.at(s), t.mono.exponent(s));
            acc += prod;
        }
        return acc;
    }

    double evaluate_at(const std::map<SymbolId, double>& values) const {
        double acc = 0.0;
        for (const auto& t : terms_) {
            double prod = to_double(t.coeff);
            for (SymbolId s : t.mono.support()) {
                auto it = values.find(s);
                if (it == values.end()) throw MissingAssignment(table().info(s).name);
                prod *= std::pow(it->second, t.mono.exponent(s));
            }
            acc += prod;
        }
        return acc;
    }

    /// Residual normalized by the largest term magnitude: |p(x)| / (1 + max |term|).
    double relative_residual(const std::map<SymbolId, double>& values) const {
        double acc = 0.0, biggest = 0.0;
        for (const auto& t : terms_) {
            double prod = to_double(t.coeff);
            for (SymbolId s : t.mono.support()) {
                auto it = values.find(s);
                if (it == values.end()) throw MissingAssignment(table().info(s).name);
                prod *= std::pow(it->second, t.mono.exponent(s));
            }
            acc += prod;
            biggest = std::max(biggest, std::fabs(prod));
        }
        return std::fabs(acc) / (1.0 + biggest);
    }

    /// Largest |term value| at the assignment; the residual scale.
    double max_term_magnitude(const std::vector<double>& values) const {
        double best = 0.0;
        for (const auto& t : terms_) {
            double prod = to_double(t.coeff);
            for (SymbolId s : t.mono.support()) prod *= std::pow(values.at(s), t.mono.exponent(s));
            best = std::max(best, std::fabs(prod));
        }
        return best;
    }

    /// Coefficients (ascending degree) of the univariate polynomial in
    /// `free` after substituting every other support symbol.
    std::vector<double> substitute_all_but(const std::map<SymbolId, double>& assignments, SymbolId free) const {
        int deg = degree_in(free);
        std::vector<double> coeffs(static_cast<std::size_t>(deg) + 1, 0.0);
        for (const auto& t : terms_) {
            double prod = to_double(t.coeff);
            for (SymbolId s : t.mono.support()) {
                if (s == free) continue;
                auto it = assignments.find(s);
                if (it == assignments.end()) throw MissingAssignment(table().info(s).name);
                prod *= std::pow(it->second, t.mono.exponent(s));
            }
            coeffs[static_cast<std::size_t>(t.mono.exponent(free))] += prod;
        }
        return coeffs;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream out;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            const Term& t = terms_[i];
            Rational c = t.coeff;
            if (i == 0) {
                if (c < 0) {
                    out << "-";
                    c = -c;
                }
            } else {
                out << (c < 0 ? " - " : " + ");
                if (c < 0) c = -c;
            }
            if (t.mono.is_unit())
                out << to_string(c);
            else if (c == 1)
                out << t.mono.str(table());
            else
                out << to_string(c) << "*" << t.mono.str(table());
        }
        return out.str();
    }

private:
    void check_context(const Polynomial& other) const {
        if (table_ != other.table_) throw ContextMismatch();
    }

    void add_term(const Rational& c, const Monomial& m) {
        if (c == 0) return;
        terms_.push_back({c, m});
    }

    /// Sort descending under the canonical order and combine duplicates.
    void normalize() {
        if (terms_.empty()) return;
        auto order = BlockLexOrder::canonical(table_->size());
        std::sort(terms_.begin(), terms_.end(),
                  [&](const Term& a, const Term& b) { return order.greater(a.mono, b.mono); });
        std::vector<Term> combined;
        combined.reserve(terms_.size());
        for (auto& t : terms_) {
            if (!combined.empty() && combined.back().mono == t.mono)
                combined.back().coeff += t.coeff;
            else
                combined.push_back(std::move(t));
        }
        terms_.clear();
        for (auto& t : combined)
            if (t.coeff != 0) terms_.push_back(std::move(t));
    }

    const SymbolTable* table_;
    std::vector<Term> terms_;
};

// ---------------------------------------------------------------------------
// Equation: homogeneous form p = 0, content-normalized for canonical text.

class Equation {
public:
    Equation() = default;

    explicit Equation(const Polynomial& p) : poly_(p.content_normalized()) {
        if (poly_.is_zero()) throw std::invalid_argument("equation from zero polynomial");
    }

    const Polynomial& poly() const { return poly_; }

    bool operator==(const Equation& other) const { return poly_ == other.poly_; }

    /// Canonical text: explicit `*` and `^`, integer coefficients,
    /// terminated `= 0`.
    std::string str() const { return poly_.str() + " = 0"; }

    static Equation parse(const std::string& text, const SymbolTable& table) {
        return Equation(parse_polynomial(text, table));
    }

    /// Parses the equation grammar; a trailing `= 0` is accepted and
    /// stripped, the right-hand side must be literally 0.
    static Polynomial parse_polynomial(const std::string& text, const SymbolTable& table);

private:
    Polynomial poly_;
};

namespace detail {

struct EqToken {
    enum Kind { Name, Integer, Plus, Minus, Star, Caret, Equals, End } kind;
    std::string text;
};

inline std::vector<EqToken> eq_tokenize(const std::string& s) {
    std::vector<EqToken> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({EqToken::Integer, s.substr(i, j - i)});
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({EqToken::Name, s.substr(i, j - i)});
            i = j;
        } else if (c == '+') {
            out.push_back({EqToken::Plus, "+"});
            ++i;
        } else if (c == '-') {
            out.push_back({EqToken::Minus, "-"});
            ++i;
        } else if (c == '*') {
            out.push_back({EqToken::Star, "*"});
            ++i;
        } else if (c == '^') {
            out.push_back({EqToken::Caret, "^"});
            ++i;
        } else if (c == '=') {
            out.push_back({EqToken::Equals, "="});
            ++i;
        } else {
            throw ParseError(std::string("unexpected character '") + c + "' in equation");
        }
    }
    out.push_back({EqToken::End, ""});
    return out;
}

}  // namespace detail

inline Polynomial Equation::parse_polynomial(const std::string& text, const SymbolTable& table) {
    using detail::EqToken;
    auto tokens = detail::eq_tokenize(text);
    std::size_t pos = 0;
    auto peek = [&]() -> const EqToken& { return tokens[pos]; };
    auto next = [&]() -> const EqToken& { return tokens[pos++]; };

    Polynomial acc(table);
    bool first = true;
    while (true) {
        int sign = 1;
        if (peek().kind == EqToken::Plus || peek().kind == EqToken::Minus) {
            sign = next().kind == EqToken::Minus ? -1 : 1;
        } else if (!first) {
            break;
        }
        // term: [int] factor* joined by '*', or bare int
        Rational coeff = sign;
        Monomial mono(table.size());
        bool saw_any = false;
        bool expect_factor = true;
        if (peek().kind == EqToken::Integer) {
            coeff *= parse_rational(next().text);
            saw_any = true;
            if (peek().kind == EqToken::Star) {
                next();
            } else {
                expect_factor = false;
            }
        }
        while (expect_factor) {
            if (peek().kind != EqToken::Name) throw ParseError("expected symbol name in equation term");
            std::string name = next().text;
            auto id = table.find(name);
            if (!id) throw ParseError("unknown symbol in equation: " + name);
            int e = 1;
            if (peek().kind == EqToken::Caret) {
                next();
                if (peek().kind != EqToken::Integer) throw ParseError("expected integer exponent after ^");
                e = std::stoi(next().text);
                if (e < 1) throw ParseError("zero exponents are forbidden in canonical form");
            }
            mono.set_exponent(*id, mono.exponent(*id) + e);
            saw_any = true;
            if (peek().kind == EqToken::Star) {
                next();
                continue;
            }
            break;
        }
        if (!saw_any) throw ParseError("empty term in equation");
        if (coeff == 0 && !mono.is_unit()) throw ParseError("zero coefficient in equation term");
        acc = acc + Polynomial::monomial(table, coeff, mono);
        first = false;
    }
    if (peek().kind == EqToken::Equals) {
        next();
        if (peek().kind != EqToken::Integer || peek().text != "0")
            throw ParseError("equation must end with = 0");
        next();
    }
    if (peek().kind != EqToken::End) throw ParseError("trailing tokens in equation");
    if (acc.is_zero()) throw ParseError("equation parses to the zero polynomial");
    return acc;
}

}  // namespace syntheory
