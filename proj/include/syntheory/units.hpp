#pragma once

// Units of measure as rational exponent vectors over named base units.
// A Dimension is canonical (no zero exponents stored); the empty map is the
// dimensionless dimension. Derived-unit aliases (N = kg*m/s^2) are display
// sugar only; comparisons always use the reduced vector.

#include "syntheory/rational.hpp"

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace syntheory {

struct UnitParseError : std::runtime_error {
    explicit UnitParseError(const std::string& what) : std::runtime_error(what) {}
};

class Dimension {
public:
    Dimension() = default;

    static Dimension dimensionless() { return Dimension{}; }

    static Dimension base(const std::string& name) {
        if (name.empty()) throw UnitParseError("empty base unit name");
        Dimension d;
        d.exps_[name] = 1;
        return d;
    }

    bool is_dimensionless() const { return exps_.empty(); }

    const std::map<std::string, Rational>& exponents() const { return exps_; }

    Rational exponent_of(const std::string& name) const {
        auto it = exps_.find(name);
        return it == exps_.end() ? Rational(0) : it->second;
    }

    friend Dimension dim_mul(const Dimension& a, const Dimension& b) {
        Dimension out = a;
        for (const auto& [name, e] : b.exps_) {
            Rational sum = out.exponent_of(name) + e;
            if (sum == 0)
                out.exps_.erase(name);
            else
                out.exps_[name] = sum;
        }
        return out;
    }

    friend Dimension dim_pow(const Dimension& a, long long k) {
        Dimension out;
        if (k == 0) return out;
        for (const auto& [name, e] : a.exps_) out.exps_[name] = e * k;
        return out;
    }

    friend Dimension dim_inv(const Dimension& a) { return dim_pow(a, -1); }

    bool operator==(const Dimension& other) const = default;
    auto operator<=>(const Dimension& other) const = default;

    /// Text form: `kg^2*m^2/s^4`, `1` when dimensionless. A single `/`
    /// separates the positive-exponent factors from the rest.
    std::string str() const {
        if (exps_.empty()) return "1";
        std::ostringstream numer, denom;
        bool have_numer = false, have_denom = false;
        for (const auto& [name, e] : exps_) {
            if (e > 0) {
                if (have_numer) numer << "*";
                numer << name;
                if (e != 1) numer << "^" << to_string(e);
                have_numer = true;
            } else {
                Rational p = -e;
                if (have_denom) denom << "*";
                denom << name;
                if (p != 1) denom << "^" << to_string(p);
                have_denom = true;
            }
        }
        std::string out = have_numer ? numer.str() : "1";
        if (have_denom) out += "/" + denom.str();
        return out;
    }

    /// Parses `kg*m/s^2` (one optional `/`; everything after it is
    /// inverted), `1` or empty for dimensionless. Exponents are integers
    /// or `p/q` is not accepted here: generated content only uses ints.
    static Dimension parse(const std::string& text) {
        Dimension out;
        std::string s = trimmed(text);
        if (s.empty() || s == "1" || s == "-") return out;
        auto slash = s.find('/');
        if (slash != std::string::npos && s.find('/', slash + 1) != std::string::npos)
            throw UnitParseError("more than one '/' in unit: " + text);
        std::string numer = slash == std::string::npos ? s : s.substr(0, slash);
        std::string denom = slash == std::string::npos ? "" : s.substr(slash + 1);
        parse_product(numer, 1, out);
        if (slash != std::string::npos) parse_product(denom, -1, out);
        return out;
    }

private:
    static std::string trimmed(const std::string& s) {
        auto b = s.find_first_not_of(" \t");
        if (b == std::string::npos) return "";
        auto e = s.find_last_not_of(" \t");
        return s.substr(b, e - b + 1);
    }

    static void parse_product(const std::string& s, int sign, Dimension& out) {
        if (s.empty()) throw UnitParseError("empty unit factor list");
        std::size_t pos = 0;
        while (pos <= s.size()) {
            auto star = s.find('*', pos);
            std::string factor = trimmed(s.substr(pos, star == std::string::npos ? std::string::npos : star - pos));
            parse_factor(factor, sign, out);
            if (star == std::string::npos) break;
            pos = star + 1;
        }
    }

    static void parse_factor(const std::string& f, int sign, Dimension& out) {
        if (f.empty()) throw UnitParseError("empty unit factor");
        if (f == "1") return;
        auto caret = f.find('^');
        std::string name = f.substr(0, caret);
        long long e = 1;
        if (caret != std::string::npos) {
            try {
                std::size_t used = 0;
                e = std::stoll(f.substr(caret + 1), &used);
                if (used != f.size() - caret - 1) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw UnitParseError("bad exponent in unit factor: " + f);
            }
        }
        if (name.empty()) throw UnitParseError("missing base unit name in: " + f);
        for (char c : name)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
                throw UnitParseError("bad base unit name: " + name);
        Rational sum = out.exponent_of(name) + Rational(e * sign);
        if (sum == 0)
            out.exps_.erase(name);
        else
            out.exps_[name] = sum;
    }

    std::map<std::string, Rational> exps_;
};

}  // namespace syntheory
