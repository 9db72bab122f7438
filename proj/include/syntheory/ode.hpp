#pragma once

// Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince) with dense output,
// and the extraction of an explicit or implicit first/second-order ODE from
// a consequence polynomial.

#include "syntheory/polynomial.hpp"
#include "syntheory/roots.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace syntheory {

struct StepSizeUnderflow : std::runtime_error {
    StepSizeUnderflow() : std::runtime_error("integration step size underflow") {}
};

struct NoRealSolutionInRegion : std::runtime_error {
    NoRealSolutionInRegion() : std::runtime_error("no real solution in the tested region") {}
};

using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// One accepted integration step with the dense-output coefficients needed
/// to evaluate the solution anywhere inside it.
struct DenseStep {
    double t0 = 0, h = 0;
    std::vector<std::array<double, 5>> cont;  // per component
};

class Trajectory {
public:
    double t_begin() const { return t_begin_; }
    double t_end() const { return t_end_; }
    std::size_t dimension() const { return dim_; }

    void sample(double t, std::span<double> y) const {
        if (steps_.empty()) throw std::logic_error("empty trajectory");
        const DenseStep* step = &steps_.back();
        for (const auto& s : steps_) {
            if (t <= s.t0 + s.h) {
                step = &s;
                break;
            }
        }
        double theta = (t - step->t0) / step->h;
        theta = std::min(std::max(theta, 0.0), 1.0);
        for (std::size_t i = 0; i < dim_; ++i) {
            const auto& c = step->cont[i];
            y[i] = c[0] + theta * (c[1] + (1 - theta) * (c[2] + theta * (c[3] + (1 - theta) * c[4])));
        }
    }

private:
    friend Trajectory integrate_rk45(const OdeRhs&, std::span<const double>, double, double, double, double);
    double t_begin_ = 0, t_end_ = 0;
    std::size_t dim_ = 0;
    std::vector<DenseStep> steps_;
};

/// Dormand-Prince 5(4) with PI-free step control and Hairer-style dense
/// output. Throws StepSizeUnderflow when the controller collapses; RHS
/// exceptions propagate to the caller.
inline Trajectory integrate_rk45(const OdeRhs& rhs, std::span<const double> y0, double t0, double t1,
                                 double rel_tol = 1e-6, double abs_tol = 1e-9) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                            d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                            d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

    const std::size_t n = y0.size();
    Trajectory out;
    out.t_begin_ = t0;
    out.t_end_ = t1;
    out.dim_ = n;

    std::vector<double> y(y0.begin(), y0.end()), ynew(n), ytmp(n);
    std::vector<std::vector<double>> k(7, std::vector<double>(n));

    double t = t0;
    double h = (t1 - t0) / 100.0;
    const double hmin = (t1 - t0) * 1e-14;
    rhs(t, y, k[0]);

    int rejects_in_a_row = 0;
    while (t < t1) {
        if (h < hmin) throw StepSizeUnderflow();
        if (t + h > t1) h = t1 - t;

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k[0][i];
        rhs(t + h / 5, ytmp, k[1]);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
        rhs(t + 3 * h / 10, ytmp, k[2]);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
        rhs(t + 4 * h / 5, ytmp, k[3]);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
        rhs(t + 8 * h / 9, ytmp, k[4]);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] =
                y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] + a65 * k[4][i]);
        rhs(t + h, ytmp, k[5]);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] + b5 * k[4][i] + b6 * k[5][i]);
        rhs(t + h, ynew, k[6]);

        double err = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double e = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] + e6 * k[5][i] +
                            e7 * k[6][i]);
            double sc = abs_tol + rel_tol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / static_cast<double>(n));
        if (!std::isfinite(err)) err = 1e10;

        if (err <= 1.0) {
            DenseStep step;
            step.t0 = t;
            step.h = h;
            step.cont.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                double ydiff = ynew[i] - y[i];
                double bspl = h * k[0][i] - ydiff;
                step.cont[i][0] = y[i];
                step.cont[i][1] = ydiff;
                step.cont[i][2] = bspl;
                step.cont[i][3] = ydiff - h * k[6][i] - bspl;
                step.cont[i][4] = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] + d5 * k[4][i] +
                                       d6 * k[5][i] + d7 * k[6][i]);
            }
            out.steps_.push_back(std::move(step));
            t += h;
            y = ynew;
            k[0] = k[6];  // FSAL
            rejects_in_a_row = 0;
            h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(err > 1e-16 ? err : 1e-16, -0.2)));
        } else {
            ++rejects_in_a_row;
            if (rejects_in_a_row > 200) throw StepSizeUnderflow();
            h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Induced ODE of a consequence polynomial.

/// Description of the ODE obtained by solving a consequence for its highest
/// order derivative. State layout: [dependent variable, first derivative]
/// for order 2, [dependent variable] for order 1; components that are not
/// table symbols are latent (integrated but not emitted).
struct InducedOde {
    SymbolId highest = 0;                 // the solved derivative symbol
    int order = 1;                        // its order
    std::optional<SymbolId> first_deriv;  // the order-1 symbol when order == 2 and it exists
    std::optional<SymbolId> dependent;    // a Variable named like the dependent, if in support
    bool linear = false;                  // q linear in `highest`
    Polynomial linear_num;                // highest = -linear_num / linear_den when linear
    Polynomial linear_den;
    Polynomial q;                         // full polynomial, for the implicit path
};

/// Variant with the solved derivative fixed by the caller (the biased
/// system path may face basis polynomials touching several dependents).
inline InducedOde induced_ode_for(const Polynomial& q, const SymbolTable& table, SymbolId highest) {
    if (table.info(highest).kind != SymbolKind::Derivatif)
        throw std::invalid_argument("induced_ode_for: not a derivative");
    InducedOde ode;
    ode.highest = highest;
    ode.order = table.info(highest).deriv->order;
    ode.q = q;
    const std::string& dep = table.info(highest).deriv->dependent;

    if (ode.order == 2) {
        for (SymbolId s = 0; s < table.size(); ++s) {
            const auto& info = table.info(s);
            if (info.kind == SymbolKind::Derivatif && info.deriv->order == 1 && info.deriv->dependent == dep)
                ode.first_deriv = s;
        }
    }
    if (auto dep_id = table.find(dep); dep_id && table.info(*dep_id).kind == SymbolKind::Variable &&
                                       q.support().count(*dep_id))
        ode.dependent = dep_id;

    // split q = den * highest + num when linear in the highest derivative
    if (q.degree_in(highest) == 1) {
        ode.linear = true;
        Polynomial num(table), den(table);
        for (const auto& t : q.terms()) {
            if (t.mono.exponent(highest) == 1) {
                Monomial m = t.mono;
                m.set_exponent(highest, 0);
                den = den + Polynomial::monomial(table, t.coeff, m);
            } else {
                num = num + Polynomial::monomial(table, t.coeff, t.mono);
            }
        }
        ode.linear_num = num;
        ode.linear_den = den;
    }
    return ode;
}

/// Identifies the highest-order derivative and the state variables. The
/// consequence filters guarantee a single dependent variable among
/// derivative factors.
inline InducedOde induced_ode(const Polynomial& q, const SymbolTable& table) {
    std::optional<SymbolId> highest;
    for (SymbolId s : q.support()) {
        if (table.info(s).kind != SymbolKind::Derivatif) continue;
        int order = table.info(s).deriv->order;
        if (!highest || order > table.info(*highest).deriv->order) highest = s;
    }
    if (!highest) throw std::invalid_argument("induced_ode: no derivative in the polynomial");
    return induced_ode_for(q, table, *highest);
}

/// Value of the highest derivative at the given symbol assignment: the
/// closed form when linear, otherwise the first real root of the univariate
/// polynomial in the derivative. Throws NoRealSolutionInRegion when none
/// exists or the equation degenerates.
inline double resolve_highest_derivative(const InducedOde& ode, const std::map<SymbolId, double>& values) {
    if (ode.linear) {
        double den = ode.linear_den.evaluate_at(values);
        double num = ode.linear_num.evaluate_at(values);
        if (std::fabs(den) < 1e-12 * (1.0 + std::fabs(num))) throw NoRealSolutionInRegion();
        return -num / den;
    }
    auto coeffs = ode.q.substitute_all_but(values, ode.highest);
    std::optional<double> root;
    try {
        root = solve_last_variable(coeffs);
    } catch (const DegenerateLeadingCoefficient&) {
        throw NoRealSolutionInRegion();
    }
    if (!root) throw NoRealSolutionInRegion();
    return *root;
}

}  // namespace syntheory
