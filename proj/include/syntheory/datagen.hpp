#pragma once

// Numeric dataset synthesis. Consequence data comes from the root path
// (sample all but one column, solve the last variable) or the ODE path
// (integrate the induced ODE and extract a consistent state/derivative
// pair). Whole-system data walks a full-lex Groebner basis in increasing
// leading-indeterminate order. Noise is injected per column under three
// distribution families, all scaled from sigma = epsilon * |column mean|.

#include "syntheory/consequence.hpp"
#include "syntheory/ode.hpp"
#include "syntheory/roots.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace syntheory {

struct UnsolvableConsequence : std::runtime_error {
    UnsolvableConsequence() : std::runtime_error("consequence has no solvable plain variable") {}
};

struct SampleRange {
    int n = 1;
    int m = 2;
    double lo() const { return n; }
    double hi() const { return m; }
};

/// Uniform over the 45 integer pairs 1 <= n < m <= 10.
inline SampleRange sample_range(RngStream& rng) {
    std::uint64_t idx = rng.uniform_below(45);
    for (int n = 1; n <= 9; ++n) {
        std::uint64_t count = static_cast<std::uint64_t>(10 - n);
        if (idx < count) return SampleRange{n, n + 1 + static_cast<int>(idx)};
        idx -= count;
    }
    return SampleRange{9, 10};  // unreachable
}

enum class ColumnRole { Sampled, Solved, Derivative, Constant, ThetaDerived };

inline std::string to_string(ColumnRole r) {
    switch (r) {
        case ColumnRole::Sampled: return "sampled";
        case ColumnRole::Solved: return "solved";
        case ColumnRole::Derivative: return "derivative";
        case ColumnRole::Constant: return "constant";
        case ColumnRole::ThetaDerived: return "theta-derived";
    }
    return "?";
}

inline ColumnRole column_role_from_string(const std::string& s) {
    if (s == "sampled") return ColumnRole::Sampled;
    if (s == "solved") return ColumnRole::Solved;
    if (s == "derivative") return ColumnRole::Derivative;
    if (s == "constant") return ColumnRole::Constant;
    if (s == "theta-derived") return ColumnRole::ThetaDerived;
    throw std::invalid_argument("unknown column role: " + s);
}

struct DataTable {
    std::vector<std::string> columns;
    std::vector<ColumnRole> roles;
    std::vector<std::vector<double>> rows;

    std::size_t column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw std::out_of_range("no such column: " + name);
    }

    double column_mean(std::size_t c) const {
        double acc = 0;
        for (const auto& r : rows) acc += r[c];
        return rows.empty() ? 0.0 : acc / static_cast<double>(rows.size());
    }

    std::map<SymbolId, double> row_assignment(const SymbolTable& table, std::size_t r) const {
        std::map<SymbolId, double> out;
        for (std::size_t c = 0; c < columns.size(); ++c) out[table.require(columns[c])] = rows[r][c];
        return out;
    }

    bool operator==(const DataTable& other) const = default;
};

enum class NoiseFamily { Gaussian, Exponential, LogNormal };

inline std::string to_string(NoiseFamily f) {
    switch (f) {
        case NoiseFamily::Gaussian: return "gaussian";
        case NoiseFamily::Exponential: return "exponential";
        case NoiseFamily::LogNormal: return "lognormal";
    }
    return "?";
}

inline NoiseFamily noise_family_from_string(const std::string& s) {
    if (s == "gaussian") return NoiseFamily::Gaussian;
    if (s == "exponential") return NoiseFamily::Exponential;
    if (s == "lognormal") return NoiseFamily::LogNormal;
    throw std::invalid_argument("unknown noise family: " + s);
}

struct NoiseSpec {
    NoiseFamily family = NoiseFamily::Gaussian;
    double epsilon = 1e-3;  // in (0, 1]
};

inline std::vector<double> default_consequence_noise_levels() { return {1e-3, 1e-2, 5e-2, 1e-1}; }
inline std::vector<double> default_system_noise_levels() { return {1e-4, 1e-3, 1e-2, 1e-1}; }

/// Log-normal shape parameter: s with (e^{s^2}-1) e^{s^2} = 2 sigma^2,
/// via u = e^{s^2} = (1 + sqrt(1 + 8 sigma^2)) / 2.
inline double lognormal_shape(double sigma) {
    double u = (1.0 + std::sqrt(1.0 + 8.0 * sigma * sigma)) / 2.0;
    return std::sqrt(std::log(u));
}

enum class NoiseMode { AllColumns, LastColumn };

/// Adds noise per affected column. sigma = epsilon * |clean column mean|;
/// exponential magnitudes use rate 1/sigma with a fair-coin sign,
/// log-normal magnitudes use lognormal(0, s) with the matched variance and
/// a fair-coin sign. Constant columns are never touched.
inline DataTable apply_noise(const DataTable& data, const NoiseSpec& spec, NoiseMode mode, RngStream& rng) {
    DataTable out = data;
    for (std::size_t c = 0; c < data.columns.size(); ++c) {
        if (data.roles[c] == ColumnRole::Constant) continue;
        if (mode == NoiseMode::LastColumn && data.roles[c] != ColumnRole::Solved) continue;
        double sigma = spec.epsilon * std::fabs(data.column_mean(c));
        if (sigma <= 0.0) continue;
        for (auto& row : out.rows) {
            switch (spec.family) {
                case NoiseFamily::Gaussian: row[c] += rng.normal(0.0, sigma); break;
                case NoiseFamily::Exponential: {
                    double mag = rng.exponential(1.0 / sigma);
                    row[c] += rng.coin() ? mag : -mag;
                    break;
                }
                case NoiseFamily::LogNormal: {
                    double mag = rng.lognormal(0.0, lognormal_shape(sigma));
                    row[c] += rng.coin() ? mag : -mag;
                    break;
                }
            }
        }
    }
    return out;
}

struct DatagenOptions {
    int point_attempts = 100;        // resamples allowed per data point
    double value_bound = 1e6;        // reasonable physical bounds
    double ode_rel_tol = 1e-10;
    double ode_abs_tol = 1e-12;
    double residual_tol = 1e-8;      // internal acceptance for generated rows
    double transient_cutoff = 0.1;   // extraction time drawn from [cutoff, 1]
};

namespace datadetail {

struct ThetaChain {
    std::optional<SymbolId> theta, sin, cos, exp;
    bool any() const { return theta || sin || cos || exp; }
};

inline ThetaChain theta_chain_in(const std::set<SymbolId>& symbols, const SymbolTable& table) {
    ThetaChain chain;
    for (SymbolId s : symbols) {
        const auto& info = table.info(s);
        if (info.kind != SymbolKind::ThetaAux) continue;
        switch (*info.theta) {
            case ThetaKind::Theta: chain.theta = s; break;
            case ThetaKind::Sin: chain.sin = s; break;
            case ThetaKind::Cos: chain.cos = s; break;
            case ThetaKind::Exp: chain.exp = s; break;
        }
    }
    return chain;
}

inline void assign_theta(const ThetaChain& chain, double theta, std::map<SymbolId, double>& values) {
    if (chain.theta) values[*chain.theta] = theta;
    if (chain.sin) values[*chain.sin] = std::sin(theta);
    if (chain.cos) values[*chain.cos] = std::cos(theta);
    if (chain.exp) values[*chain.exp] = std::exp(theta);
}

inline bool within_bounds(double v, const DatagenOptions& opts) {
    return std::isfinite(v) && std::fabs(v) <= opts.value_bound;
}

inline ColumnRole role_of(SymbolKind kind) {
    switch (kind) {
        case SymbolKind::Derivatif: return ColumnRole::Derivative;
        case SymbolKind::PhysicalConstant:
        case SymbolKind::MathematicalConstant: return ColumnRole::Constant;
        case SymbolKind::ThetaAux: return ColumnRole::ThetaDerived;
        default: return ColumnRole::Sampled;
    }
}

inline void assign_constants(const SymbolTable& table, const std::set<SymbolId>& symbols,
                             std::map<SymbolId, double>& values) {
    for (SymbolId s : symbols) {
        const auto& info = table.info(s);
        if (info.kind == SymbolKind::PhysicalConstant) values[s] = 1.0;
        if (info.kind == SymbolKind::MathematicalConstant) values[s] = *info.value;
    }
}

}  // namespace datadetail

/// Noise-free data for a consequence: 1000 (or `points`) rows over the
/// consequence's support, exactly satisfying the polynomial.
inline DataTable gen_consequence_data(const Consequence& q, const SymbolTable& table, int points,
                                      RngStream& rng, const DatagenOptions& opts = {}) {
    const Polynomial& poly = q.polynomial.poly();
    std::set<SymbolId> support = poly.support();

    DataTable out;
    std::vector<SymbolId> column_ids(support.begin(), support.end());
    for (SymbolId s : column_ids) {
        out.columns.push_back(table.info(s).name);
        out.roles.push_back(datadetail::role_of(table.info(s).kind));
    }

    bool has_derivative = false;
    for (SymbolId s : column_ids)
        if (table.info(s).kind == SymbolKind::Derivatif) has_derivative = true;

    auto chain = datadetail::theta_chain_in(support, table);

    // ranges: one per sampled column, drawn up front; internal ranges for a
    // latent theta and for ODE initial conditions
    std::map<SymbolId, SampleRange> ranges;
    for (SymbolId s : column_ids) {
        const auto& info = table.info(s);
        if (is_constant_kind(info.kind)) continue;
        ranges[s] = sample_range(rng);
    }
    SampleRange latent_theta_range = sample_range(rng);
    SampleRange ic_range = sample_range(rng);
    SampleRange ic_range2 = sample_range(rng);

    auto sample_theta = [&](std::map<SymbolId, double>& values) {
        if (!chain.any()) return;
        SampleRange r = chain.theta && ranges.count(*chain.theta) ? ranges[*chain.theta] : latent_theta_range;
        datadetail::assign_theta(chain, rng.uniform_real(r.lo(), r.hi()), values);
    };

    if (!has_derivative) {
        // root path: solve the last plain variable
        std::optional<SymbolId> target;
        for (SymbolId s : column_ids)
            if (table.info(s).kind == SymbolKind::Variable && poly.degree_in(s) >= 1) target = s;
        if (!target) throw UnsolvableConsequence();
        out.roles[static_cast<std::size_t>(
            std::find(column_ids.begin(), column_ids.end(), *target) - column_ids.begin())] =
            ColumnRole::Solved;

        for (int point = 0; point < points; ++point) {
            bool accepted = false;
            for (int attempt = 0; attempt < opts.point_attempts && !accepted; ++attempt) {
                std::map<SymbolId, double> values;
                datadetail::assign_constants(table, support, values);
                sample_theta(values);
                for (SymbolId s : column_ids) {
                    if (values.count(s) || s == *target) continue;
                    SampleRange r = ranges.at(s);
                    values[s] = rng.uniform_real(r.lo(), r.hi());
                }
                std::optional<double> solved;
                try {
                    solved = solve_last_variable(poly.substitute_all_but(values, *target));
                } catch (const DegenerateLeadingCoefficient&) {
                    continue;
                }
                if (!solved || !datadetail::within_bounds(*solved, opts)) continue;
                values[*target] = *solved;
                if (poly.relative_residual(values) > opts.residual_tol) continue;
                std::vector<double> row;
                row.reserve(column_ids.size());
                for (SymbolId s : column_ids) row.push_back(values.at(s));
                out.rows.push_back(std::move(row));
                accepted = true;
            }
            if (!accepted) throw NoRealSolutionInRegion();
        }
        return out;
    }

    // ODE path
    InducedOde ode = induced_ode(poly, table);
    for (int point = 0; point < points; ++point) {
        bool accepted = false;
        for (int attempt = 0; attempt < opts.point_attempts && !accepted; ++attempt) {
            std::map<SymbolId, double> values;
            datadetail::assign_constants(table, support, values);
            sample_theta(values);
            for (SymbolId s : column_ids) {
                const auto& info = table.info(s);
                if (values.count(s) || info.kind == SymbolKind::Derivatif) continue;
                if (ode.dependent && s == *ode.dependent) continue;  // integrated, not sampled
                SampleRange r = ranges.at(s);
                values[s] = rng.uniform_real(r.lo(), r.hi());
            }

            const bool second_order = ode.order == 2;
            std::size_t dim = second_order ? 2 : 1;
            std::vector<double> y0(dim);
            {
                SampleRange r0 = ode.dependent && ranges.count(*ode.dependent) ? ranges[*ode.dependent]
                                                                               : ic_range;
                y0[0] = rng.uniform_real(r0.lo(), r0.hi());
                if (second_order) {
                    SampleRange r1 = ode.first_deriv && ranges.count(*ode.first_deriv)
                                         ? ranges[*ode.first_deriv]
                                         : ic_range2;
                    y0[1] = rng.uniform_real(r1.lo(), r1.hi());
                }
            }

            auto rhs = [&](double, std::span<const double> y, std::span<double> dydt) {
                std::map<SymbolId, double> local = values;
                if (ode.dependent) local[*ode.dependent] = y[0];
                if (second_order) {
                    if (ode.first_deriv) local[*ode.first_deriv] = y[1];
                    dydt[0] = y[1];
                    dydt[1] = resolve_highest_derivative(ode, local);
                } else {
                    dydt[0] = resolve_highest_derivative(ode, local);
                }
            };

            double tau = rng.uniform_real(opts.transient_cutoff, 1.0);
            try {
                Trajectory traj = integrate_rk45(rhs, y0, 0.0, 1.0, opts.ode_rel_tol, opts.ode_abs_tol);
                std::vector<double> y_tau(dim);
                traj.sample(tau, y_tau);
                if (ode.dependent) values[*ode.dependent] = y_tau[0];
                if (second_order && ode.first_deriv) values[*ode.first_deriv] = y_tau[1];
                std::map<SymbolId, double> local = values;
                if (ode.dependent) local[*ode.dependent] = y_tau[0];
                if (second_order && ode.first_deriv) local[*ode.first_deriv] = y_tau[1];
                values[ode.highest] = resolve_highest_derivative(ode, local);
            } catch (const NoRealSolutionInRegion&) {
                continue;
            } catch (const StepSizeUnderflow&) {
                continue;
            }

            bool ok = true;
            for (SymbolId s : column_ids)
                if (!values.count(s) || !datadetail::within_bounds(values.at(s), opts)) ok = false;
            if (!ok) continue;
            if (poly.relative_residual(values) > opts.residual_tol) continue;
            std::vector<double> row;
            row.reserve(column_ids.size());
            for (SymbolId s : column_ids) row.push_back(values.at(s));
            out.rows.push_back(std::move(row));
            accepted = true;
        }
        if (!accepted) throw NoRealSolutionInRegion();
    }
    return out;
}

/// Whole-system data: walk the reduced full-lex basis in increasing
/// leading-indeterminate order; per polynomial sample every not-yet
/// assigned support symbol but one and solve that one, co-generating
/// same-dependent derivative pairs through the ODE path. Rows cover every
/// table symbol and satisfy every axiom.
inline DataTable gen_biased_system_data(const TheorySystem& system, int points, RngStream& rng,
                                        const DatagenOptions& opts = {}) {
    const SymbolTable& table = system.symbols();
    auto order = BlockLexOrder::canonical(table.size());
    GroebnerBasis gb = buchberger(system.axiom_polys(), order, system.config.groebner);
    if (!gb.is_consistent()) throw Inconsistent();

    std::vector<Polynomial> basis;
    for (const auto& g : gb.generators())
        basis.push_back(g.divide_by_monomial(g.monomial_content()).content_normalized());

    std::set<SymbolId> all_symbols;
    for (SymbolId s = 0; s < table.size(); ++s) all_symbols.insert(s);
    auto chain = datadetail::theta_chain_in(all_symbols, table);

    DataTable out;
    for (SymbolId s = 0; s < table.size(); ++s) {
        out.columns.push_back(table.info(s).name);
        out.roles.push_back(datadetail::role_of(table.info(s).kind));
    }

    std::map<SymbolId, SampleRange> ranges;
    for (SymbolId s = 0; s < table.size(); ++s)
        if (!is_constant_kind(table.info(s).kind)) ranges[s] = sample_range(rng);
    SampleRange ic_range = sample_range(rng);

    std::set<std::size_t> solved_columns;  // filled on the first accepted row

    for (int point = 0; point < points; ++point) {
        bool accepted = false;
        for (int attempt = 0; attempt < opts.point_attempts && !accepted; ++attempt) {
            std::map<SymbolId, double> values;
            datadetail::assign_constants(table, all_symbols, values);
            if (chain.any()) {
                SampleRange r = chain.theta ? ranges.at(*chain.theta) : ic_range;
                datadetail::assign_theta(chain, rng.uniform_real(r.lo(), r.hi()), values);
            }
            std::set<std::size_t> solved_this_row;
            bool failed = false;

            for (const auto& g : basis) {
                auto support = g.support();
                std::vector<SymbolId> unassigned;
                for (SymbolId s : support)
                    if (!values.count(s)) unassigned.push_back(s);

                if (unassigned.empty()) {
                    if (g.relative_residual(values) > opts.residual_tol) failed = true;
                    if (failed) break;
                    continue;
                }

                // same-dependent derivative pair both free: ODE co-generation
                std::optional<SymbolId> d2, d1;
                for (SymbolId s : unassigned) {
                    const auto& info = table.info(s);
                    if (info.kind != SymbolKind::Derivatif) continue;
                    if (info.deriv->order == 2) d2 = s;
                }
                if (d2) {
                    const std::string& dep = table.info(*d2).deriv->dependent;
                    for (SymbolId s : unassigned) {
                        const auto& info = table.info(s);
                        if (info.kind == SymbolKind::Derivatif && info.deriv->order == 1 &&
                            info.deriv->dependent == dep)
                            d1 = s;
                    }
                }

                try {
                    if (d2 && d1) {
                        InducedOde ode = induced_ode_for(g, table, *d2);
                        bool track_dependent = ode.dependent && !values.count(*ode.dependent);
                        for (SymbolId s : unassigned) {
                            if (s == *d2 || s == *d1) continue;
                            if (track_dependent && s == *ode.dependent) continue;
                            values[s] = rng.uniform_real(ranges.at(s).lo(), ranges.at(s).hi());
                        }
                        std::vector<double> y0{
                            rng.uniform_real(ic_range.lo(), ic_range.hi()),
                            rng.uniform_real(ranges.at(*d1).lo(), ranges.at(*d1).hi())};
                        auto rhs = [&](double, std::span<const double> y, std::span<double> dydt) {
                            std::map<SymbolId, double> local = values;
                            if (track_dependent) local[*ode.dependent] = y[0];
                            local[*d1] = y[1];
                            dydt[0] = y[1];
                            dydt[1] = resolve_highest_derivative(ode, local);
                        };
                        Trajectory traj =
                            integrate_rk45(rhs, y0, 0.0, 1.0, opts.ode_rel_tol, opts.ode_abs_tol);
                        double tau = rng.uniform_real(opts.transient_cutoff, 1.0);
                        std::vector<double> y_tau(2);
                        traj.sample(tau, y_tau);
                        if (track_dependent) values[*ode.dependent] = y_tau[0];
                        values[*d1] = y_tau[1];
                        std::map<SymbolId, double> local = values;
                        values[*d2] = resolve_highest_derivative(ode, local);
                        solved_this_row.insert(static_cast<std::size_t>(*d2));
                    } else {
                        // algebraic: solve the largest unassigned indeterminate
                        SymbolId target = *std::min_element(unassigned.begin(), unassigned.end());
                        for (SymbolId s : unassigned) {
                            if (s == target) continue;
                            values[s] = rng.uniform_real(ranges.at(s).lo(), ranges.at(s).hi());
                        }
                        auto solved = solve_last_variable(g.substitute_all_but(values, target));
                        if (!solved || !datadetail::within_bounds(*solved, opts)) {
                            failed = true;
                            break;
                        }
                        values[target] = *solved;
                        solved_this_row.insert(static_cast<std::size_t>(target));
                    }
                } catch (const NoRealSolutionInRegion&) {
                    failed = true;
                    break;
                } catch (const StepSizeUnderflow&) {
                    failed = true;
                    break;
                } catch (const DegenerateLeadingCoefficient&) {
                    failed = true;
                    break;
                }
            }
            if (failed) continue;

            // free symbols never constrained by the basis
            for (SymbolId s = 0; s < table.size(); ++s)
                if (!values.count(s)) values[s] = rng.uniform_real(ranges.at(s).lo(), ranges.at(s).hi());

            bool ok = true;
            for (SymbolId s = 0; s < table.size(); ++s)
                if (!datadetail::within_bounds(values.at(s), opts)) ok = false;
            if (ok)
                for (const auto& axiom : system.axioms)
                    if (axiom.poly().relative_residual(values) > opts.residual_tol) ok = false;
            if (!ok) continue;

            std::vector<double> row;
            row.reserve(table.size());
            for (SymbolId s = 0; s < table.size(); ++s) row.push_back(values.at(s));
            out.rows.push_back(std::move(row));
            if (out.rows.size() == 1) solved_columns = solved_this_row;
            accepted = true;
        }
        if (!accepted) throw NoRealSolutionInRegion();
    }

    for (std::size_t c : solved_columns)
        if (out.roles[c] == ColumnRole::Sampled) out.roles[c] = ColumnRole::Solved;
    return out;
}

}  // namespace syntheory
