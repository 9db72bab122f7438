#include "syntheory/datagen.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace syntheory;

namespace {

SymbolTable kepler_table() {
    return SymbolTable::parse_spec(
        "w var 1/s\n"
        "m1 var kg\n"
        "m2 var kg\n"
        "d1 var m\n"
        "d2 var m\n"
        "Fg var kg*m/s^2\n"
        "G const m^3/kg*s^2\n");
}

TheorySystem kepler_system(const SymbolTable& t) {
    TheorySystem s;
    s.table = &t;
    s.axioms = {Equation::parse("d1*m1 - d2*m2 = 0", t),
                Equation::parse("Fg*d1^2 + 2*Fg*d1*d2 + Fg*d2^2 - G*m1*m2 = 0", t),
                Equation::parse("Fg - m2*d2*w^2 = 0", t)};
    return s;
}

Consequence kepler_consequence(const SymbolTable& t, const TheorySystem& system) {
    ConsequenceConfig cfg;
    std::set<SymbolId> measured{t.require("d1"), t.require("d2"), t.require("m1"), t.require("w"),
                                t.require("G")};
    auto result = consequence_for_measured(system, measured, cfg);
    REQUIRE(result.status == ConsequenceStatus::Accepted);
    return *result.value;
}

}  // namespace

TEST_CASE("sample_range constraints and distribution") {
    RngStream rng(123);
    for (int i = 0; i < 100000; ++i) {
        SampleRange r = sample_range(rng);
        CHECK(r.n >= 1);
        CHECK(r.n < r.m);
        CHECK(r.m <= 10);
    }
    std::map<std::pair<int, int>, int> counts;
    RngStream rng2(456);
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        SampleRange r = sample_range(rng2);
        ++counts[{r.n, r.m}];
    }
    CHECK(counts.size() == 45);
    for (const auto& [pair, count] : counts)
        CHECK(std::fabs(static_cast<double>(count) / n - 1.0 / 45) < 0.005);

    RngStream a(9), b(9);
    for (int i = 0; i < 1000; ++i) {
        SampleRange ra = sample_range(a), rb = sample_range(b);
        CHECK(ra.n == rb.n);
        CHECK(ra.m == rb.m);
    }
}

TEST_CASE("solve_last_variable follows the first-real-root rule") {
    // v^2 - 4: roots {-2, 2}, tie broken positive
    auto tie = solve_last_variable(std::vector<double>{-4, 0, 1});
    REQUIRE(tie.has_value());
    CHECK(std::fabs(*tie - 2.0) < 1e-9);
    CHECK(*tie > 0);
    // v^2 + 1: no real root
    CHECK_FALSE(solve_last_variable(std::vector<double>{1, 0, 1}).has_value());
    // v^3 - 6 v^2 + 11 v - 6 = (v-1)(v-2)(v-3): largest magnitude is 3
    auto r = solve_last_variable(std::vector<double>{-6, 11, -6, 1});
    REQUIRE(r.has_value());
    CHECK(std::fabs(*r - 3.0) < 1e-9);
    // degenerate leading coefficient
    CHECK_THROWS_AS(polynomial_roots(std::vector<double>{1.0, 1e-15}), DegenerateLeadingCoefficient);
}

TEST_CASE("rk45 integrates the calibration problems") {
    auto constant = [](double, std::span<const double>, std::span<double> d) { d[0] = 1.0; };
    std::vector<double> y0{0.0};
    Trajectory t1 = integrate_rk45(constant, y0, 0, 1, 1e-6, 1e-9);
    std::vector<double> y(1);
    t1.sample(1.0, y);
    CHECK(std::fabs(y[0] - 1.0) <= 1e-9);

    auto growth = [](double, std::span<const double> s, std::span<double> d) { d[0] = s[0]; };
    std::vector<double> y1{1.0};
    Trajectory t2 = integrate_rk45(growth, y1, 0, 1, 1e-6, 1e-9);
    t2.sample(1.0, y);
    CHECK(std::fabs(y[0] - std::exp(1.0)) <= 1e-6 * std::exp(1.0));

    auto oscillator = [](double, std::span<const double> s, std::span<double> d) {
        d[0] = s[1];
        d[1] = -s[0];
    };
    std::vector<double> y2{1.0, 0.0};
    Trajectory t3 = integrate_rk45(oscillator, y2, 0, 1, 1e-8, 1e-12);
    std::vector<double> yc(2);
    t3.sample(1.0, yc);
    CHECK(std::fabs(yc[0] - std::cos(1.0)) <= 1e-6);
    // dense output mid-interval
    t3.sample(0.5, yc);
    CHECK(std::fabs(yc[0] - std::cos(0.5)) <= 1e-5);
}

TEST_CASE("induced_ode isolates the highest derivative") {
    SymbolTable t = SymbolTable::parse_spec(
        "x var m\n"
        "w var 1/s^2\n"
        "dxdt deriv m/s x t 1\n"
        "d2xdt2 deriv m/s^2 x t 2\n");
    // dx/dt - x = 0: linear, f(x) = x
    Polynomial q1 = Equation::parse_polynomial("dxdt - x", t);
    InducedOde o1 = induced_ode(q1, t);
    CHECK(o1.order == 1);
    CHECK(o1.linear);
    CHECK(o1.dependent == t.find("x"));
    CHECK(resolve_highest_derivative(o1, {{t.require("x"), 2.0}}) == 2.0);

    // d2x/dt2 + w*x = 0: second order, f = -w*x
    Polynomial q2 = Equation::parse_polynomial("d2xdt2 + w*x", t);
    InducedOde o2 = induced_ode(q2, t);
    CHECK(o2.order == 2);
    CHECK(o2.first_deriv == t.find("dxdt"));
    double f = resolve_highest_derivative(o2, {{t.require("x"), 3.0}, {t.require("w"), 2.0}});
    CHECK(std::fabs(f + 6.0) < 1e-12);

    // (dx/dt)^2 - x = 0: implicit, first real root picks +sqrt(x)
    Polynomial q3 = Equation::parse_polynomial("dxdt^2 - x", t);
    InducedOde o3 = induced_ode(q3, t);
    CHECK_FALSE(o3.linear);
    double g = resolve_highest_derivative(o3, {{t.require("x"), 4.0}});
    CHECK(std::fabs(g - 2.0) < 1e-9);
}

TEST_CASE("consequence data via the root path") {
    SymbolTable t = kepler_table();
    TheorySystem system = kepler_system(t);
    Consequence q = kepler_consequence(t, system);

    RngStream rng(1001);
    DataTable data = gen_consequence_data(q, t, 500, rng);
    REQUIRE(data.rows.size() == 500);
    REQUIRE(data.columns.size() == q.polynomial.poly().support().size());

    std::size_t g_col = data.column_index("G");
    CHECK(data.roles[g_col] == ColumnRole::Constant);
    for (std::size_t r = 0; r < data.rows.size(); ++r) {
        CHECK(data.rows[r][g_col] == 1.0);
        auto values = data.row_assignment(t, r);
        CHECK(q.polynomial.poly().relative_residual(values) < 1e-6);
        for (double v : data.rows[r]) {
            CHECK(std::isfinite(v));
            CHECK(std::fabs(v) <= 1e6);
        }
    }
    // exactly one solved column, and sampled columns sit inside [1, 10]
    int solved = 0;
    for (std::size_t c = 0; c < data.columns.size(); ++c) {
        if (data.roles[c] == ColumnRole::Solved) ++solved;
        if (data.roles[c] == ColumnRole::Sampled)
            for (const auto& row : data.rows) {
                CHECK(row[c] >= 1.0);
                CHECK(row[c] <= 10.0);
            }
    }
    CHECK(solved == 1);

    // bit-exact determinism
    RngStream rng2(1001);
    DataTable again = gen_consequence_data(q, t, 500, rng2);
    CHECK(data == again);
}

TEST_CASE("theta auxiliaries are computed, not sampled") {
    SymbolTable t = SymbolTable::parse_spec(
        "x var m\n"
        "y var m\n"
        "theta theta 1\n"
        "sin_theta sin 1\n"
        "cos_theta cos 1\n");
    // x*sin^2 + x*cos^2 + theta - y = 0, solvable for y
    Polynomial p = Equation::parse_polynomial(
        "x*sin_theta^2 + x*cos_theta^2 + theta - y", t);
    Consequence q{Equation(p), Monomial(t.size()), MeasuredSet::from_ids(p.support(), t), 0, {}};
    RngStream rng(7);
    DataTable data = gen_consequence_data(q, t, 200, rng);
    std::size_t sin_col = data.column_index("sin_theta");
    std::size_t cos_col = data.column_index("cos_theta");
    std::size_t theta_col = data.column_index("theta");
    for (const auto& row : data.rows) {
        double s = row[sin_col], c = row[cos_col], th = row[theta_col];
        CHECK(std::fabs(s * s + c * c - 1.0) < 1e-12);
        CHECK(std::fabs(s - std::sin(th)) < 1e-12);
        CHECK(std::fabs(c - std::cos(th)) < 1e-12);
    }
}

TEST_CASE("consequence data via the ODE path") {
    SymbolTable t = SymbolTable::parse_spec(
        "x var m\n"
        "w var 1/s^2\n"
        "dxdt deriv m/s x t 1\n"
        "d2xdt2 deriv m/s^2 x t 2\n");

    // second order, linear: d2x/dt2 + w*x = 0
    Polynomial p = Equation::parse_polynomial("d2xdt2 + w*x", t);
    Consequence q{Equation(p), Monomial(t.size()), MeasuredSet::from_ids(p.support(), t), 0, {}};
    RngStream rng(5);
    DataTable data = gen_consequence_data(q, t, 100, rng);
    REQUIRE(data.rows.size() == 100);
    for (std::size_t r = 0; r < data.rows.size(); ++r) {
        auto values = data.row_assignment(t, r);
        CHECK(p.relative_residual(values) < 1e-4);
    }

    // implicit in the derivative: dxdt^2 - x = 0
    Polynomial p2 = Equation::parse_polynomial("dxdt^2 - x", t);
    Consequence q2{Equation(p2), Monomial(t.size()), MeasuredSet::from_ids(p2.support(), t), 0, {}};
    RngStream rng2(6);
    DataTable data2 = gen_consequence_data(q2, t, 50, rng2);
    for (std::size_t r = 0; r < data2.rows.size(); ++r) {
        auto values = data2.row_assignment(t, r);
        CHECK(p2.relative_residual(values) < 1e-4);
    }
}

TEST_CASE("noise calibration per family") {
    // a plain table with a single data column of mean ~5
    DataTable clean;
    clean.columns = {"v"};
    clean.roles = {ColumnRole::Sampled};
    RngStream fill(3);
    for (int i = 0; i < 1000; ++i) clean.rows.push_back({fill.uniform_real(4.0, 6.0)});
    double mean = clean.column_mean(0);

    auto sd_of_diff = [&](const DataTable& noisy) {
        double acc = 0, acc2 = 0;
        for (std::size_t r = 0; r < clean.rows.size(); ++r) {
            double d = noisy.rows[r][0] - clean.rows[r][0];
            acc += d;
            acc2 += d * d;
        }
        double n = static_cast<double>(clean.rows.size());
        double m = acc / n;
        return std::make_pair(m, std::sqrt(acc2 / n - m * m));
    };

    const double eps = 0.05;
    const double sigma = eps * std::fabs(mean);

    RngStream rng(42);
    auto gauss = apply_noise(clean, {NoiseFamily::Gaussian, eps}, NoiseMode::AllColumns, rng);
    auto [gm, gsd] = sd_of_diff(gauss);
    CHECK(std::fabs(gsd - sigma) < 0.10 * sigma);

    // sign-flipped exponential with rate 1/sigma has sd sqrt(2)*sigma
    auto expo = apply_noise(clean, {NoiseFamily::Exponential, eps}, NoiseMode::AllColumns, rng);
    auto [em, esd] = sd_of_diff(expo);
    CHECK(std::fabs(esd - std::sqrt(2.0) * sigma) < 0.10 * std::sqrt(2.0) * sigma);
    CHECK(std::fabs(em) < 3.0 * esd / std::sqrt(1000.0));

    // sign-flipped lognormal has sd u = e^{s^2}
    double u = (1.0 + std::sqrt(1.0 + 8.0 * sigma * sigma)) / 2.0;
    double s = lognormal_shape(sigma);
    CHECK(std::fabs((std::exp(s * s) - 1.0) * std::exp(s * s) - 2.0 * sigma * sigma) < 1e-12);
    auto logn = apply_noise(clean, {NoiseFamily::LogNormal, eps}, NoiseMode::AllColumns, rng);
    auto [lm, lsd] = sd_of_diff(logn);
    CHECK(std::fabs(lsd - u) < 0.10 * u);
    CHECK(std::fabs(lm) < 3.0 * lsd / std::sqrt(1000.0));
}

TEST_CASE("noise leaves constant columns alone and respects last-column mode") {
    DataTable clean;
    clean.columns = {"G", "x", "y"};
    clean.roles = {ColumnRole::Constant, ColumnRole::Sampled, ColumnRole::Solved};
    for (int i = 0; i < 100; ++i) clean.rows.push_back({1.0, 2.0 + i * 0.01, 3.0});

    RngStream rng(11);
    DataTable all = apply_noise(clean, {NoiseFamily::Gaussian, 0.1}, NoiseMode::AllColumns, rng);
    DataTable last = apply_noise(clean, {NoiseFamily::Gaussian, 0.1}, NoiseMode::LastColumn, rng);
    bool x_changed = false;
    for (std::size_t r = 0; r < clean.rows.size(); ++r) {
        CHECK(all.rows[r][0] == 1.0);
        CHECK(last.rows[r][0] == 1.0);
        CHECK(last.rows[r][1] == clean.rows[r][1]);  // sampled column untouched in last-column mode
        if (all.rows[r][1] != clean.rows[r][1]) x_changed = true;
    }
    CHECK(x_changed);
}

TEST_CASE("biased system data satisfies every axiom") {
    SymbolTable t = kepler_table();
    TheorySystem system = kepler_system(t);
    RngStream rng(2024);
    DataTable data = gen_biased_system_data(system, 300, rng);
    REQUIRE(data.rows.size() == 300);
    REQUIRE(data.columns.size() == t.size());

    std::size_t g_col = data.column_index("G");
    for (std::size_t r = 0; r < data.rows.size(); ++r) {
        CHECK(data.rows[r][g_col] == 1.0);
        auto values = data.row_assignment(t, r);
        for (const auto& axiom : system.axioms) CHECK(axiom.poly().relative_residual(values) < 1e-6);
    }

    // determinism
    RngStream rng2(2024);
    DataTable again = gen_biased_system_data(system, 300, rng2);
    CHECK(data == again);

    // data from the original system violates a replacement axiom
    Equation replacement = Equation::parse("Fg*d1 + d1^2*m1*w^2 - Fg*d2 - d2^2*m1*w^2 = 0", t);
    int violations = 0;
    for (std::size_t r = 0; r < data.rows.size(); ++r) {
        auto values = data.row_assignment(t, r);
        if (replacement.poly().relative_residual(values) > 1e-5) ++violations;
    }
    CHECK(violations >= static_cast<int>(0.99 * static_cast<double>(data.rows.size())));
}

TEST_CASE("biased system data with coupled derivatives") {
    SymbolTable t = SymbolTable::parse_spec(
        "a var m\n"
        "b var m\n"
        "dxdt deriv m/s x t 1\n"
        "d2xdt2 deriv m/s^2 x t 2\n");
    TheorySystem system;
    system.table = &t;
    // one axiom couples both derivatives, one fixes b against a
    system.axioms = {Equation::parse("d2xdt2*a - dxdt*b = 0", t),
                     Equation::parse("a*b - 4 = 0", t)};
    RngStream rng(88);
    DataTable data = gen_biased_system_data(system, 100, rng);
    REQUIRE(data.rows.size() == 100);
    for (std::size_t r = 0; r < data.rows.size(); ++r) {
        auto values = data.row_assignment(t, r);
        for (const auto& axiom : system.axioms) CHECK(axiom.poly().relative_residual(values) < 1e-6);
    }
}
