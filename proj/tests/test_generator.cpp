#include "syntheory/consequence.hpp"
#include "syntheory/generator.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace syntheory;

namespace {

const char* kUniverseSpec = R"(
Fc var kg*m/s^2
Fg var kg*m/s^2
W var kg*m^2/s^2
m1 var kg
m2 var kg
d1 var m
d2 var m
p var kg*m/s
dx1dt deriv m/s x1 t 1
d2x1dt2 deriv m/s^2 x1 t 2
dx2dt deriv m/s x2 t 1
d2x2dt2 deriv m/s^2 x2 t 2
G const m^3/kg*s^2
c const m/s
)";

const char* kTrigSpec = R"(
W var kg*m^2/s^2
m1 var kg
d1 var m
theta theta 1
sin_theta sin 1
cos_theta cos 1
dx1dt deriv m/s x1 t 1
c const m/s
)";

SymbolTable universe() { return SymbolTable::parse_spec(kUniverseSpec); }

}  // namespace

TEST_CASE("term factor-count frequencies match the renormalized table") {
    SymbolTable t = universe();
    GeneratorConfig cfg;
    RngStream rng(1);
    const int n = 100000;
    std::map<int, int> factor_counts;
    std::map<int, int> coeff_counts;
    for (int i = 0; i < n; ++i) {
        Term term = gen_term(cfg, t, rng);
        ++factor_counts[term.mono.num_factors()];
        ++coeff_counts[static_cast<int>(num(term.coeff))];
        // hard constraints
        int derivs = 0;
        for (SymbolId s : term.mono.support()) {
            CHECK(term.mono.exponent(s) <= cfg.max_power);
            if (t.info(s).kind == SymbolKind::Derivatif) ++derivs;
        }
        CHECK(derivs <= 1);
        CHECK(term.mono.num_factors() <= 4);
    }
    double renorm = 0.246 + 0.413 + 0.225 + 0.088;
    std::vector<double> expected{0.246 / renorm, 0.413 / renorm, 0.225 / renorm, 0.088 / renorm};
    for (int k = 1; k <= 4; ++k) {
        double freq = static_cast<double>(factor_counts[k]) / n;
        CHECK(std::fabs(freq - expected[static_cast<std::size_t>(k - 1)]) < 0.01);
    }
    std::vector<double> cprobs{0.82, 0.07, 0.06, 0.05};
    for (int c = 1; c <= 4; ++c) {
        double freq = static_cast<double>(coeff_counts[c]) / n;
        CHECK(std::fabs(freq - cprobs[static_cast<std::size_t>(c - 1)]) < 0.01);
    }
}

TEST_CASE("uom dictionary counts match the closed form and brute force") {
    // 3 constant-free variables, max_factors=2, max_power=2: 3*2 + 3*4 = 18
    SymbolTable t3 = SymbolTable::parse_spec("x var m\ny var s\nz var kg\n");
    GeneratorConfig cfg;
    cfg.max_factors = 2;
    cfg.max_power = 2;
    UomTermDict dict = build_uom_term_dict(cfg, t3);
    CHECK(dict.total_terms == 18);
    CHECK(uom_primitive_term_count(3, 0, 2, 2) == 18);

    // the closed form matches exhaustive enumeration with derivatives mixed in
    SymbolTable t5 = SymbolTable::parse_spec(
        "x var m\ny var s\ndxdt deriv m/s x t 1\ndydt deriv s/s y t 1\nG const m^3/kg*s^2\n");
    for (int mf = 1; mf <= 4; ++mf)
        for (int mp = 1; mp <= 3; ++mp) {
            GeneratorConfig c2;
            c2.max_factors = mf;
            c2.max_power = mp;
            UomTermDict d2 = build_uom_term_dict(c2, t5);
            CHECK(d2.total_terms == uom_primitive_term_count(3, 2, mf, mp));
        }
}

TEST_CASE("uom dictionary bucket invariants") {
    SymbolTable t = universe();
    GeneratorConfig cfg;
    cfg.max_factors = 3;
    UomTermDict dict = build_uom_term_dict(cfg, t);
    for (const auto& [dim, monos] : dict.buckets) {
        for (const auto& m : monos) {
            CHECK(dim_of_monomial(m, t) == dim);
            CHECK(m.num_factors() <= cfg.max_factors);
            int derivs = 0;
            for (SymbolId s : m.support()) {
                CHECK(m.exponent(s) >= 1);
                CHECK(m.exponent(s) <= cfg.max_power);
                if (t.info(s).kind == SymbolKind::Derivatif) ++derivs;
            }
            CHECK(derivs <= 1);
        }
    }
}

TEST_CASE("uom enumeration bound and cap") {
    CHECK(uom_enumeration_bound(20, 4, 3) == 1240320);
    SymbolTable t = universe();
    GeneratorConfig cfg;
    cfg.uom_enumeration_cap = 10;
    CHECK_THROWS_AS(build_uom_term_dict(cfg, t), BudgetExceeded);
}

TEST_CASE("dimensionless bucket holds the theta closure") {
    SymbolTable t = SymbolTable::parse_spec("theta theta 1\nsin_theta sin 1\nd1 var m\n");
    GeneratorConfig cfg;
    cfg.max_factors = 2;
    cfg.max_power = 3;
    UomTermDict dict = build_uom_term_dict(cfg, t);
    const auto* bucket = dict.bucket(Dimension::dimensionless());
    REQUIRE(bucket != nullptr);
    auto contains = [&](const std::string& text) {
        Polynomial p = Equation::parse_polynomial(text, t);
        for (const auto& m : *bucket)
            if (m == p.leading_term().mono) return true;
        return false;
    };
    CHECK(contains("theta"));
    CHECK(contains("theta^2"));
    CHECK(contains("theta^3"));
    CHECK(contains("sin_theta"));
    CHECK(contains("theta*sin_theta"));
    CHECK_FALSE(contains("d1"));
}

TEST_CASE("vdc dictionary totals and determinism") {
    SymbolTable t = universe();
    GeneratorConfig cfg;
    RngStream a(7), b(7);
    VdcSigDict da = build_vdc_dict(cfg, t, a);
    VdcSigDict db = build_vdc_dict(cfg, t, b);
    CHECK(da.total == 10000);
    CHECK(da.counts == db.counts);

    SymbolTable single = SymbolTable::parse_spec("x var m\n");
    RngStream r(3);
    VdcSigDict ds = build_vdc_dict(cfg, single, r);
    for (const auto& [sig, count] : ds.counts) {
        REQUIRE(sig.size() >= 3);
        CHECK(sig.substr(sig.size() - 2) == "..");
        int k = std::stoi(sig.substr(0, sig.size() - 2));
        CHECK(k >= 1);
        CHECK(k <= cfg.max_power);
    }
}

TEST_CASE("free equations: sanity checks and sign statistics") {
    SymbolTable t = universe();
    GeneratorConfig cfg;
    cfg.dimensional_mode = false;
    RngStream rng(42);
    const int n = 10000;
    int all_positive = 0;
    std::map<std::size_t, int> term_counts;
    for (int i = 0; i < n; ++i) {
        Equation eq = gen_equation_free(cfg, t, rng);
        const auto& terms = eq.poly().terms();
        ++term_counts[terms.size()];
        // rejected patterns never appear
        std::vector<Monomial> monos;
        for (const auto& term : terms) monos.push_back(term.mono);
        for (std::size_t a = 0; a < monos.size(); ++a)
            for (std::size_t b = a + 1; b < monos.size(); ++b) CHECK_FALSE(monos[a] == monos[b]);
        CHECK_FALSE(has_common_factor(monos));
        CHECK_FALSE((terms.size() == 2 && monos[0].num_factors() == 1 && monos[1].num_factors() == 1));
        bool uniform_signs = true;
        for (const auto& term : terms)
            if ((term.coeff < 0) != (terms.front().coeff < 0)) uniform_signs = false;
        if (uniform_signs) ++all_positive;
    }
    double all_pos_rate = static_cast<double>(all_positive) / n;
    CHECK(std::fabs(all_pos_rate - 0.05) < 0.01);
    std::vector<double> expected{0.0, 0.6, 0.29, 0.09, 0.03};
    for (std::size_t k = 1; k <= 5; ++k) {
        double freq = static_cast<double>(term_counts[k]) / n;
        CHECK(std::fabs(freq - expected[k - 1]) < 0.02);
    }
}

TEST_CASE("sign rule: a uniformly signed prefix forces the last term") {
    // statistical consequence of the rule: a non-all-positive equation never
    // has uniform signs, so uniform-sign frequency equals prob_all_positive
    SymbolTable t = universe();
    GeneratorConfig cfg;
    cfg.dimensional_mode = false;
    cfg.prob_all_positive = 0.0;
    RngStream rng(11);
    for (int i = 0; i < 2000; ++i) {
        Equation eq = gen_equation_free(cfg, t, rng);
        const auto& terms = eq.poly().terms();
        bool uniform = true;
        for (const auto& term : terms)
            if ((term.coeff < 0) != (terms.front().coeff < 0)) uniform = false;
        CHECK_FALSE(uniform);
    }
}

TEST_CASE("dimensional equations are homogeneous") {
    SymbolTable t = universe();
    GeneratorConfig cfg;
    DictCache cache;
    auto uom = cache.uom(cfg, t);
    auto vdc = cache.vdc(cfg, t);
    RngStream rng(5);
    for (int i = 0; i < 1000; ++i) {
        Equation eq = gen_equation_dim(cfg, t, *uom, *vdc, rng);
        Dimension d0 = dim_of_monomial(eq.poly().terms().front().mono, t);
        for (const auto& term : eq.poly().terms()) {
            CHECK(dim_of_monomial(term.mono, t) == d0);
            int derivs = 0;
            for (SymbolId s : term.mono.support())
                if (t.info(s).kind == SymbolKind::Derivatif) ++derivs;
            CHECK(derivs <= 1);
        }
    }
}

TEST_CASE("weighted candidate drawing follows signature frequencies") {
    // candidates with frequency counts (25, 50, 50, 100) are first-drawn
    // with probabilities (1/9, 2/9, 2/9, 4/9)
    RngStream rng(99);
    std::vector<double> weights{25, 50, 50, 100};
    std::vector<int> hits(4, 0);
    const int n = 90000;
    for (int i = 0; i < n; ++i) ++hits[rng.weighted_index(weights)];
    std::vector<double> expected{1.0 / 9, 2.0 / 9, 2.0 / 9, 4.0 / 9};
    for (int k = 0; k < 4; ++k)
        CHECK(std::fabs(static_cast<double>(hits[static_cast<std::size_t>(k)]) / n -
                        expected[static_cast<std::size_t>(k)]) < 0.01);
}

TEST_CASE("required symbol lands in the equation") {
    SymbolTable t = universe();
    GeneratorConfig cfg;
    DictCache cache;
    auto uom = cache.uom(cfg, t);
    auto vdc = cache.vdc(cfg, t);
    RngStream rng(17);
    SymbolId w = t.require("W");
    for (int i = 0; i < 50; ++i) {
        Equation eq = gen_equation_dim(cfg, t, *uom, *vdc, rng, w);
        CHECK(eq.poly().support().count(w) == 1);
    }
}

TEST_CASE("system generation: coverage, dedup, consistency, trig identity") {
    SymbolTable t = SymbolTable::parse_spec(kTrigSpec);
    GeneratorConfig cfg;
    cfg.seed = 12345;
    DictCache cache;
    auto uom = cache.uom(cfg, t);
    auto vdc = cache.vdc(cfg, t);

    TheorySystem system = [&]() {
        for (std::uint64_t attempt = 0;; ++attempt) {
            RngStream rng(derive_seed(cfg.seed, {attempt}));
            try {
                return gen_system(cfg, t, 3, *uom, *vdc, rng);
            } catch (const Inconsistent&) {
            } catch (const ExhaustedAttempts&) {
            }
        }
    }();

    CHECK(system.includes_trig_identity);
    Equation trig = trig_identity_equation(t);
    CHECK(system.axioms.back() == trig);
    CHECK(system.axioms.size() == 4);  // 3 generated + identity
    for (std::size_t i = 0; i < system.axioms.size(); ++i)
        for (std::size_t j = i + 1; j < system.axioms.size(); ++j)
            CHECK_FALSE(system.axioms[i] == system.axioms[j]);

    auto gb = buchberger(system.axiom_polys(), BlockLexOrder::canonical(t.size()));
    CHECK(gb.is_consistent());
    for (const auto& a : system.axioms) CHECK(normal_form(a.poly(), gb).is_zero());

    // dimensional mode: same-dimension generated axioms use disjoint
    // variable/derivative sets (the trig identity is exempt)
    for (std::size_t i = 0; i + 1 < system.axioms.size(); ++i)
        for (std::size_t j = i + 1; j + 1 < system.axioms.size(); ++j) {
            Dimension di = dim_of_monomial(system.axioms[i].poly().leading_term().mono, t);
            Dimension dj = dim_of_monomial(system.axioms[j].poly().leading_term().mono, t);
            if (di == dj) {
                bool overlap = false;
                auto si = system.axioms[i].poly().support();
                for (SymbolId s : system.axioms[j].poly().support())
                    if (!is_constant_kind(t.info(s).kind) && si.count(s)) overlap = true;
                CHECK_FALSE(overlap);
            }
        }
}

TEST_CASE("system generation is deterministic in (config, table, seed)") {
    SymbolTable t = universe();
    GeneratorConfig cfg;
    cfg.seed = 777;
    DictCache cache;
    auto uom = cache.uom(cfg, t);
    auto vdc = cache.vdc(cfg, t);
    auto run = [&]() {
        RngStream rng(cfg.seed);
        return gen_system(cfg, t, 4, *uom, *vdc, rng);
    };
    TheorySystem a = run();
    TheorySystem b = run();
    REQUIRE(a.axioms.size() == b.axioms.size());
    for (std::size_t i = 0; i < a.axioms.size(); ++i) CHECK(a.axioms[i] == b.axioms[i]);
}

TEST_CASE("single equation system over a single variable") {
    SymbolTable t = SymbolTable::parse_spec("x var m\n");
    GeneratorConfig cfg;
    cfg.dimensional_mode = false;
    RngStream rng(4);
    UomTermDict uom;
    VdcSigDict vdc;
    TheorySystem s = gen_system(cfg, t, 1, uom, vdc, rng);
    CHECK(s.axioms.size() == 1);
    CHECK(s.axioms[0].poly().support().count(t.require("x")) == 1);
}

TEST_CASE("uom dictionary cache hit counter") {
    SymbolTable t = universe();
    GeneratorConfig cfg;
    DictCache cache;
    auto first = cache.uom(cfg, t);
    CHECK(cache.uom_hits() == 0);
    auto second = cache.uom(cfg, t);
    CHECK(cache.uom_hits() == 1);
    CHECK(first.get() == second.get());
}

TEST_CASE("replacement axioms on the kepler system") {
    SymbolTable t = SymbolTable::parse_spec(
        "w var 1/s\n"
        "m1 var kg\n"
        "m2 var kg\n"
        "d1 var m\n"
        "d2 var m\n"
        "Fg var kg*m/s^2\n"
        "G const m^3/kg*s^2\n");
    GeneratorConfig cfg;
    cfg.seed = 31415;
    TheorySystem system;
    system.table = &t;
    system.config = cfg;
    system.axioms = {Equation::parse("d1*m1 - d2*m2 = 0", t),
                     Equation::parse("Fg*d1^2 + 2*Fg*d1*d2 + Fg*d2^2 - G*m1*m2 = 0", t),
                     Equation::parse("Fg - m2*d2*w^2 = 0", t)};

    DictCache cache;
    auto uom = cache.uom(cfg, t);
    auto vdc = cache.vdc(cfg, t);
    RngStream rng(2);

    // the consequence of this system over {d1,d2,m1,w,G}, lifted by its cofactor
    ConsequenceConfig ccfg;
    std::set<SymbolId> measured{t.require("d1"), t.require("d2"), t.require("m1"), t.require("w"),
                                t.require("G")};
    auto derived = consequence_for_measured(system, measured, ccfg);
    REQUIRE(derived.status == ConsequenceStatus::Accepted);
    Polynomial lifted = derived.value->polynomial.poly().times_term(1, derived.value->cofactor);

    const std::size_t index = 2;  // the axiom that alone carries w
    Equation replacement = gen_replacement_axiom(system, index, lifted, *uom, *vdc, rng);

    // contains w (used solely by the replaced axiom)
    CHECK(replacement.poly().support().count(t.require("w")) == 1);
    // dimensionally homogeneous
    Dimension d0 = dim_of_monomial(replacement.poly().terms().front().mono, t);
    for (const auto& term : replacement.poly().terms()) CHECK(dim_of_monomial(term.mono, t) == d0);
    // not equal to the removed axiom
    CHECK_FALSE(replacement == system.axioms[index]);

    std::vector<Polynomial> replaced;
    for (std::size_t j = 0; j < system.axioms.size(); ++j)
        replaced.push_back(j == index ? replacement.poly() : system.axioms[j].poly());
    auto order = BlockLexOrder::canonical(t.size());
    auto gb_new = buchberger(replaced, order);
    CHECK(gb_new.is_consistent());
    // the original consequence is no longer derivable
    CHECK_FALSE(normal_form(lifted, gb_new).is_zero());
    CHECK_FALSE(normal_form(derived.value->polynomial.poly(), gb_new).is_zero());
    // and the replacement is not a consequence of the remaining axioms
    std::vector<Polynomial> remaining{system.axioms[0].poly(), system.axioms[1].poly()};
    auto gb_rem = buchberger(remaining, order);
    CHECK_FALSE(normal_form(replacement.poly(), gb_rem).is_zero());
}
