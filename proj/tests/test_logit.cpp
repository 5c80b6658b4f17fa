#include <doctest.h>

#include <cmath>

#include "logit.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace catinfo;
using test::binary_schema;
using test::loglinear_probs;
using test::random_table;
using test::sample_from_probs;

TEST_CASE("model text parses, closes the hierarchy, and round-trips")
{
    Rng rng(163);
    const auto t = random_table(binary_schema({"S", "D", "A", "H"}), rng);

    const auto m = parse_logit_model("S ~ D + A + D:A", t);
    CHECK(m.target == 0);
    CHECK(m.terms.size() == 3);
    CHECK(logit_model_text(m, t.variables()) == "S ~ D + A + D:A");

    // hierarchy: D:A alone pulls in both main effects
    const auto closed = parse_logit_model("S ~ D:A", t);
    CHECK(closed.terms.size() == 3);

    const auto intercept = parse_logit_model("S ~ 1", t);
    CHECK(intercept.terms.empty());
    CHECK(logit_model_text(intercept, t.variables()) == "S ~ 1");

    CHECK_THROWS_AS(parse_logit_model("S + D", t), ParseError);
    CHECK_THROWS_AS(parse_logit_model("S ~ S", t), DomainError);
    CHECK_THROWS_AS(parse_logit_model("S ~ Q", t), SchemaError);
}

TEST_CASE("intercept-only fit on a balanced target")
{
    const ContingencyTable t(binary_schema({"S", "X"}), {25, 25, 25, 25},
                             Provenance::Observed);
    const auto fit = fit_logit(t, parse_logit_model("S ~ 1", t));
    CHECK(fit.converged);
    CHECK(fit.coefficients[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fit.log_likelihood == doctest::Approx(100.0 * std::log(0.5)).epsilon(1e-12));
    CHECK(fit.aic == -2.0 * fit.log_likelihood + 2.0);
}

TEST_CASE("one-predictor slope equals the log odds ratio")
{
    // layout (S,X) with X fastest: cells = n(S=0,X=0), n(0,1), n(1,0), n(1,1)
    const ContingencyTable t(binary_schema({"S", "X"}), {30, 20, 15, 20},
                             Provenance::Observed);
    const auto fit = fit_logit(t, parse_logit_model("S ~ X", t));
    REQUIRE(fit.converged);
    const double lor = oracle::logit_slope_2x2(30, 15, 20, 20);
    CHECK(fit.coefficients[1] == doctest::Approx(lor).epsilon(1e-8));
    CHECK(fit.coefficients[0] == doctest::Approx(std::log(15.0 / 30.0)).epsilon(1e-8));
}

TEST_CASE("df accounting for the 9- and 11-term models")
{
    Rng rng(167);
    const auto t = random_table(binary_schema({"S", "D", "A", "H", "M", "C"}), rng, 1, 9);

    const auto mi_fit =
        fit_logit(t, parse_logit_model("S ~ D + A + D:A + H + A:H + D:H + M + C", t));
    CHECK(mi_fit.n_params == 9);
    CHECK(mi_fit.n_patterns == 32);
    CHECK(mi_fit.deviance.df == 23);

    const auto aic_fit = fit_logit(
        t, parse_logit_model("S ~ D + A + D:A + H + A:H + D:H + M + M:A + M:D + C", t));
    CHECK(aic_fit.n_params == 11);
    CHECK(aic_fit.deviance.df == 21);
}

TEST_CASE("score equations vanish at the optimum")
{
    Rng rng(173);
    for (int rep = 0; rep < 10; ++rep) {
        const auto t = random_table(binary_schema({"S", "X", "Y", "Z"}), rng, 1, 30);
        const auto fit = fit_logit(t, parse_logit_model("S ~ X + Y + Z + X:Y", t));
        REQUIRE(fit.converged);

        const auto p = fitted_pattern_probabilities(t, fit);
        std::vector<double> y(8, 0.0), n(8, 0.0);
        std::vector<int> lv(4);
        for (std::size_t i = 0; i < t.n_cells(); ++i) {
            t.unravel(i, lv);
            const auto pattern = static_cast<std::size_t>(4 * lv[1] + 2 * lv[2] + lv[3]);
            n[pattern] += t.cells()[i];
            if (lv[0] == 1)
                y[pattern] += t.cells()[i];
        }
        // columns: intercept, X, Y, Z, X:Y; pattern bits are (X,Y,Z)
        const auto col_value = [&](std::size_t pattern, int col) {
            const int x = static_cast<int>(pattern >> 2) & 1;
            const int yv = static_cast<int>(pattern >> 1) & 1;
            const int z = static_cast<int>(pattern) & 1;
            switch (col) {
            case 0: return 1;
            case 1: return x;
            case 2: return yv;
            case 3: return z;
            default: return x * yv;
            }
        };
        for (int col = 0; col < 5; ++col) {
            double score = 0.0;
            for (std::size_t pattern = 0; pattern < 8; ++pattern)
                score += (y[pattern] - n[pattern] * p[pattern]) * col_value(pattern, col);
            CHECK(std::fabs(score) <= 1e-6);
        }
    }
}

TEST_CASE("aic identity is exact as computed")
{
    Rng rng(179);
    const auto t = random_table(binary_schema({"S", "X", "Y"}), rng);
    const auto fit = fit_logit(t, parse_logit_model("S ~ X + Y", t));
    CHECK(fit.aic == -2.0 * fit.log_likelihood + 2.0 * static_cast<double>(fit.n_params));
}

TEST_CASE("separation is flagged, not thrown")
{
    const ContingencyTable t(binary_schema({"S", "X"}), {40, 0, 0, 40},
                             Provenance::Observed);
    const auto fit = fit_logit(t, parse_logit_model("S ~ X", t));
    CHECK(fit.separation);
    CHECK_FALSE(fit.converged);
}

TEST_CASE("collinear design names the offending column")
{
    // Y duplicates X on every observed pattern
    std::vector<double> cells(8, 0.0);
    cells[0b000] = 20;
    cells[0b011] = 25;
    cells[0b100] = 15;
    cells[0b111] = 30;
    const ContingencyTable t(binary_schema({"S", "X", "Y"}), cells, Provenance::Observed);
    CHECK_THROWS_WITH_AS(fit_logit(t, parse_logit_model("S ~ X + Y", t)),
                         doctest::Contains("Y"), NumericError);
}

TEST_CASE("mi construction: independent target yields the intercept-only model")
{
    std::vector<double> cells(8, 300.0);
    const ContingencyTable t(binary_schema({"S", "X", "Y"}), cells, Provenance::Observed);
    const auto r = mi_logit_construct(t, 0, 0.05, 0.05);
    CHECK(r.model.terms.empty());
    CHECK(r.dropped.size() == 2);
}

TEST_CASE("mi construction recovers a main-effects-only model")
{
    Rng rng(181);
    const auto vars = binary_schema({"S", "X", "Y", "Z"});
    const auto probs = loglinear_probs(
        vars, {{1u, -0.4}, {1u | 2u, 1.1}, {1u | 4u, 0.9}, {1u | 8u, 1.3}});
    const auto t = sample_from_probs(vars, probs, 5000, rng);
    const auto r = mi_logit_construct(t, 0, 0.05, 0.05);
    REQUIRE(r.model.terms.size() == 3);
    CHECK(r.model.terms[0] == 2u);
    CHECK(r.model.terms[1] == 4u);
    CHECK(r.model.terms[2] == 8u);
    CHECK(r.dropped.empty());
}

TEST_CASE("mi construction escalates a planted target interaction")
{
    Rng rng(191);
    const auto vars = binary_schema({"S", "X", "Y"});
    // the S-X association flips with Y, so the model needs the X:Y term
    const auto probs = loglinear_probs(
        vars, {{1u | 2u, -0.9}, {1u | 4u, 0.4}, {1u | 2u | 4u, 1.9}, {2u | 4u, 0.3}});
    const auto t = sample_from_probs(vars, probs, 6000, rng);
    const auto r = mi_logit_construct(t, 0, 0.05, 0.05);
    bool has_xy = false;
    for (VarSet term : r.model.terms)
        has_xy = has_xy || term == (2u | 4u);
    CHECK(has_xy);
}

TEST_CASE("aic search stays put at a local minimum")
{
    Rng rng(193);
    const auto vars = binary_schema({"S", "X", "Y"});
    const auto probs = loglinear_probs(vars, {{1u | 2u, 1.0}, {1u | 4u, 0.8}});
    const auto t = sample_from_probs(vars, probs, 4000, rng);
    const auto base = parse_logit_model("S ~ X + Y", t);
    const auto result = aic_neighborhood_search(t, base, {2u | 4u});
    CHECK(result.steps.empty());
    CHECK(result.fit.model.terms == base.terms);
}

TEST_CASE("aic search adds a genuinely present interaction")
{
    Rng rng(197);
    const auto vars = binary_schema({"S", "X", "Y"});
    const auto probs =
        loglinear_probs(vars, {{1u | 2u, 0.7}, {1u | 4u, 0.6}, {1u | 2u | 4u, 1.4}});
    const auto t = sample_from_probs(vars, probs, 6000, rng);
    const auto base = parse_logit_model("S ~ X + Y", t);
    const auto result = aic_neighborhood_search(t, base, {2u | 4u});
    REQUIRE(result.steps.size() == 1);
    CHECK(result.steps[0].action == "add");
    CHECK(result.fit.aic < fit_logit(t, base).aic);
}

TEST_CASE("aic search validates candidate terms")
{
    Rng rng(199);
    const auto t = random_table(binary_schema({"S", "X", "Y"}), rng);
    const auto base = parse_logit_model("S ~ X", t);
    CHECK_THROWS_AS(aic_neighborhood_search(t, base, {2u | 4u}), DomainError);
    CHECK_THROWS_AS(aic_neighborhood_search(t, base, {2u}), DomainError);
}

TEST_CASE("logit and log-linear routes agree")
{
    SUBCASE("intercept-only")
    {
        Rng rng(211);
        const auto t = random_table(binary_schema({"S", "X"}), rng);
        CHECK(loglinear_equivalence_check(t, parse_logit_model("S ~ 1", t)) < 1e-8);
    }
    SUBCASE("one predictor on a 2x2")
    {
        const ContingencyTable t(binary_schema({"S", "X"}), {30, 20, 15, 20},
                                 Provenance::Observed);
        CHECK(loglinear_equivalence_check(t, parse_logit_model("S ~ X", t)) < 1e-8);
    }
    SUBCASE("random multi-predictor instances")
    {
        Rng rng(223);
        for (int rep = 0; rep < 20; ++rep) {
            const auto t = random_table(binary_schema({"S", "X", "Y", "Z"}), rng, 1, 40);
            CHECK(loglinear_equivalence_check(
                      t, parse_logit_model("S ~ X + Y + Z + X:Y", t)) < 1e-5);
        }
    }
    SUBCASE("multi-level predictor")
    {
        Rng rng(227);
        const auto t = random_table(
            test::schema_with_cards({{"S", 2}, {"X", 3}, {"Y", 2}}), rng, 1, 40);
        CHECK(loglinear_equivalence_check(t, parse_logit_model("S ~ X + Y", t)) < 1e-5);
    }
}
