#include "aoi/analytic.hpp"
#include "aoi/errors.hpp"
#include "aoi/exp_poly.hpp"

#include "support/oracles.hpp"
#include "support/quadrature.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace aoi;

namespace {

ExpSum random_sum(std::mt19937_64& rng, int max_terms = 4, int max_degree = 4)
{
    std::uniform_real_distribution<double> rate(0.1, 10.0);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_int_distribution<int> terms(1, max_terms);
    std::uniform_int_distribution<int> degree(0, max_degree);
    std::vector<ExpTerm> out;
    for (int t = terms(rng); t > 0; --t) {
        ExpTerm term;
        term.rate = rate(rng);
        term.coeffs.resize(static_cast<std::size_t>(degree(rng)) + 1);
        for (auto& c : term.coeffs)
            c = coeff(rng);
        out.push_back(std::move(term));
    }
    return ExpSum(std::move(out));
}

// Σ |a_k|·k!/c^{k+1}: the integral of the termwise absolute bound.
double absolute_scale(const ExpSum& f)
{
    double s = 0.0;
    for (const auto& t : f.terms()) {
        double m = 1.0 / t.rate;
        for (std::size_t k = 0; k < t.coeffs.size(); ++k) {
            if (k > 0)
                m *= static_cast<double>(k) / t.rate;
            s += std::abs(t.coeffs[k]) * m;
        }
    }
    return s;
}

double termwise_bound(const ExpSum& f, double x)
{
    double c_min = INFINITY;
    for (const auto& t : f.terms())
        c_min = std::min(c_min, t.rate);
    double s = 0.0;
    for (const auto& t : f.terms())
        for (std::size_t k = 0; k < t.coeffs.size(); ++k)
            s += std::abs(t.coeffs[k]) * std::pow(x, static_cast<double>(k));
    return s * std::exp(-c_min * x);
}

bool structurally_valid(const ExpSum& f)
{
    double prev = -INFINITY;
    for (const auto& t : f.terms()) {
        if (t.coeffs.empty() || !(t.rate > 0.0) || !std::isfinite(t.rate))
            return false;
        if (t.rate <= prev)
            return false;
        prev = t.rate;
    }
    return true;
}

}  // namespace

TEST_CASE("evaluate")
{
    CHECK(ExpSum::exponential(1.0, 1.0)(0.0) == 1.0);
    CHECK(evaluate(ExpSum({ExpTerm{{0.0, 1.0}, 1.0}}), 0.0) == 0.0);
    CHECK(evaluate(single_server_tail(ServerLoad(0.5, 1.0)), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ExpSum({ExpTerm{{1.0, 2.0, 3.0}, 0.5}})(2.0) ==
          doctest::Approx((1.0 + 4.0 + 12.0) * std::exp(-1.0)));
}

TEST_CASE("multiply adds rates and degrees")
{
    const auto p = multiply(ExpSum::exponential(1.0, 1.0), ExpSum::exponential(1.0, 2.0));
    REQUIRE(p.size() == 1);
    CHECK(p.terms()[0].rate == 3.0);
    CHECK(p.terms()[0].coeffs == std::vector<double>{1.0});

    const ExpSum x_exp({ExpTerm{{0.0, 1.0}, 1.0}});
    const auto sq = multiply(x_exp, x_exp);
    REQUIRE(sq.size() == 1);
    CHECK(sq.terms()[0].rate == 2.0);
    CHECK(sq.terms()[0].coeffs == std::vector<double>{0.0, 0.0, 1.0});
}

TEST_CASE("product of two tails matches pointwise square")
{
    const ServerLoad load(0.53, 1.0);
    const auto tail = single_server_tail(load);
    const auto prod = multiply(tail, tail);
    for (int i = 0; i < 20; ++i) {
        const double x = 0.5 * i;
        const double t = testing::mm1_age_tail(0.53, 1.0, x);
        CHECK(prod(x) == doctest::Approx(t * t).epsilon(1e-12));
    }
    CHECK(prod(1.0) == doctest::Approx(tail(1.0) * tail(1.0)).epsilon(1e-14));
}

TEST_CASE("canonicalize")
{
    SUBCASE("cancellation gives the zero function")
    {
        const ExpSum f({ExpTerm{{1.0}, 1.0}, ExpTerm{{-1.0}, 1.0}});
        const auto c = canonicalize(f);
        CHECK(c.empty());
        CHECK(c(3.0) == 0.0);
        CHECK(integrate(c) == 0.0);
    }
    SUBCASE("rates within tolerance merge")
    {
        const ExpSum f({ExpTerm{{1.0}, 1.0}, ExpTerm{{1.0}, 1.0 + 1e-15}});
        const auto c = canonicalize(f);
        REQUIRE(c.size() == 1);
        CHECK(c.terms()[0].rate == 1.0);
        CHECK(c.terms()[0].coeffs == std::vector<double>{2.0});
    }
    SUBCASE("rates outside tolerance stay separate")
    {
        const ExpSum f({ExpTerm{{1.0}, 1.0}, ExpTerm{{1.0}, 1.0 + 1e-9}});
        CHECK(canonicalize(f).size() == 2);
    }
    SUBCASE("trailing zero coefficients trimmed")
    {
        const auto c = canonicalize(ExpSum({ExpTerm{{1.0, 2.0}, 1.0}, ExpTerm{{0.0, -2.0}, 1.0}}));
        REQUIRE(c.size() == 1);
        CHECK(c.terms()[0].coeffs == std::vector<double>{1.0});
    }
    SUBCASE("evaluation unchanged on random sums")
    {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> xs(0.0, 20.0);
        for (int trial = 0; trial < 200; ++trial) {
            // duplicate some rates so merging actually happens
            auto f = random_sum(rng);
            std::vector<ExpTerm> terms(f.terms().begin(), f.terms().end());
            terms.push_back(ExpTerm{{0.25, -0.5}, terms.front().rate});
            f = ExpSum(terms);
            const auto c = canonicalize(f);
            CHECK(structurally_valid(c));
            const double x = xs(rng);
            CHECK(std::abs(c(x) - f(x)) <= 1e-12);
        }
    }
}

TEST_CASE("integrate")
{
    CHECK(integrate(ExpSum::exponential(1.0, 1.0)) == 1.0);
    CHECK(integrate(ExpSum({ExpTerm{{0.0, 1.0}, 1.0}})) == 1.0);
    CHECK(integrate(ExpSum({ExpTerm{{0.0, 0.0, 0.0, 1.0}, 2.0}})) == doctest::Approx(6.0 / 16.0));

    SUBCASE("symmetric tail product against quadrature")
    {
        const auto tail = single_server_tail(ServerLoad(0.53, 1.0));
        const double closed = integrate(multiply(tail, tail));
        const auto quad = testing::integrate_survival(
            [](double x) {
                const double t = testing::mm1_age_tail(0.53, 1.0, x);
                return t * t;
            });
        CHECK(std::abs(closed - 2.221055) <= 1e-5);
        CHECK(std::abs(closed - quad.value) <= 1e-9);
    }

    SUBCASE("divergent terms rejected")
    {
        CHECK_THROWS_AS(integrate(ExpSum::exponential(1.0, 0.0)), NumericalFailure);
        CHECK_THROWS_AS(integrate(ExpSum::exponential(1.0, -1.0)), NumericalFailure);
    }

    SUBCASE("malformed terms rejected at construction")
    {
        CHECK_THROWS_AS(ExpSum({ExpTerm{{}, 1.0}}), InvalidInput);
        CHECK_THROWS_AS(ExpSum({ExpTerm{{1.0}, NAN}}), InvalidInput);
    }
}

TEST_CASE("differentiate")
{
    const ExpSum f({ExpTerm{{1.0, 2.0, -0.5}, 1.5}, ExpTerm{{3.0}, 0.25}});
    const auto df = differentiate(f);
    const double h = 1e-6;
    for (double x : {0.1, 0.3, 1.0, 4.0})
        CHECK(df(x) == doctest::Approx((f(x + h) - f(x - h)) / (2 * h)).epsilon(1e-7));
    // tail density integrates to one
    CHECK(-integrate(differentiate(single_server_tail(ServerLoad(0.4, 10.0)))) ==
          doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("properties")
{
    std::mt19937_64 rng(2024);

    SUBCASE("linearity")
    {
        for (int trial = 0; trial < 100; ++trial) {
            const auto f = random_sum(rng);
            const auto g = random_sum(rng);
            const double lhs = integrate(f + g);
            const double rhs = integrate(f) + integrate(g);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * (absolute_scale(f) + absolute_scale(g)));
        }
    }

    SUBCASE("closed form matches adaptive quadrature")
    {
        for (int trial = 0; trial < 100; ++trial) {
            const auto f = random_sum(rng);
            const double x_max =
                testing::truncation_point([&](double x) { return termwise_bound(f, x); }, 1.0);
            const double scale = absolute_scale(f);
            const auto quad = testing::adaptive_integrate([&](double x) { return f(x); }, 0.0, x_max,
                                                          1e-12 * scale);
            CHECK(std::abs(integrate(f) - quad.value) <= 1e-9 * scale);
        }
    }

    SUBCASE("product consistency and closure")
    {
        std::uniform_real_distribution<double> xs(0.0, 10.0);
        for (int trial = 0; trial < 100; ++trial) {
            const auto f = random_sum(rng);
            const auto g = random_sum(rng);
            const auto fg = multiply(f, g);
            CHECK(structurally_valid(fg));
            for (int k = 0; k < 5; ++k) {
                const double x = xs(rng);
                const double expect = f(x) * g(x);
                // relative to the magnitude the summands carry at x
                const double mag = termwise_bound(f, x) * termwise_bound(g, x) + 1e-300;
                CHECK(std::abs(fg(x) - expect) <= 1e-10 * std::max(std::abs(expect), mag));
            }
        }
    }
}
