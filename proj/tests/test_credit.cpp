#include <doctest.h>

#include <random>

#include "gcl_oracle.hpp"
#include "tsnnc/credit.hpp"

using namespace tsnnc;

namespace {

Rational us(long v) { return rat(v, 1000000); }

OutputPort port_with(std::vector<StWindow> windows, Rational period = us(100))
{
    OutputPort p;
    p.id = "p";
    p.rate = 100000000;
    p.gcl_period = period;
    p.windows = std::move(windows);
    p.idle_slopes = {40000000};
    return p;
}

// Dominance of sigma + rho t over a staircase sum, checked at every step
// (right limit) and grid point on [0, 3P].
void check_dominates(const StaircaseSum& s, const GbEnvelope& env)
{
    Curve f = staircase_curve(s);
    Rational P = s.terms.empty() ? Rational(1) : s.terms.front().period;
    std::vector<Rational> ts;
    for (Rational t = 0; t <= 3 * P; t += P / 64)
        ts.push_back(t);
    for (const auto& term : s.terms)
        for (int k = 0; k < 3; ++k)
            ts.push_back(term.offset + k * P);
    for (const Rational& t : ts) {
        if (t < 0)
            continue;
        REQUIRE(f(t) <= env.sigma + env.rho * t);
        REQUIRE(f.right_limit(t) <= env.sigma + env.rho * t);
    }
}

}  // namespace

TEST_CASE("credit lower bound")
{
    CHECK(credit_lower_bound(10000, 100000000, -60000000) == -6000);
    CHECK(credit_lower_bound(0, 100000000, -60000000) == 0);
    CHECK(credit_lower_bound(12000, 100000000, 40000000 - 100000000) == -7200);
}

TEST_CASE("credit upper bound")
{
    Rational C = 100000000;
    Rational idle = 40000000;
    CHECK(credit_upper_bound(idle, C, 0, 0, 10000, CreditMode::Frozen, {0, 0}) == 4000);
    CHECK(credit_upper_bound(idle, C, 0, 0, 10000, CreditMode::NonFrozen, {1000, 12500000}) ==
          rat(176000, 35));
    CHECK(credit_upper_bound(idle, C, 0, 0, 0, CreditMode::NonFrozen, {0, 0}) == 0);
    CHECK_THROWS_AS(credit_upper_bound(idle, C, 0, 60000000, 0, CreditMode::NonFrozen, {0, 50000000}),
                    ValidationError);

    std::mt19937 rng(3);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    for (int i = 0; i < 500; ++i) {
        Rational higher_idle = rat(pick(0, 50), 100) * C;
        Rational gb_rho = rat(pick(0, 40), 100) * C;
        if (higher_idle + gb_rho >= C)
            continue;
        Rational c_min_sum = -pick(0, 20000);
        Rational l_gt = pick(0, 12336);
        GbEnvelope gb{pick(0, 5000), gb_rho};
        Rational s = rat(pick(1, 40), 100) * C;
        Rational f = credit_upper_bound(s, C, c_min_sum, higher_idle, l_gt, CreditMode::Frozen, gb);
        Rational nf = credit_upper_bound(s, C, c_min_sum, higher_idle, l_gt, CreditMode::NonFrozen, gb);
        REQUIRE(f >= 0);
        REQUIRE(nf >= f);
    }
}

TEST_CASE("linear envelope of staircase sums")
{
    StaircaseSum one{{{1000, 0, us(80)}}, 0};
    GbEnvelope e = linear_envelope(one);
    CHECK(e.rho == 12500000);
    CHECK(e.sigma == 1000);
    check_dominates(one, e);

    StaircaseSum none{{}, 0};
    CHECK(linear_envelope(none).sigma == 0);
    CHECK(linear_envelope(none).rho == 0);

    StaircaseSum two{{{500, 0, us(80)}, {500, us(40), us(80)}}, 0};
    GbEnvelope e2 = linear_envelope(two);
    CHECK(e2.rho == rat(1000, 1) / us(80));
    CHECK(e2.sigma == 500);
    check_dominates(two, e2);
}

TEST_CASE("guard band staircase examples")
{
    OutputPort p = port_with({{us(50), us(20)}});
    auto sums = gb_staircases(p, {us(10)});
    REQUIRE(sums.size() == 1);
    REQUIRE(sums[0].terms.size() == 1);
    CHECK(sums[0].terms[0].height == 1000);
    CHECK(sums[0].terms[0].period == us(80));
    // ceil((t + 30us) / 80us) folds to 1 + ceil((t - 50us) / 80us).
    CHECK(sums[0].terms[0].offset == us(50));
    CHECK(sums[0].constant == 1000);
    GbEnvelope env = gb_linear_envelope(p, {us(10)});
    CHECK(env.sigma == 1375);
    CHECK(env.rho == 12500000);

    CHECK(gb_staircase_bound(port_with({}), {}) == make_zero());
    CHECK(gb_linear_envelope(port_with({}), {}).sigma == 0);

    OutputPort sym = port_with({{0, us(20)}, {us(50), us(20)}});
    auto refs = gb_staircases(sym, {us(10), us(10)});
    CHECK(staircase_curve(refs[0]) == staircase_curve(refs[1]));

    CHECK_THROWS(gb_staircases(port_with({{0, us(100)}}), {0}));
}

TEST_CASE("guard band bound dominates simulated guard band accumulation")
{
    std::mt19937 rng(5);
    int checked = 0;
    for (int iter = 0; iter < 40; ++iter) {
        OutputPort p = gcl::random_port(rng);
        if (p.windows.empty())
            continue;
        std::vector<Rational> gb;
        for (std::size_t k = 0; k < p.windows.size(); ++k)
            gb.push_back(std::min(us(std::uniform_int_distribution<int>(1, 30)(rng)), p.gap_before(k)));
        Curve bound = gb_staircase_bound(p, gb);
        GbEnvelope env = gb_linear_envelope(p, gb);
        for (const StaircaseSum& s : gb_staircases(p, gb))
            check_dominates(s, env);

        gcl::Periodic guard = gcl::guard_time(p, gb);
        gcl::Periodic st = gcl::st_time(p);
        Rational step = p.gcl_period / 50;
        for (Rational s = 0; s < p.gcl_period; s += step / 3) {
            for (Rational t = step; t <= 2 * p.gcl_period; t += step) {
                Rational u = t - st.measure(s, t);
                Rational g = p.rate * guard.measure(s, t);
                REQUIRE(g <= bound(u));
                REQUIRE(g <= env.sigma + env.rho * u);
            }
        }
        ++checked;
    }
    CHECK(checked > 20);
}
