#include <doctest.h>

#include <random>
#include <sstream>

#include "oracle.hpp"
#include "tsnnc/curve.hpp"

using namespace tsnnc;

namespace {

Rational us(long v) { return rat(v, 1000000); }

std::vector<Rational> half_grid(long upto)
{
    return oracle::grid(0, upto, Rational(1, 2));
}

}  // namespace

TEST_CASE("evaluate constructors")
{
    CHECK(make_affine(1000, 1000000)(rat(1, 1000)) == 2000);
    CHECK(make_rate_latency(10000000, us(100))(us(100)) == 0);
    Curve st = make_staircase({2000, 0, us(100)});
    CHECK(st(us(100) + rat(1, 1000000000)) == 4000);
    CHECK(st(us(100)) == 2000);
    CHECK(st.right_limit(0) == 2000);
    CHECK(st(0) == 0);
    CHECK(make_rate_latency(10000000, 0) == make_affine(0, 10000000));
    CHECK_THROWS_AS(make_affine(1, 1)(-1), std::domain_error);
    CHECK_THROWS(make_affine(-1, 1));
    CHECK_THROWS(make_staircase({1, 0, 0}));
}

TEST_CASE("burst delay sentinel")
{
    Curve d = make_burst_delay(3);
    CHECK(d(3) == 0);
    CHECK(d.is_infinite_at(rat(301, 100)));
    CHECK_THROWS_AS(d(4), std::domain_error);
    Curve f = make_affine(5, 2);
    // Identity for deconvolution when D = 0.
    CHECK(deconvolve(f, make_burst_delay(0)) == f);
    // sum with infinity stays infinite, min picks the finite side
    Curve s = sum(f, d);
    CHECK(s(3) == 11);
    CHECK(s.is_infinite_at(4));
    Curve m = min_of(f, d);
    CHECK(m(10) == 25);
    CHECK(m(2) == 0);
}

TEST_CASE("convolution examples")
{
    Rational R = 7;
    Curve a = make_rate_latency(R, 2);
    Curve b = make_rate_latency(R, 3);
    CHECK(convolve(a, b) == make_rate_latency(R, 5));

    Curve f = make_affine(4, 1);
    CHECK(convolve(f, make_zero()) == make_zero());

    Curve c = convolve(make_affine(4, 1), make_rate_latency(3, 2));
    CHECK(c(0) == 0);
    CHECK(c(2) == 0);
    CHECK(c.right_limit(2) == 0);
    CHECK(c(3) == 3);
    CHECK(c(10) == 4 + 8);
    CHECK(c.rate() == 1);

    // f * burst_delay(D) is f delayed by D
    Curve shifted = convolve(make_affine(4, 1), make_burst_delay(2));
    CHECK(shifted(2) == 0);
    CHECK(shifted(5) == 4 + 3);
}

TEST_CASE("deconvolution examples")
{
    Curve f = make_affine(10000, 10000000);
    Curve g = deconvolve(f, make_burst_delay(us(100)));
    CHECK(g.right_limit(0) == 11000);
    CHECK(g(rat(1, 1000)) == 11000 + 10000);
    CHECK(g.rate() == 10000000);

    Curve h = deconvolve(make_affine(4, 1), make_rate_latency(3, 2));
    CHECK(h(0) == 6);
    CHECK(h(5) == 11);

    CHECK_THROWS_AS(deconvolve(make_affine(1, 1), make_zero()), UnstableError);

    // staircase shifted left by D
    Curve st = make_staircase({2, 0, 4});
    Curve moved = deconvolve(st, make_burst_delay(1));
    for (Rational t : half_grid(12))
        CHECK(moved(t) == st(t + 1));
}

TEST_CASE("horizontal deviation examples")
{
    Curve alpha = make_affine(1000, 1000000);
    Curve beta = make_rate_latency(10000000, us(100));
    CHECK(horizontal_deviation(alpha, beta) == us(200));
    CHECK(horizontal_deviation(beta, beta) == 0);
    Curve stair = make_staircase({2000, 0, us(100)});
    CHECK(horizontal_deviation(stair, make_affine(0, 40000000)) == us(50));
    CHECK_THROWS_AS(horizontal_deviation(make_affine(0, 2), make_affine(0, 1)), UnstableError);
}

TEST_CASE("closure examples")
{
    Curve f = add_constant(make_affine(0, 1), -5);  // t - 5 on t > 0, -5 at 0
    Curve c = closure_up(f);
    CHECK(c(0) == 0);
    CHECK(c(5) == 0);
    CHECK(c(8) == 3);
    Curve g = make_staircase({3, 1, 2});
    CHECK(closure_up(g) == g);

    // Sawtooth: rises by 2 over [0,1), drops by 1 at each integer.
    Curve saw = Curve::make({Piece{0, 0, 0, 2}}, 0, 1, 1);
    Curve cs = closure_up(saw);
    for (Rational t : oracle::grid(0, 6, Rational(1, 8)))
        CHECK(cs(t) == oracle::closure_at(saw, t, oracle::grid(0, 6, Rational(1, 8))));
}

TEST_CASE("min max sum examples")
{
    Curve a = make_affine(0, 3);
    Curve b = make_affine(5, 3);
    CHECK(min_of(a, b) == a);
    std::vector<Curve> same(4, b);
    CHECK(max_of(same) == b);
    Curve st = make_staircase({2, 0, 3});
    CHECK(sum(st, st) == make_staircase({4, 0, 3}));
    CHECK_THROWS(min_of(std::span<const Curve>{}));

    // Different rates: min eventually follows the slower curve.
    Curve fast = make_rate_latency(10, 5);
    Curve slow = make_affine(20, 1);
    Curve m = min_of(fast, slow);
    CHECK(m(5) == 0);
    CHECK(m(7) == 20);
    CHECK(m(100) == 120);
}

TEST_CASE("dump format")
{
    std::ostringstream out;
    dump_csv(out, make_rate_latency(2, 1));
    CHECK(out.str().rfind("t_s,value,right_value,slope\n0,0,0,0\n1,0,0,2\n", 0) == 0);
}

TEST_CASE("randomized operators agree with brute force")
{
    std::mt19937 rng(7);
    const Rational step(1, 4);
    for (int iter = 0; iter < 25; ++iter) {
        Curve f = oracle::random_curve(rng);
        Curve g = oracle::random_curve(rng);
        CAPTURE(f);
        CAPTURE(g);
        auto breaks = oracle::grid(0, 40, step);

        oracle::Memo mf(f), mg(g);
        Curve conv = convolve(f, g);
        for (Rational t : oracle::grid(0, 20, step))
            REQUIRE(conv(t) == oracle::convolution_at(mf, mg, t, breaks));

        Curve clo = closure_up(f);
        for (Rational t : oracle::grid(0, 20, step))
            REQUIRE(clo(t) == oracle::closure_at(f, t, breaks));

        // Make g strictly faster for deconvolution and deviation.
        Curve faster = sum(g, make_affine(0, f.rate() + 1));
        oracle::Memo mfast(faster);
        Curve dec = deconvolve(f, faster);
        for (Rational t : oracle::grid(0, 10, step))
            REQUIRE(dec(t) == oracle::deconvolution_at(mf, mfast, t, 60, oracle::grid(0, 80, step)));

        oracle::Passage passage(faster, oracle::grid(0, 120, step));
        REQUIRE(horizontal_deviation(f, faster) ==
                oracle::deviation(f, faster, 60, oracle::grid(0, 60, step), passage));
    }
}
