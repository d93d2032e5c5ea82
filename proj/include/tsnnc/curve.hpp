#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tsnnc/rational.hpp"

namespace tsnnc {

// Thrown when a sup/inf diverges or a delay is unbounded (rate(alpha) > rate(beta)).
class UnstableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One elementary piece of a piecewise-affine function: the value at the
// instant `start` is `at`; on the open interval up to the next piece the
// function is `right + slope * (t - start)`.
struct Piece {
    Rational start;
    Rational at;
    Rational right;
    Rational slope;
};

// Ultimately pseudo-periodic piecewise-affine function on t >= 0.
//
// The pieces cover [0, tail_start + period). For t >= tail_start,
// f(t + period) = f(t) + increment. An optional cutoff D makes the function
// +infinity for every t > D (the value at D itself stays finite); that is the
// encoding of burst-delay curves.
//
// A Curve may be negative or decreasing (intermediate results such as
// t - alpha(t)/C are). Curves built by the NC constructors are non-negative
// and non-decreasing; is_nc() checks that.
class Curve {
public:
    Curve();

    static Curve make(std::vector<Piece> pieces, Rational tail_start, Rational period,
                      Rational increment, std::optional<Rational> cutoff = std::nullopt);

    const std::vector<Piece>& pieces() const { return pieces_; }
    const Rational& tail_start() const { return tail_start_; }
    const Rational& period() const { return period_; }
    const Rational& increment() const { return increment_; }
    const std::optional<Rational>& cutoff() const { return cutoff_; }

    // Long-term slope increment/period (of the finite part).
    Rational rate() const { return increment_ / period_; }

    bool is_infinite_at(const Rational& t) const { return cutoff_ && t > *cutoff_; }

    // Exact value at t. Throws std::domain_error for t < 0 or inside the
    // infinite region.
    Rational operator()(const Rational& t) const;
    Rational right_limit(const Rational& t) const;
    // Requires t > 0.
    Rational left_limit(const Rational& t) const;

    // Non-negative and non-decreasing everywhere.
    bool is_nc() const;

    // Start of the last stored piece when the curve is affine with slope
    // rate() from there on (and finite); such a curve can take any period.
    std::optional<Rational> linear_from() const;

    friend bool operator==(const Curve& a, const Curve& b);

private:
    std::vector<Piece> pieces_;
    Rational tail_start_;
    Rational period_;
    Rational increment_;
    std::optional<Rational> cutoff_;
};

struct StaircaseSpec {
    Rational height;  // bits per step
    Rational offset;  // seconds
    Rational period;  // seconds
};

Rational evaluate(const Curve& f, const Rational& t);

Curve make_zero();
Curve make_constant(const Rational& value);
Curve make_affine(const Rational& burst, const Rational& rate);
Curve make_rate_latency(const Rational& rate, const Rational& latency);
Curve make_burst_delay(const Rational& delay);
// height * ceil((t - offset) / period); left-continuous at every jump.
Curve make_staircase(const StaircaseSpec& spec);
// Continuous function through the given breakpoints. `xs` must start at 0
// and contain tail_start and tail_start + period; values are taken at the
// breakpoints and joined linearly.
Curve make_continuous(std::span<const Rational> xs, std::span<const Rational> values,
                      const Rational& tail_start, const Rational& period);

Curve convolve(const Curve& f, const Curve& g);
Curve deconvolve(const Curve& f, const Curve& g);
Rational horizontal_deviation(const Curve& alpha, const Curve& beta);
Curve closure_up(const Curve& f);

Curve min_of(std::span<const Curve> curves);
Curve max_of(std::span<const Curve> curves);
Curve sum(std::span<const Curve> curves);
Curve min_of(const Curve& a, const Curve& b);
Curve max_of(const Curve& a, const Curve& b);
Curve sum(const Curve& a, const Curve& b);

Curve scale(const Curve& f, const Rational& factor);
Curve add_constant(const Curve& f, const Rational& value);

// f(t + shift) for shift >= 0 (left shift; equals f deconvolved by a burst-delay
// when f is non-decreasing).
Curve shift_left(const Curve& f, const Rational& shift);

// inf/sup of f(t) - rate(f) * t over t >= 0, including one-sided limits.
Rational lower_offset(const Curve& f);
Rational upper_offset(const Curve& f);

// Rows "t_s,value,right_value,slope" for every piece of the stored pattern,
// followed by a comment line describing the tail.
void dump_csv(std::ostream& out, const Curve& f);

std::ostream& operator<<(std::ostream& out, const Curve& f);

}  // namespace tsnnc
