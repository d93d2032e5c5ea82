#pragma once

#include <vector>

#include "tsnnc/curve.hpp"
#include "tsnnc/network.hpp"

namespace tsnnc {

// Affine upper envelope sigma + rho * t.
struct GbEnvelope {
    Rational sigma;  // bits
    Rational rho;    // bits/s
};

// constant + sum_k terms[k].height * ceil((t - terms[k].offset) / period),
// every offset in [0, period) and all terms sharing one period.
struct StaircaseSum {
    std::vector<StaircaseSpec> terms;
    Rational constant;
};

struct CreditBounds {
    Rational c_min;
    Rational c_max;
    CreditMode mode = CreditMode::Frozen;
    GbEnvelope gb;
};

// (l_max / C) * sdSl.
Rational credit_lower_bound(const Rational& l_max, const Rational& rate, const Rational& send_slope);

// Guard band staircases, one per reference window, with offsets folded into
// [0, period) (each fold by m periods adds m * height to `constant`).
// Throws std::invalid_argument when the ST windows leave no other time.
std::vector<StaircaseSum> gb_staircases(const OutputPort& port, const std::vector<Rational>& guard_bands);

// Max over the reference windows of gb_staircases, as a curve in the
// non-ST time argument.
Curve gb_staircase_bound(const OutputPort& port, const std::vector<Rational>& guard_bands);

Curve staircase_curve(const StaircaseSum& s);

// Smallest affine bound of the form used for staircase sums: rho = sum l / P,
// sigma = constant + max_k (sum_{j<=k} l_j - rho * o_k).
GbEnvelope linear_envelope(const StaircaseSum& s);

// Max of linear_envelope over all references; (0, 0) without windows.
GbEnvelope gb_linear_envelope(const OutputPort& port, const std::vector<Rational>& guard_bands);

// Credit ceiling of a class given the credit floors and idle slopes of the
// classes above it. Throws ValidationError when the denominator is not
// negative (overload).
Rational credit_upper_bound(const Rational& idle_slope, const Rational& rate, const Rational& higher_c_min_sum,
                            const Rational& higher_idle_sum, const Rational& l_gt, CreditMode mode,
                            const GbEnvelope& gb);

// Bounds for every class of port p, in priority order. zero_guard_bands
// treats every guard band as empty.
std::vector<CreditBounds> port_credit_bounds(const Network& net, std::size_t p, CreditMode mode,
                                             bool zero_guard_bands = false);

}  // namespace tsnnc
