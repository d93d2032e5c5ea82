#pragma once

#include <vector>

#include "tsnnc/curve.hpp"
#include "tsnnc/network.hpp"

namespace tsnnc {

// Upper bound on the bits C * (ST gate time) in any interval of length t.
Curve st_arrival_curve(const OutputPort& port);

// Same, with each window extended backwards by its guard band.
Curve gbst_arrival_curve(const OutputPort& port, const std::vector<Rational>& guard_bands);

// C * max(floor(t/p) L, t - ceil(t/p) (p - L)).
Curve tdma_service(const Rational& period, const Rational& length, const Rational& rate);

// Strict lower bound on the ST gate time (times C) in any interval.
Curve st_strict_service_curve(const OutputPort& port);

// [t - beta_st(t)/C]^+ (non-decreasing closure) * idSl + c_max - c_min.
Curve cbs_shaping_curve(const Curve& beta_st, const Rational& rate, const Rational& idle_slope,
                        const Rational& c_max, const Rational& c_min);

}  // namespace tsnnc
