#include "tsnnc/st_curves.hpp"

namespace tsnnc {

namespace {

// Offset of window k relative to window j, in [0, p).
Rational relative_offset(const OutputPort& port, std::size_t k, std::size_t j)
{
    Rational rel = port.windows[k].offset - port.windows[j].offset;
    if (rel < 0)
        rel += port.gcl_period;
    return rel;
}

}  // namespace

Curve st_arrival_curve(const OutputPort& port)
{
    return gbst_arrival_curve(port, std::vector<Rational>(port.windows.size(), Rational(0)));
}

Curve gbst_arrival_curve(const OutputPort& port, const std::vector<Rational>& gb)
{
    const std::size_t n = port.windows.size();
    if (n == 0)
        return make_zero();
    std::vector<Curve> refs;
    for (std::size_t j = 0; j < n; ++j) {
        Curve acc = make_zero();
        for (std::size_t k = 0; k < n; ++k) {
            Rational height = (port.windows[k].length + gb[k]) * port.rate;
            Rational offset = relative_offset(port, k, j) - gb[k] + gb[j];
            acc = sum(acc, make_staircase({height, offset, port.gcl_period}));
        }
        refs.push_back(acc);
    }
    return max_of(refs);
}

Curve tdma_service(const Rational& period, const Rational& length, const Rational& rate)
{
    if (length >= period)
        return make_affine(0, rate);
    if (length == 0)
        return make_zero();
    Rational closed = period - length;
    return Curve::make({Piece{0, 0, 0, 0}, Piece{closed, 0, 0, rate}}, 0, period, length * rate);
}

Curve st_strict_service_curve(const OutputPort& port)
{
    const std::size_t n = port.windows.size();
    if (n == 0)
        return make_zero();
    const Rational& p = port.gcl_period;
    std::vector<Curve> refs;
    for (std::size_t i = 0; i < n; ++i) {
        Rational idle = port.gap_before(i);
        Curve acc = make_zero();
        for (std::size_t j = 0; j < n; ++j) {
            const Rational& len = port.windows[j].length;
            Rational shift = p - len - idle - relative_offset(port, j, i);
            acc = sum(acc, shift_left(tdma_service(p, len, port.rate), shift));
        }
        refs.push_back(acc);
    }
    return min_of(refs);
}

Curve cbs_shaping_curve(const Curve& beta_st, const Rational& rate, const Rational& idle_slope,
                        const Rational& c_max, const Rational& c_min)
{
    Curve open_time = sum(make_affine(0, 1), scale(beta_st, Rational(-1) / rate));
    Curve shaped = scale(closure_up(open_time), idle_slope);
    return add_constant(shaped, c_max - c_min);
}

}  // namespace tsnnc
