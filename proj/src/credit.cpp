#include "tsnnc/credit.hpp"

#include <algorithm>

namespace tsnnc {

Rational credit_lower_bound(const Rational& l_max, const Rational& rate, const Rational& send_slope)
{
    return l_max / rate * send_slope;
}

std::vector<StaircaseSum> gb_staircases(const OutputPort& port, const std::vector<Rational>& gb)
{
    const std::size_t n = port.windows.size();
    std::vector<StaircaseSum> out;
    if (n == 0)
        return out;
    const Rational& p = port.gcl_period;
    Rational period = p - port.st_total();
    if (period <= 0)
        throw std::invalid_argument("port " + port.id + ": ST windows leave no time for other traffic");
    for (std::size_t j = 0; j < n; ++j) {
        StaircaseSum s;
        s.constant = 0;
        Rational st_sum = 0;
        for (std::size_t m = j; m < j + n; ++m) {
            std::size_t k = m % n;
            Rational rel = port.windows[k].offset - port.windows[j].offset;
            if (m >= n)
                rel += p;
            st_sum += port.windows[k].length;
            Rational height = gb[k] * port.rate;
            if (height == 0)
                continue;
            // ceil((t - x) / P) with x = rel - L_GB,k - sum L_ST.
            Rational x = rel - gb[k] - st_sum;
            Rational folds = ceil_of(-x / period);
            if (folds > 0) {
                x += folds * period;
                s.constant += folds * height;
            }
            s.terms.push_back(StaircaseSpec{height, x, period});
        }
        std::sort(s.terms.begin(), s.terms.end(),
                  [](const StaircaseSpec& a, const StaircaseSpec& b) { return a.offset < b.offset; });
        out.push_back(std::move(s));
    }
    return out;
}

Curve staircase_curve(const StaircaseSum& s)
{
    Curve acc = make_constant(s.constant);
    for (const StaircaseSpec& t : s.terms)
        acc = sum(acc, make_staircase(t));
    return acc;
}

Curve gb_staircase_bound(const OutputPort& port, const std::vector<Rational>& gb)
{
    std::vector<Curve> refs;
    for (const StaircaseSum& s : gb_staircases(port, gb))
        refs.push_back(staircase_curve(s));
    if (refs.empty())
        return make_zero();
    return max_of(refs);
}

GbEnvelope linear_envelope(const StaircaseSum& s)
{
    if (s.terms.empty())
        return GbEnvelope{s.constant, 0};
    Rational total = 0;
    for (const StaircaseSpec& t : s.terms)
        total += t.height;
    Rational rho = total / s.terms.front().period;
    Rational best;
    Rational acc = 0;
    for (std::size_t k = 0; k < s.terms.size(); ++k) {
        acc += s.terms[k].height;
        Rational sigma = acc - rho * s.terms[k].offset;
        if (k == 0 || sigma > best)
            best = sigma;
    }
    return GbEnvelope{best + s.constant, rho};
}

GbEnvelope gb_linear_envelope(const OutputPort& port, const std::vector<Rational>& gb)
{
    GbEnvelope env{0, 0};
    for (const StaircaseSum& s : gb_staircases(port, gb)) {
        GbEnvelope e = linear_envelope(s);
        env.sigma = std::max(env.sigma, e.sigma);
        env.rho = std::max(env.rho, e.rho);
    }
    return env;
}

Rational credit_upper_bound(const Rational& idle_slope, const Rational& rate, const Rational& higher_c_min_sum,
                            const Rational& higher_idle_sum, const Rational& l_gt, CreditMode mode,
                            const GbEnvelope& gb)
{
    Rational num = higher_c_min_sum - l_gt;
    Rational den = higher_idle_sum - rate;
    if (mode == CreditMode::NonFrozen) {
        num -= gb.sigma;
        den += gb.rho;
    }
    if (den >= 0)
        throw ValidationError({"overload: guard-band rate plus higher idle slopes reach the link rate"});
    return idle_slope * num / den;
}

std::vector<CreditBounds> port_credit_bounds(const Network& net, std::size_t p, CreditMode mode,
                                             bool zero_guard_bands)
{
    const OutputPort& port = net.port(p);
    std::vector<CreditBounds> out;
    Rational c_min_sum = 0;
    Rational idle_sum = 0;
    for (std::size_t i = 0; i < port.classes(); ++i) {
        CreditBounds b;
        b.mode = mode;
        b.c_min = credit_lower_bound(net.l_max_class(p, i), port.rate, port.send_slope(i));
        std::vector<Rational> gbs = net.guard_bands(p, i);
        if (zero_guard_bands)
            gbs.assign(gbs.size(), Rational(0));
        b.gb = gb_linear_envelope(port, gbs);
        try {
            b.c_max = credit_upper_bound(port.idle_slopes[i], port.rate, c_min_sum, idle_sum, net.l_max_gt(p, i),
                                         mode, b.gb);
        } catch (const ValidationError&) {
            throw ValidationError({"port " + port.id + " class " + std::to_string(i + 1) +
                                   ": overload, rho_GB + higher idle slopes >= C in non-frozen mode"});
        }
        c_min_sum += b.c_min;
        idle_sum += port.idle_slopes[i];
        out.push_back(b);
    }
    return out;
}

}  // namespace tsnnc
