// Horizontal deviation and the non-decreasing non-negative closure.

#include <algorithm>

#include "curve_detail.hpp"

namespace tsnnc {

namespace {

using detail::PieceList;

// Pseudo-inverse y -> inf { x >= 0 : beta(x) >= y } over an explicit layout of a
// non-decreasing curve. Beyond the layout the curve is +infinity (cutoff) or
// the horizon was too short.
class Inverse {
public:
    Inverse(PieceList pl, std::optional<Rational> cut) : pl_(std::move(pl)), cut_(std::move(cut))
    {
        // Highest value reached by the end of each piece (left limit included).
        tops_.reserve(pl_.pieces.size());
        for (std::size_t i = 0; i < pl_.pieces.size(); ++i)
            tops_.push_back(std::max(pl_.pieces[i].at, pl_.value_before_end(i)));
    }

    Rational operator()(const Rational& y) const
    {
        auto it = std::lower_bound(tops_.begin(), tops_.end(), y);
        if (it == tops_.end()) {
            if (cut_ && *cut_ <= pl_.end)
                return *cut_;
            throw std::logic_error("horizontal deviation: service horizon too short");
        }
        std::size_t i = static_cast<std::size_t>(it - tops_.begin());
        const Piece& p = pl_.pieces[i];
        if (p.at >= y || p.right >= y)
            return p.start;
        return p.start + (y - p.right) / p.slope;
    }

    // Every value at which the inverse may change slope.
    std::vector<Rational> levels() const
    {
        std::vector<Rational> ys;
        for (std::size_t i = 0; i < pl_.pieces.size(); ++i) {
            ys.push_back(pl_.pieces[i].at);
            ys.push_back(pl_.pieces[i].right);
            ys.push_back(pl_.value_before_end(i));
        }
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
        return ys;
    }

private:
    PieceList pl_;
    std::optional<Rational> cut_;
    std::vector<Rational> tops_;
};

}  // namespace

Rational horizontal_deviation(const Curve& alpha_in, const Curve& beta_in)
{
    auto [alpha, beta] = detail::harmonize(alpha_in, beta_in);
    if (alpha.cutoff())
        throw UnstableError("horizontal deviation: arrival curve has infinite values");

    auto [a_lo, a_hi] = detail::offset_bounds(alpha);
    Rational span;
    Rational beta_horizon;
    if (beta.cutoff()) {
        span = *beta.cutoff();
        beta_horizon = *beta.cutoff() + 1;
    } else {
        Rational ra = alpha.rate(), rb = beta.rate();
        if (rb <= 0 || ra > rb)
            throw UnstableError("horizontal deviation unbounded: arrival rate " + to_string(ra) +
                                " vs service rate " + to_string(rb));
        Rational b_lo = detail::offset_bounds(beta).first;
        Rational wait = (a_hi - b_lo) / rb;
        if (wait < 0)
            wait = 0;
        if (ra == rb)
            span = std::max(alpha.tail_start(), beta.tail_start()) + lcm_of(alpha.period(), beta.period());
        else
            span = std::max(Rational(0), Rational((a_hi - b_lo) / (rb - ra)));
        beta_horizon = span + wait + beta.tail_start() + beta.period();
    }

    Inverse inv(detail::unfold(beta, beta_horizon), beta.cutoff());
    std::vector<Rational> levels = inv.levels();

    PieceList al = detail::unfold(alpha, span + 1);
    std::vector<Rational> cand{Rational(0), span};
    for (std::size_t i = 0; i < al.pieces.size(); ++i) {
        const Piece& p = al.pieces[i];
        if (p.start > span)
            break;
        cand.push_back(p.start);
        if (p.slope == 0)
            continue;
        Rational end = std::min(al.end_of(i), span);
        Rational v0 = p.right;
        Rational v1 = p.right + p.slope * (end - p.start);
        Rational lo = std::min(v0, v1), hi = std::max(v0, v1);
        auto first = std::upper_bound(levels.begin(), levels.end(), lo);
        for (auto it = first; it != levels.end() && *it < hi; ++it)
            cand.push_back(p.start + (*it - p.right) / p.slope);
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    while (!cand.empty() && cand.back() > span)
        cand.pop_back();

    auto gap = [&](const Rational& s) -> Rational { return inv(alpha(s)) - s; };
    Rational best = 0;
    for (std::size_t k = 0; k < cand.size(); ++k) {
        best = std::max(best, gap(cand[k]));
        if (k + 1 == cand.size())
            break;
        // The gap is affine strictly between candidates; recover both one-sided
        // limits from two interior samples.
        Rational w = cand[k + 1] - cand[k];
        Rational g1 = gap(cand[k] + w / 3);
        Rational g2 = gap(cand[k] + 2 * w / 3);
        best = std::max(best, Rational(2 * g1 - g2));
        best = std::max(best, Rational(2 * g2 - g1));
    }
    return best;
}

namespace {

// Running supremum over [0, t] of an explicit layout.
PieceList running_max(const PieceList& pl)
{
    PieceList out;
    out.end = pl.end;
    Rational m;
    bool init = false;
    for (std::size_t i = 0; i < pl.pieces.size(); ++i) {
        const Piece& p = pl.pieces[i];
        m = init ? std::max(m, p.at) : p.at;
        init = true;
        Rational at = m;
        Rational end = pl.end_of(i);
        if (p.slope <= 0) {
            m = std::max(m, p.right);
            out.pieces.push_back(Piece{p.start, at, m, 0});
            continue;
        }
        if (p.right >= m) {
            out.pieces.push_back(Piece{p.start, at, p.right, p.slope});
            m = p.right + p.slope * (end - p.start);
            continue;
        }
        Rational reach = p.start + (m - p.right) / p.slope;
        out.pieces.push_back(Piece{p.start, at, m, 0});
        if (reach < end) {
            out.pieces.push_back(Piece{reach, m, m, p.slope});
            m = p.right + p.slope * (end - p.start);
        }
    }
    out.pieces = detail::normalize(std::move(out.pieces));
    return out;
}

}  // namespace

Curve closure_up(const Curve& f)
{
    if (f.cutoff())
        throw std::invalid_argument("closure of a curve with infinite values");
    Curve g = max_of(f, make_zero());
    const Rational& tail = g.tail_start();
    const Rational& d = g.period();
    const Rational& c = g.increment();

    if (c <= 0) {
        // Bounded above by the first period: constant from tail + d on.
        Rational h = tail + d + d;
        PieceList rm = running_max(detail::unfold(g, h));
        return detail::build(rm, tail + d, d, 0);
    }
    // Once a whole period of g lies above the running max reached at the tail
    // start, the running max follows the last period.
    Rational reached = 0;
    for (const Piece& p : running_max(detail::unfold(g, tail + 1)).pieces)
        if (p.start <= tail)
            reached = p.start == tail ? p.at : Rational(p.right + p.slope * (tail - p.start));
    PieceList one = detail::unfold(g, tail + d);
    Rational floor_in_period;
    bool init = false;
    for (std::size_t i = 0; i < one.pieces.size(); ++i) {
        const Piece& p = one.pieces[i];
        Rational end = one.end_of(i);
        if (end <= tail)
            continue;
        Rational s = std::max(p.start, tail);
        Rational vs = s == p.start ? p.at : Rational(p.right + p.slope * (s - p.start));
        Rational vals[] = {vs, p.right + p.slope * (s - p.start), one.value_before_end(i)};
        for (const Rational& v : vals) {
            if (!init || v < floor_in_period) {
                floor_in_period = v;
                init = true;
            }
        }
    }
    Rational k = ceil_of((reached - floor_in_period) / c);
    if (k < 0)
        k = 0;
    Rational new_tail = tail + (k + 1) * d;
    PieceList rm = running_max(detail::unfold(g, new_tail + d));
    return detail::build(rm, new_tail, d, c);
}

}  // namespace tsnnc
