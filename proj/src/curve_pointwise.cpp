// Explicit layout helpers and pointwise min/max/sum.

#include <algorithm>

#include "curve_detail.hpp"

namespace tsnnc::detail {

PieceList unfold(const Curve& f, const Rational& horizon)
{
    PieceList out;
    out.end = horizon;
    const auto& ps = f.pieces();
    const Rational& tail = f.tail_start();
    const Rational& d = f.period();
    const Rational& c = f.increment();
    Rational pattern_end = tail + d;

    for (const Piece& p : ps) {
        if (p.start >= horizon)
            return out;
        out.pieces.push_back(p);
    }
    if (horizon <= pattern_end)
        return out;

    std::vector<Piece> pattern;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        Rational end = i + 1 < ps.size() ? ps[i + 1].start : pattern_end;
        if (end <= tail)
            continue;
        if (ps[i].start < tail) {
            Rational v = ps[i].right + ps[i].slope * (tail - ps[i].start);
            pattern.push_back(Piece{tail, v, v, ps[i].slope});
        } else {
            pattern.push_back(ps[i]);
        }
    }
    for (Rational k = 1;; k += 1) {
        Rational shift = k * d;
        Rational lift = k * c;
        for (const Piece& q : pattern) {
            Rational s = q.start + shift;
            if (s >= horizon)
                return out;
            out.pieces.push_back(Piece{s, q.at + lift, q.right + lift, q.slope});
        }
    }
}

std::vector<Piece> normalize(std::vector<Piece> pieces)
{
    std::vector<Piece> out;
    out.reserve(pieces.size());
    for (Piece& p : pieces) {
        if (!out.empty()) {
            const Piece& q = out.back();
            Rational left = q.right + q.slope * (p.start - q.start);
            if (p.slope == q.slope && p.at == left && p.right == left)
                continue;
        }
        out.push_back(std::move(p));
    }
    return out;
}

Curve build(const PieceList& pl, const Rational& tail_start, const Rational& period,
            const Rational& increment)
{
    Rational end = tail_start + period;
    if (pl.end < end)
        throw std::logic_error("build: layout shorter than one tail period");
    std::vector<Piece> kept;
    for (const Piece& p : pl.pieces) {
        if (p.start >= end)
            break;
        kept.push_back(p);
    }
    return Curve::make(std::move(kept), tail_start, period, increment);
}

Curve finalize_cut(const PieceList& pl, const Rational& cut)
{
    if (pl.end <= cut)
        throw std::logic_error("finalize_cut: layout does not reach the cutoff");
    std::vector<Piece> kept;
    for (std::size_t i = 0; i < pl.pieces.size(); ++i) {
        const Piece& p = pl.pieces[i];
        if (p.start > cut)
            break;
        kept.push_back(p);
    }
    Piece& last = kept.back();
    if (last.start == cut) {
        last.right = last.at;
        last.slope = 0;
    } else {
        Rational v = last.right + last.slope * (cut - last.start);
        kept.push_back(Piece{cut, v, v, 0});
    }
    return Curve::make(std::move(kept), cut, 1, 0, cut);
}

std::pair<Rational, Rational> offset_bounds(const Curve& f)
{
    Rational rho = f.rate();
    const auto& ps = f.pieces();
    Rational pattern_end = f.tail_start() + f.period();
    bool init = false;
    Rational lo, hi;
    auto take = [&](const Rational& v) {
        if (!init) {
            lo = hi = v;
            init = true;
        } else {
            if (v < lo)
                lo = v;
            if (v > hi)
                hi = v;
        }
    };
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const Piece& p = ps[i];
        if (f.cutoff() && p.start > *f.cutoff())
            break;
        take(p.at - rho * p.start);
        Rational end = i + 1 < ps.size() ? ps[i + 1].start : pattern_end;
        if (f.cutoff() && *f.cutoff() == p.start)
            break;
        if (f.cutoff() && end > *f.cutoff())
            end = *f.cutoff();
        take(p.right - rho * p.start);
        take(p.right + p.slope * (end - p.start) - rho * end);
    }
    return {lo, hi};
}

namespace {

enum class Op { Sum, Min, Max };

struct Line {
    Rational value;  // at the left end of the interval (right limit)
    Rational slope;
    bool infinite = false;
};

struct Cursor {
    const PieceList& pl;
    const std::optional<Rational>& cut;
    std::size_t idx = 0;

    void seek(const Rational& x)
    {
        while (idx + 1 < pl.pieces.size() && pl.pieces[idx + 1].start <= x)
            ++idx;
    }
    bool point_infinite(const Rational& x) const { return cut && x > *cut; }
    bool open_infinite(const Rational& x) const { return cut && x >= *cut; }
    Rational point(const Rational& x) const
    {
        const Piece& p = pl.pieces[idx];
        return x == p.start ? p.at : Rational(p.right + p.slope * (x - p.start));
    }
    Line open(const Rational& x) const
    {
        if (open_infinite(x))
            return Line{0, 0, true};
        const Piece& p = pl.pieces[idx];
        return Line{p.right + p.slope * (x - p.start), p.slope, false};
    }
};

PieceList pointwise(const Curve& f, const Curve& g, const Rational& horizon, Op op)
{
    PieceList a = unfold(f, horizon);
    PieceList b = unfold(g, horizon);
    std::vector<Rational> xs;
    xs.reserve(a.pieces.size() + b.pieces.size() + 2);
    for (const Piece& p : a.pieces)
        xs.push_back(p.start);
    for (const Piece& p : b.pieces)
        xs.push_back(p.start);
    if (f.cutoff() && *f.cutoff() < horizon)
        xs.push_back(*f.cutoff());
    if (g.cutoff() && *g.cutoff() < horizon)
        xs.push_back(*g.cutoff());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    Cursor ca{a, f.cutoff()};
    Cursor cb{b, g.cutoff()};
    PieceList out;
    out.end = horizon;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const Rational& x = xs[k];
        const Rational& next = k + 1 < xs.size() ? xs[k + 1] : horizon;
        ca.seek(x);
        cb.seek(x);

        bool ia = ca.point_infinite(x), ib = cb.point_infinite(x);
        Rational at = 0;
        switch (op) {
        case Op::Sum:
            if (!ia && !ib)
                at = ca.point(x) + cb.point(x);
            break;
        case Op::Min:
            if (ia && !ib)
                at = cb.point(x);
            else if (!ia && ib)
                at = ca.point(x);
            else if (!ia && !ib)
                at = std::min(ca.point(x), cb.point(x));
            break;
        case Op::Max:
            if (!ia && !ib)
                at = std::max(ca.point(x), cb.point(x));
            break;
        }

        Line la = ca.open(x), lb = cb.open(x);
        if (op == Op::Sum || la.infinite || lb.infinite) {
            Line r{0, 0, false};
            if (op == Op::Sum) {
                if (!la.infinite && !lb.infinite)
                    r = Line{la.value + lb.value, la.slope + lb.slope};
            } else if (op == Op::Min) {
                if (!la.infinite)
                    r = la;
                else if (!lb.infinite)
                    r = lb;
            }
            out.pieces.push_back(Piece{x, at, r.value, r.slope});
            continue;
        }
        // Min or Max of two finite lines on (x, next).
        bool less = op == Op::Min;
        auto better = [&](const Line& p, const Line& q) {
            if (p.value != q.value)
                return less ? p.value < q.value : p.value > q.value;
            return less ? p.slope <= q.slope : p.slope >= q.slope;
        };
        const Line& first = better(la, lb) ? la : lb;
        const Line& second = better(la, lb) ? lb : la;
        out.pieces.push_back(Piece{x, at, first.value, first.slope});
        if (first.slope != second.slope) {
            bool diverging = less ? second.slope > first.slope : second.slope < first.slope;
            if (!diverging) {
                Rational cross = x + (second.value - first.value) / (first.slope - second.slope);
                if (cross > x && cross < next) {
                    Rational v = first.value + first.slope * (cross - x);
                    out.pieces.push_back(Piece{cross, v, v, second.slope});
                }
            }
        }
    }
    return out;
}

Curve binary(const Curve& f_in, const Curve& g_in, Op op)
{
    auto [f, g] = harmonize(f_in, g_in);
    const auto& cf = f.cutoff();
    const auto& cg = g.cutoff();
    std::optional<Rational> cut;
    if (op == Op::Min) {
        if (cf && cg)
            cut = std::max(*cf, *cg);
    } else if (cf && cg) {
        cut = std::min(*cf, *cg);
    } else if (cf) {
        cut = *cf;
    } else if (cg) {
        cut = *cg;
    }
    if (cut)
        return finalize_cut(pointwise(f, g, *cut + 1, op), *cut);

    if (op == Op::Min && (cf || cg)) {
        const Curve& fin = cf ? g : f;
        const Rational& d_cut = cf ? *cf : *cg;
        Rational tail = std::max(fin.tail_start(), Rational(d_cut + fin.period()));
        return build(pointwise(f, g, tail + fin.period(), op), tail, fin.period(), fin.increment());
    }

    Rational rf = f.rate(), rg = g.rate();
    Rational tail, period, inc;
    if (op == Op::Sum || rf == rg) {
        period = lcm_of(f.period(), g.period());
        tail = std::max(f.tail_start(), g.tail_start());
        inc = (rf + rg) * period;
        if (op != Op::Sum)
            inc = rf * period;
    } else {
        const Curve& low = rf < rg ? f : g;
        const Curve& high = rf < rg ? g : f;
        const Curve& follow = op == Op::Min ? low : high;
        Rational cross = (upper_offset(low) - lower_offset(high)) / (high.rate() - low.rate());
        tail = std::max(follow.tail_start(), std::max(cross, Rational(0)));
        period = follow.period();
        inc = follow.increment();
    }
    return build(pointwise(f, g, tail + period, op), tail, period, inc);
}

template <Op op>
Curve fold(std::span<const Curve> curves)
{
    if (curves.empty())
        throw std::invalid_argument("pointwise operation on an empty curve list");
    Curve acc = curves.front();
    for (std::size_t i = 1; i < curves.size(); ++i)
        acc = binary(acc, curves[i], op);
    return acc;
}

}  // namespace

}  // namespace tsnnc::detail

namespace tsnnc {

Curve min_of(const Curve& a, const Curve& b) { return detail::binary(a, b, detail::Op::Min); }
Curve max_of(const Curve& a, const Curve& b) { return detail::binary(a, b, detail::Op::Max); }
Curve sum(const Curve& a, const Curve& b) { return detail::binary(a, b, detail::Op::Sum); }

Curve min_of(std::span<const Curve> curves) { return detail::fold<detail::Op::Min>(curves); }
Curve max_of(std::span<const Curve> curves) { return detail::fold<detail::Op::Max>(curves); }
Curve sum(std::span<const Curve> curves) { return detail::fold<detail::Op::Sum>(curves); }

}  // namespace tsnnc
