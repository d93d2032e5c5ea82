// Min-plus convolution and deconvolution by elementary-piece enumeration
// followed by an exact lower (upper) envelope.

#include <algorithm>

#include "curve_detail.hpp"

namespace tsnnc {

namespace {

using detail::PieceList;

// Either a single point (lo == hi) or an affine function on the open
// interval (lo, hi) whose limit at lo is `value`.
struct Element {
    Rational lo;
    Rational hi;
    Rational value;
    Rational slope;
    bool point = false;
};

void push_open(std::vector<Element>& out, Rational lo, Rational hi, Rational value, Rational slope)
{
    if (hi <= lo)
        return;
    out.push_back(Element{std::move(lo), std::move(hi), std::move(value), std::move(slope), false});
}

// Open element made of two affine runs joined continuously at mid.
void push_two(std::vector<Element>& out, const Rational& lo, const Rational& mid, const Rational& hi,
              const Rational& value, const Rational& s1, const Rational& s2)
{
    Rational vmid = value + s1 * (mid - lo);
    push_open(out, lo, mid, value, s1);
    if (mid > lo && mid < hi)
        out.push_back(Element{mid, mid, vmid, 0, true});
    push_open(out, mid, hi, vmid, s2);
}

// Restricts elements to t in [0, horizon).
std::vector<Element> clip(std::vector<Element> in, const Rational& horizon)
{
    std::vector<Element> out;
    out.reserve(in.size());
    for (Element& e : in) {
        if (e.point) {
            if (e.lo >= 0 && e.lo < horizon)
                out.push_back(std::move(e));
            continue;
        }
        if (e.hi <= 0 || e.lo >= horizon)
            continue;
        if (e.lo < 0) {
            Rational v0 = e.value - e.slope * e.lo;
            out.push_back(Element{0, 0, v0, 0, true});
            e.value = v0;
            e.lo = 0;
        }
        out.push_back(std::move(e));
    }
    return out;
}

// Exact pointwise infimum of the elements over [0, horizon). Every point of
// the window must be covered by at least one element.
PieceList lower_envelope(std::vector<Element> elems, const Rational& horizon)
{
    std::vector<Rational> xs{Rational(0)};
    for (const Element& e : elems) {
        xs.push_back(e.lo);
        if (!e.point && e.hi < horizon)
            xs.push_back(e.hi);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::sort(elems.begin(), elems.end(),
              [](const Element& a, const Element& b) { return a.lo < b.lo; });

    PieceList out;
    out.end = horizon;
    std::vector<const Element*> active;
    std::size_t next_elem = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const Rational& x = xs[k];
        const Rational& next = k + 1 < xs.size() ? xs[k + 1] : horizon;

        std::erase_if(active, [&](const Element* e) { return e->hi <= x; });

        bool have_at = false;
        Rational at;
        auto take = [&](const Rational& v) {
            if (!have_at || v < at) {
                at = v;
                have_at = true;
            }
        };
        for (const Element* e : active)
            take(e->value + e->slope * (x - e->lo));
        while (next_elem < elems.size() && elems[next_elem].lo == x) {
            const Element& e = elems[next_elem++];
            if (e.point)
                take(e.value);
            else
                active.push_back(&e);
        }
        if (!have_at)
            throw std::logic_error("envelope: uncovered instant " + to_string(x));
        if (active.empty())
            throw std::logic_error("envelope: uncovered interval after " + to_string(x));

        // Lower envelope of the active lines on (x, next), evaluated relative to x.
        struct L {
            Rational v;
            Rational s;
        };
        std::vector<L> lines;
        lines.reserve(active.size());
        for (const Element* e : active)
            lines.push_back(L{e->value + e->slope * (x - e->lo), e->slope});
        std::size_t cur = 0;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            if (lines[i].v < lines[cur].v || (lines[i].v == lines[cur].v && lines[i].s < lines[cur].s))
                cur = i;
        }
        out.pieces.push_back(Piece{x, at, lines[cur].v, lines[cur].s});
        Rational pos = x;
        Rational width = next - x;
        while (true) {
            // Lines with a smaller slope overtake the current one at most once.
            const L& c = lines[cur];
            std::size_t best = lines.size();
            Rational best_at;
            for (std::size_t i = 0; i < lines.size(); ++i) {
                if (lines[i].s >= c.s)
                    continue;
                Rational cross = (lines[i].v - c.v) / (c.s - lines[i].s);
                Rational cross_pos = x + cross;
                if (cross_pos <= pos || cross >= width)
                    continue;
                if (best == lines.size() || cross < best_at ||
                    (cross == best_at && lines[i].s < lines[best].s)) {
                    best = i;
                    best_at = cross;
                }
            }
            if (best == lines.size())
                break;
            Rational v = c.v + c.s * best_at;
            pos = x + best_at;
            out.pieces.push_back(Piece{pos, v, v, lines[best].s});
            cur = best;
        }
    }
    out.pieces = detail::normalize(std::move(out.pieces));
    return out;
}

PieceList upper_envelope(std::vector<Element> elems, const Rational& horizon)
{
    for (Element& e : elems) {
        e.value = -e.value;
        e.slope = -e.slope;
    }
    PieceList pl = lower_envelope(std::move(elems), horizon);
    for (Piece& p : pl.pieces) {
        p.at = -p.at;
        p.right = -p.right;
        p.slope = -p.slope;
    }
    return pl;
}

// Finite-part layout on [0, horizon], including a point element at horizon.
struct Layout {
    PieceList pl;
    std::optional<Rational> cut;
};

Layout layout(const Curve& f, const Rational& horizon)
{
    Rational h = horizon;
    if (f.cutoff() && *f.cutoff() < h)
        h = *f.cutoff();
    // One extra unit so the closing point h lies inside the window.
    PieceList pl = detail::unfold(f, h + 1);
    std::vector<Piece> kept;
    for (const Piece& p : pl.pieces) {
        if (p.start > h)
            break;
        kept.push_back(p);
    }
    Rational vh = f(h);
    if (kept.back().start == h) {
        kept.back().right = vh;
        kept.back().slope = 0;
    } else {
        kept.push_back(Piece{h, vh, vh, 0});
    }
    return Layout{PieceList{std::move(kept), h}, f.cutoff()};
}

// Iterates over the elementary parts of a layout: the point at every piece
// start and the open run to the next start (the closing point at `end` has
// no open run).
template <typename Fn>
void for_each_part(const PieceList& pl, Fn&& fn)
{
    for (std::size_t i = 0; i < pl.pieces.size(); ++i) {
        const Piece& p = pl.pieces[i];
        fn(true, p.start, p.start, p.at, Rational(0));
        if (i + 1 < pl.pieces.size())
            fn(false, p.start, pl.pieces[i + 1].start, p.right, p.slope);
    }
}

}  // namespace

Curve convolve(const Curve& f_in, const Curve& g_in)
{
    auto [f, g] = detail::harmonize(f_in, g_in);
    const auto& cf = f.cutoff();
    const auto& cg = g.cutoff();
    Rational tail, period, inc;
    std::optional<Rational> cut;
    if (cf && cg) {
        cut = *cf + *cg;
    } else if (cf || cg) {
        const Curve& fin = cf ? g : f;
        const Rational& d_cut = cf ? *cf : *cg;
        tail = fin.tail_start() + d_cut;
        period = fin.period();
        inc = fin.increment();
    } else {
        Rational rf = f.rate(), rg = g.rate();
        if (rf == rg) {
            period = lcm_of(f.period(), g.period());
            tail = f.tail_start() + g.tail_start() + period;
            inc = rf * period;
        } else {
            const Curve& low = rf < rg ? f : g;
            const Curve& high = rf < rg ? g : f;
            auto [low_lo, low_hi] = detail::offset_bounds(low);
            Rational high_lo = detail::offset_bounds(high).first;
            // Arguments of `high` beyond reach are never optimal.
            Rational reach = (low_hi - low_lo + high(Rational(0)) - high_lo) / (high.rate() - low.rate());
            if (reach < 0)
                reach = 0;
            tail = low.tail_start() + reach;
            period = low.period();
            inc = low.increment();
        }
    }
    Rational horizon = cut ? Rational(*cut + 1) : Rational(tail + period);

    Layout lf = layout(f, horizon);
    Layout lg = layout(g, horizon);
    std::vector<Element> elems;
    for_each_part(lf.pl, [&](bool fp, const Rational& x0, const Rational& x1, const Rational& fv,
                             const Rational& fs) {
        for_each_part(lg.pl, [&](bool gp, const Rational& u0, const Rational& u1, const Rational& gv,
                                 const Rational& gs) {
            if (x0 + u0 >= horizon)
                return;
            if (fp && gp) {
                elems.push_back(Element{x0 + u0, x0 + u0, fv + gv, 0, true});
            } else if (fp) {
                push_open(elems, x0 + u0, x0 + u1, fv + gv, gs);
            } else if (gp) {
                push_open(elems, x0 + u0, x1 + u0, fv + gv, fs);
            } else {
                Rational lo = x0 + u0;
                Rational hi = x1 + u1;
                if (fs <= gs)
                    push_two(elems, lo, lo + (x1 - x0), hi, fv + gv, fs, gs);
                else
                    push_two(elems, lo, lo + (u1 - u0), hi, fv + gv, gs, fs);
            }
        });
    });
    PieceList env = lower_envelope(clip(std::move(elems), horizon), horizon);
    if (cut)
        return detail::finalize_cut(env, *cut);
    return detail::build(env, tail, period, inc);
}

Curve deconvolve(const Curve& f_in, const Curve& g_in)
{
    auto [f, g] = detail::harmonize(f_in, g_in);
    const auto& cf = f.cutoff();
    const auto& cg = g.cutoff();
    Rational reach;
    std::optional<Rational> cut;
    if (cf) {
        if (!cg)
            throw UnstableError("deconvolution diverges: infinite numerator against a finite curve");
        if (*cf < *cg)
            throw UnstableError("deconvolution diverges everywhere");
        cut = *cf - *cg;
        reach = *cg;
    } else if (cg) {
        reach = *cg;
    } else {
        Rational rf = f.rate(), rg = g.rate();
        if (rf > rg)
            throw UnstableError("deconvolution diverges: rate " + to_string(rf) + " exceeds rate " +
                                to_string(rg));
        if (rf == rg) {
            reach = std::max(f.tail_start(), g.tail_start()) + lcm_of(f.period(), g.period());
        } else {
            auto [f_lo, f_hi] = detail::offset_bounds(f);
            Rational g_lo = detail::offset_bounds(g).first;
            reach = (f_hi - f_lo + g(Rational(0)) - g_lo) / (rg - rf);
            if (reach < 0)
                reach = 0;
        }
    }
    Rational tail = f.tail_start();
    Rational period = f.period();
    Rational horizon = cut ? Rational(*cut + 1) : Rational(tail + period);

    Layout lf = layout(f, horizon + reach);
    Layout lg = layout(g, reach);
    std::vector<Element> elems;
    for_each_part(lf.pl, [&](bool fp, const Rational& x0, const Rational& x1, const Rational& fv,
                             const Rational& fs) {
        for_each_part(lg.pl, [&](bool gp, const Rational& u0, const Rational& u1, const Rational& gv,
                                 const Rational& gs) {
            if (fp && gp) {
                elems.push_back(Element{x0 - u0, x0 - u0, fv - gv, 0, true});
            } else if (fp) {
                // s in (u0, u1), t = x0 - s.
                Rational lo = x0 - u1;
                push_open(elems, lo, x0 - u0, fv - gv - gs * (u1 - u0), gs);
            } else if (gp) {
                push_open(elems, x0 - u0, x1 - u0, fv - gv, fs);
            } else {
                Rational lo = x0 - u1;
                Rational hi = x1 - u0;
                Rational start = fv - gv - gs * (u1 - u0);
                if (fs >= gs)
                    push_two(elems, lo, x1 - u1, hi, start, fs, gs);
                else
                    push_two(elems, lo, x0 - u0, hi, start, gs, fs);
            }
        });
    });
    PieceList env = upper_envelope(clip(std::move(elems), horizon), horizon);
    if (cut)
        return detail::finalize_cut(env, *cut);
    return detail::build(env, tail, period, f.increment());
}

}  // namespace tsnnc
