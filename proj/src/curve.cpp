#include "tsnnc/curve.hpp"

#include <algorithm>
#include <ostream>

#include "curve_detail.hpp"

namespace tsnnc {

using detail::PieceList;

Curve::Curve()
    : pieces_{Piece{0, 0, 0, 0}}, tail_start_(0), period_(1), increment_(0)
{
}

Curve Curve::make(std::vector<Piece> pieces, Rational tail_start, Rational period,
                  Rational increment, std::optional<Rational> cutoff)
{
    if (pieces.empty() || pieces.front().start != 0)
        throw std::invalid_argument("curve: first piece must start at 0");
    if (period <= 0)
        throw std::invalid_argument("curve: period must be positive");
    if (tail_start < 0)
        throw std::invalid_argument("curve: negative tail start");
    for (std::size_t i = 1; i < pieces.size(); ++i) {
        if (pieces[i].start <= pieces[i - 1].start)
            throw std::invalid_argument("curve: piece starts must be strictly increasing");
    }
    Rational end = tail_start + period;
    if (pieces.back().start >= end)
        throw std::invalid_argument("curve: pieces extend beyond tail_start + period");
    if (cutoff && *cutoff < 0)
        throw std::invalid_argument("curve: negative cutoff");

    Curve c;
    c.pieces_ = detail::normalize(std::move(pieces));
    c.tail_start_ = std::move(tail_start);
    c.period_ = std::move(period);
    c.increment_ = std::move(increment);
    c.cutoff_ = std::move(cutoff);
    return c;
}

namespace {

// Index of the piece whose domain {start} U (start, next) contains t, t in [0, end).
std::size_t locate(const std::vector<Piece>& pieces, const Rational& t)
{
    auto it = std::upper_bound(pieces.begin(), pieces.end(), t,
                               [](const Rational& x, const Piece& p) { return x < p.start; });
    return static_cast<std::size_t>(it - pieces.begin()) - 1;
}

Rational value_in(const Piece& p, const Rational& t)
{
    if (t == p.start)
        return p.at;
    return p.right + p.slope * (t - p.start);
}

}  // namespace

Rational Curve::operator()(const Rational& t) const
{
    if (t < 0)
        throw std::domain_error("curve evaluated at negative time");
    if (is_infinite_at(t))
        throw std::domain_error("curve is infinite at t = " + to_string(t));
    Rational end = tail_start_ + period_;
    if (t < end)
        return value_in(pieces_[locate(pieces_, t)], t);
    Rational k = floor_of((t - tail_start_) / period_);
    Rational local = t - k * period_;
    return value_in(pieces_[locate(pieces_, local)], local) + k * increment_;
}

Rational Curve::right_limit(const Rational& t) const
{
    if (t < 0)
        throw std::domain_error("curve evaluated at negative time");
    if (cutoff_ && t >= *cutoff_)
        throw std::domain_error("curve right limit is infinite");
    Rational end = tail_start_ + period_;
    Rational local = t;
    Rational k = 0;
    if (t >= end) {
        k = floor_of((t - tail_start_) / period_);
        local = t - k * period_;
    }
    const Piece& p = pieces_[locate(pieces_, local)];
    Rational v = p.right + p.slope * (local - p.start);
    return v + k * increment_;
}

Rational Curve::left_limit(const Rational& t) const
{
    if (t <= 0)
        throw std::domain_error("left limit requires t > 0");
    if (is_infinite_at(t))
        throw std::domain_error("curve left limit is infinite");
    Rational end = tail_start_ + period_;
    Rational local = t;
    Rational k = 0;
    if (t > end) {
        k = ceil_of((t - end) / period_);
        local = t - k * period_;
    }
    // Last piece starting strictly before `local`.
    auto it = std::lower_bound(pieces_.begin(), pieces_.end(), local,
                               [](const Piece& p, const Rational& x) { return p.start < x; });
    const Piece& p = *(it - 1);
    return p.right + p.slope * (local - p.start) + k * increment_;
}

bool Curve::is_nc() const
{
    Rational horizon = tail_start_ + period_;
    if (cutoff_ && *cutoff_ + 1 > horizon)
        horizon = *cutoff_ + 1;
    PieceList pl = detail::unfold(*this, horizon);
    Rational last = 0;
    bool first = true;
    for (std::size_t i = 0; i < pl.pieces.size(); ++i) {
        const Piece& p = pl.pieces[i];
        if (is_infinite_at(p.start))
            break;
        if (p.at < 0 || (!first && p.at < last))
            return false;
        if (p.slope < 0 || p.right < p.at)
            return false;
        Rational next = pl.end_of(i);
        if (cutoff_ && next > *cutoff_)
            next = *cutoff_;
        last = p.right + p.slope * (next - p.start);
        first = false;
    }
    return increment_ >= 0;
}

std::optional<Rational> Curve::linear_from() const
{
    if (cutoff_)
        return std::nullopt;
    std::size_t i = locate(pieces_, tail_start_);
    if (i + 1 != pieces_.size())
        return std::nullopt;
    const Piece& p = pieces_[i];
    if (p.slope * period_ != increment_)
        return std::nullopt;
    if (p.start == tail_start_ && p.at != p.right)
        return std::nullopt;
    return p.start;
}

namespace detail {

Curve retime(const Curve& f, const Rational& d)
{
    std::optional<Rational> x = f.linear_from();
    if (!x)
        throw std::logic_error("retime: curve has no affine tail");
    if (f.period() == d)
        return f;
    return Curve::make(f.pieces(), *x + d, d, f.rate() * d);
}

std::pair<Curve, Curve> harmonize(const Curve& f, const Curve& g)
{
    bool lf = f.linear_from().has_value();
    bool lg = g.linear_from().has_value();
    if (lf && !g.cutoff() && f.period() != g.period())
        return {retime(f, g.period()), g};
    if (lg && !f.cutoff() && f.period() != g.period())
        return {f, retime(g, f.period())};
    return {f, g};
}

}  // namespace detail

bool operator==(const Curve& a_in, const Curve& b_in)
{
    auto [a, b] = detail::harmonize(a_in, b_in);
    if (a.cutoff_ != b.cutoff_)
        return false;
    Rational horizon = std::max(a.tail_start_, b.tail_start_) + lcm_of(a.period_, b.period_);
    if (a.cutoff_)
        horizon = std::max(horizon, Rational(*a.cutoff_ + 1));
    if (a.rate() != b.rate())
        return false;
    PieceList pa = detail::unfold(a, horizon);
    PieceList pb = detail::unfold(b, horizon);
    auto na = detail::normalize(std::move(pa.pieces));
    auto nb = detail::normalize(std::move(pb.pieces));
    if (a.cutoff_) {
        auto trim = [&](std::vector<Piece>& v) {
            while (!v.empty() && v.back().start > *a.cutoff_)
                v.pop_back();
            if (!v.empty() && v.back().start == *a.cutoff_) {
                v.back().right = v.back().at;
                v.back().slope = 0;
            }
        };
        trim(na);
        trim(nb);
    }
    if (na.size() != nb.size())
        return false;
    for (std::size_t i = 0; i < na.size(); ++i) {
        if (na[i].start != nb[i].start || na[i].at != nb[i].at || na[i].right != nb[i].right ||
            na[i].slope != nb[i].slope)
            return false;
    }
    return true;
}

Rational evaluate(const Curve& f, const Rational& t) { return f(t); }

// -- constructors -----------------------------------------------------------

Curve make_zero() { return make_constant(0); }

Curve make_constant(const Rational& value)
{
    return Curve::make({Piece{0, value, value, 0}}, 0, 1, 0);
}

Curve make_affine(const Rational& burst, const Rational& rate)
{
    if (burst < 0 || rate < 0)
        throw std::invalid_argument("affine curve: negative burst or rate");
    // Value at 0 is 0 (no data in an empty interval); burst applies on (0, inf).
    if (burst == 0)
        return Curve::make({Piece{0, 0, 0, rate}}, 0, 1, rate);
    return Curve::make({Piece{0, 0, burst, rate}}, 1, 1, rate);
}

Curve make_rate_latency(const Rational& rate, const Rational& latency)
{
    if (rate < 0 || latency < 0)
        throw std::invalid_argument("rate-latency curve: negative rate or latency");
    if (latency == 0)
        return Curve::make({Piece{0, 0, 0, rate}}, 0, 1, rate);
    return Curve::make({Piece{0, 0, 0, 0}, Piece{latency, 0, 0, rate}}, latency, 1, rate);
}

Curve make_burst_delay(const Rational& delay)
{
    if (delay < 0)
        throw std::invalid_argument("burst-delay curve: negative delay");
    return Curve::make({Piece{0, 0, 0, 0}}, delay, 1, 0, delay);
}

Curve make_staircase(const StaircaseSpec& spec)
{
    if (spec.height < 0)
        throw std::invalid_argument("staircase: negative height");
    if (spec.period <= 0)
        throw std::invalid_argument("staircase: period must be positive");
    const Rational& l = spec.height;
    const Rational& p = spec.period;
    Rational v0 = l * ceil_of(-spec.offset / p);
    // First jump instant in [0, p).
    Rational q = spec.offset / p;
    Rational jump = spec.offset - floor_of(q) * p;
    std::vector<Piece> pieces;
    if (jump == 0) {
        pieces.push_back(Piece{0, v0, v0 + l, 0});
    } else {
        pieces.push_back(Piece{0, v0, v0, 0});
        pieces.push_back(Piece{jump, v0, v0 + l, 0});
    }
    return Curve::make(std::move(pieces), 0, p, l);
}

Curve make_continuous(std::span<const Rational> xs, std::span<const Rational> values,
                      const Rational& tail_start, const Rational& period)
{
    if (xs.size() != values.size() || xs.size() < 2)
        throw std::invalid_argument("continuous curve: need matching breakpoints and values");
    if (xs.front() != 0)
        throw std::invalid_argument("continuous curve: first breakpoint must be 0");
    Rational end = tail_start + period;
    Rational v_tail;
    Rational v_end;
    bool have_tail = false;
    bool have_end = false;
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (xs[i + 1] <= xs[i])
            throw std::invalid_argument("continuous curve: breakpoints must increase");
        if (xs[i] == tail_start) {
            v_tail = values[i];
            have_tail = true;
        }
        if (xs[i] < end) {
            Rational slope = (values[i + 1] - values[i]) / (xs[i + 1] - xs[i]);
            pieces.push_back(Piece{xs[i], values[i], values[i], slope});
        }
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] == end) {
            v_end = values[i];
            have_end = true;
        }
    }
    if (!have_tail || !have_end)
        throw std::invalid_argument("continuous curve: breakpoints must include tail bounds");
    return Curve::make(std::move(pieces), tail_start, period, v_end - v_tail);
}

// -- simple transforms -------------------------------------------------------

Curve scale(const Curve& f, const Rational& factor)
{
    if (f.cutoff() && factor < 0)
        throw std::invalid_argument("scale: negative factor on a curve with infinite values");
    std::vector<Piece> out = f.pieces();
    for (Piece& p : out) {
        p.at *= factor;
        p.right *= factor;
        p.slope *= factor;
    }
    return Curve::make(std::move(out), f.tail_start(), f.period(), f.increment() * factor, f.cutoff());
}

Curve add_constant(const Curve& f, const Rational& value)
{
    std::vector<Piece> out = f.pieces();
    for (Piece& p : out) {
        p.at += value;
        p.right += value;
    }
    return Curve::make(std::move(out), f.tail_start(), f.period(), f.increment(), f.cutoff());
}

Curve shift_left(const Curve& f, const Rational& shift)
{
    if (shift < 0)
        throw std::invalid_argument("shift_left: negative shift");
    if (shift == 0)
        return f;
    std::optional<Rational> cut;
    if (f.cutoff()) {
        if (*f.cutoff() < shift)
            throw UnstableError("shift_left: curve is infinite everywhere after the shift");
        cut = *f.cutoff() - shift;
    }
    Rational horizon = shift + f.tail_start() + f.period();
    if (cut)
        horizon = std::max(horizon, Rational(shift + *cut + 1));
    PieceList pl = detail::unfold(f, horizon);
    std::vector<Piece> out;
    for (std::size_t i = 0; i < pl.pieces.size(); ++i) {
        const Piece& p = pl.pieces[i];
        Rational end = pl.end_of(i);
        if (end <= shift)
            continue;
        if (p.start >= shift) {
            out.push_back(Piece{p.start - shift, p.at, p.right, p.slope});
        } else {
            Rational v = p.right + p.slope * (shift - p.start);
            out.push_back(Piece{0, v, v, p.slope});
        }
    }
    PieceList shifted{std::move(out), horizon - shift};
    if (cut)
        return detail::finalize_cut(shifted, *cut);
    Rational tail = f.tail_start() > shift ? Rational(f.tail_start() - shift) : Rational(0);
    return detail::build(shifted, tail, f.period(), f.increment());
}

Rational lower_offset(const Curve& f) { return detail::offset_bounds(f).first; }
Rational upper_offset(const Curve& f) { return detail::offset_bounds(f).second; }

void dump_csv(std::ostream& out, const Curve& f)
{
    out << "t_s,value,right_value,slope\n";
    for (const Piece& p : f.pieces()) {
        out << to_double(p.start) << ',' << to_double(p.at) << ',' << to_double(p.right) << ','
            << to_double(p.slope) << '\n';
    }
    out << "# tail_start=" << to_double(f.tail_start()) << " period=" << to_double(f.period())
        << " increment=" << to_double(f.increment());
    if (f.cutoff())
        out << " infinite_after=" << to_double(*f.cutoff());
    out << '\n';
}

std::ostream& operator<<(std::ostream& out, const Curve& f)
{
    out << "Curve{";
    for (const Piece& p : f.pieces())
        out << "[" << p.start << ": " << p.at << " | " << p.right << " +" << p.slope << "]";
    out << " T=" << f.tail_start() << " d=" << f.period() << " c=" << f.increment();
    if (f.cutoff())
        out << " inf>" << *f.cutoff();
    return out << "}";
}

}  // namespace tsnnc
