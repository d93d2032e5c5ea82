#pragma once

#include <utility>
#include <vector>

#include "tsnnc/curve.hpp"

namespace tsnnc::detail {

// Pieces covering the finite window [0, end).
struct PieceList {
    std::vector<Piece> pieces;
    Rational end;

    const Rational& end_of(std::size_t i) const
    {
        return i + 1 < pieces.size() ? pieces[i + 1].start : end;
    }
    // Left limit of piece i at its right boundary.
    Rational value_before_end(std::size_t i) const
    {
        const Piece& p = pieces[i];
        return p.right + p.slope * (end_of(i) - p.start);
    }
};

// The curve's finite part laid out explicitly on [0, horizon).
PieceList unfold(const Curve& f, const Rational& horizon);

// Merges consecutive pieces that describe one affine run.
std::vector<Piece> normalize(std::vector<Piece> pieces);

// Curve from explicit pieces on [0, H), H >= tail_start + period.
Curve build(const PieceList& pl, const Rational& tail_start, const Rational& period,
            const Rational& increment);

// Curve equal to the pieces on [0, cut] and +infinity afterwards.
Curve finalize_cut(const PieceList& pl, const Rational& cut);

// Same function with period d; requires f.linear_from().
Curve retime(const Curve& f, const Rational& d);

// Gives a curve with an affine tail the period of the other operand so that
// tail periods do not multiply needlessly.
std::pair<Curve, Curve> harmonize(const Curve& f, const Curve& g);

// (inf, sup) of f(t) - rate * t over the finite part, one-sided limits included.
std::pair<Rational, Rational> offset_bounds(const Curve& f);

}  // namespace tsnnc::detail
