#include "tsnnc/rational.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace tsnnc {

namespace {

Rational parse_decimal(std::string_view text)
{
    std::string mantissa;
    long exponent = 0;
    bool negative = false;
    std::size_t pos = 0;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
        negative = text[pos] == '-';
        ++pos;
    }
    long frac_digits = 0;
    bool seen_dot = false;
    bool any_digit = false;
    for (; pos < text.size(); ++pos) {
        char ch = text[pos];
        if (ch >= '0' && ch <= '9') {
            mantissa.push_back(ch);
            any_digit = true;
            if (seen_dot)
                ++frac_digits;
        } else if (ch == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (!any_digit)
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        std::string_view rest = text.substr(pos);
        if (!rest.empty() && rest.front() == '+')
            rest.remove_prefix(1);
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), exponent);
        if (ec != std::errc() || ptr != rest.data() + rest.size())
            throw std::invalid_argument("bad exponent in '" + std::string(text) + "'");
        pos = text.size();
    }
    if (pos != text.size())
        throw std::invalid_argument("trailing characters in '" + std::string(text) + "'");

    mpz_class num(mantissa, 10);
    long shift = exponent - frac_digits;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
    Rational r = shift >= 0 ? Rational(num * scale) : Rational(num, scale);
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text)
{
    while (!text.empty() && text.front() == ' ')
        text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ')
        text.remove_suffix(1);
    auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return parse_decimal(text);
    Rational num = parse_decimal(text.substr(0, slash));
    Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0)
        throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return num / den;
}

Rational from_double(double value)
{
    if (!std::isfinite(value))
        throw std::invalid_argument("non-finite number");
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc())
        throw std::invalid_argument("cannot format number");
    return parse_decimal(std::string_view(buf.data(), static_cast<std::size_t>(ptr - buf.data())));
}

Rational floor_of(const Rational& x)
{
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return Rational(q);
}

Rational ceil_of(const Rational& x)
{
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return Rational(q);
}

Rational lcm_of(const Rational& a, const Rational& b)
{
    if (a <= 0 || b <= 0)
        throw std::invalid_argument("lcm of non-positive rationals");
    // lcm(p/q, r/s) = lcm(p, r) / gcd(q, s) for reduced fractions.
    mpz_class n, d;
    mpz_lcm(n.get_mpz_t(), a.get_num_mpz_t(), b.get_num_mpz_t());
    mpz_gcd(d.get_mpz_t(), a.get_den_mpz_t(), b.get_den_mpz_t());
    Rational r(n, d);
    r.canonicalize();
    return r;
}

double to_double(const Rational& x) { return x.get_d(); }

std::string to_string(const Rational& x) { return x.get_str(); }

}  // namespace tsnnc
