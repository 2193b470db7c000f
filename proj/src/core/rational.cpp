#include "mlbisim/core/rational.h"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace mlbisim {

namespace {

__extension__ typedef __int128 Wide;

std::int64_t narrow(Wide value) {
    if (value > std::numeric_limits<std::int64_t>::max() || value < std::numeric_limits<std::int64_t>::min()) {
        throw std::overflow_error("rational arithmetic overflow");
    }
    return static_cast<std::int64_t>(value);
}

Wide gcd_wide(Wide a, Wide b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        Wide t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Rational make_reduced(Wide num, Wide den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    Wide g = gcd_wide(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return Rational(narrow(num), narrow(den));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw std::domain_error("rational with zero denominator");
    normalize();
}

void Rational::normalize() {
    if (den_ < 0) {
        if (num_ == std::numeric_limits<std::int64_t>::min() || den_ == std::numeric_limits<std::int64_t>::min()) {
            throw std::overflow_error("rational arithmetic overflow");
        }
        num_ = -num_;
        den_ = -den_;
    }
    std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

std::int64_t Rational::to_integer() const {
    if (den_ != 1) throw std::domain_error("value " + to_string() + " is not an integer");
    return num_;
}

Rational Rational::operator-() const {
    if (num_ == std::numeric_limits<std::int64_t>::min()) throw std::overflow_error("rational arithmetic overflow");
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

Rational& Rational::operator+=(const Rational& rhs) {
    if (den_ == rhs.den_) {
        *this = make_reduced(Wide(num_) + rhs.num_, den_);
    } else {
        *this = make_reduced(Wide(num_) * rhs.den_ + Wide(rhs.num_) * den_, Wide(den_) * rhs.den_);
    }
    return *this;
}

Rational& Rational::operator-=(const Rational& rhs) { return *this += -rhs; }

Rational& Rational::operator*=(const Rational& rhs) {
    *this = make_reduced(Wide(num_) * rhs.num_, Wide(den_) * rhs.den_);
    return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
    if (rhs.num_ == 0) throw std::domain_error("division by zero");
    *this = make_reduced(Wide(num_) * rhs.den_, Wide(den_) * rhs.num_);
    return *this;
}

std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs) {
    Wide l = Wide(lhs.num_) * rhs.den_;
    Wide r = Wide(rhs.num_) * lhs.den_;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string Rational::to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

bool Rational::has_finite_decimal() const {
    std::int64_t d = den_;
    while (d % 2 == 0) d /= 2;
    while (d % 5 == 0) d /= 5;
    return d == 1;
}

std::string Rational::to_decimal_string() const {
    if (den_ == 1) return std::to_string(num_);
    if (!has_finite_decimal()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", to_double());
        return buf;
    }
    Wide n = num_;
    bool negative = n < 0;
    if (negative) n = -n;
    std::string out = negative ? "-" : "";
    Wide whole = n / den_;
    Wide rem = n % den_;
    out += std::to_string(static_cast<std::int64_t>(whole));
    out += '.';
    while (rem != 0) {
        rem *= 10;
        out += static_cast<char>('0' + static_cast<int>(rem / den_));
        rem %= den_;
    }
    return out;
}

Rational Rational::parse(std::string_view text) {
    auto fail = [&]() -> Rational { throw std::invalid_argument("malformed number '" + std::string(text) + "'"); };
    if (text.empty()) return fail();
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational n = parse(text.substr(0, slash));
        Rational d = parse(text.substr(slash + 1));
        if (d.is_zero()) return fail();
        return n / d;
    }
    std::size_t pos = 0;
    bool negative = false;
    if (text[0] == '-' || text[0] == '+') {
        negative = text[0] == '-';
        pos = 1;
    }
    Wide num = 0;
    Wide den = 1;
    bool seen_digit = false;
    bool seen_point = false;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (c == '.') {
            if (seen_point) return fail();
            seen_point = true;
            continue;
        }
        if (c == 'e' || c == 'E') {
            int exponent = std::stoi(std::string(text.substr(pos + 1)));
            for (; exponent > 0; --exponent) num *= 10;
            for (; exponent < 0; ++exponent) den *= 10;
            pos = text.size();
            break;
        }
        if (c < '0' || c > '9') return fail();
        seen_digit = true;
        num = num * 10 + (c - '0');
        if (seen_point) den *= 10;
        if (num > (Wide(1) << 100) || den > (Wide(1) << 100)) throw std::overflow_error("number too long");
    }
    if (!seen_digit) return fail();
    return make_reduced(negative ? -num : num, den);
}

Rational Rational::approximate(double value, std::int64_t max_den) {
    if (!std::isfinite(value)) throw std::domain_error("cannot approximate a non-finite value");
    // Best rational approximation via the continued fraction convergents.
    bool negative = value < 0;
    double x = std::fabs(value);
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = x;
    for (int iter = 0; iter < 64; ++iter) {
        double a_real = std::floor(frac);
        if (a_real > 9.0e15) break;
        auto a = static_cast<std::int64_t>(a_real);
        std::int64_t q2 = a * q1 + q0;
        if (q2 > max_den) break;
        std::int64_t p2 = a * p1 + p0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        double rest = frac - a_real;
        if (rest < 1e-15 || std::fabs(static_cast<double>(p1) / static_cast<double>(q1) - x) < 1e-15) break;
        frac = 1.0 / rest;
    }
    if (q1 == 0) return Rational(static_cast<std::int64_t>(std::llround(value)));
    return Rational(negative ? -p1 : p1, q1);
}

std::size_t Rational::hash() const {
    std::uint64_t h = static_cast<std::uint64_t>(num_) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(den_) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

}  // namespace mlbisim
