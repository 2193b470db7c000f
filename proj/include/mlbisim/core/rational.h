#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

namespace mlbisim {

/// Exact rational number with 64-bit numerator and denominator, always kept in
/// lowest terms with a positive denominator. Arithmetic that would overflow
/// throws std::overflow_error instead of wrapping.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT(implicit)
    Rational(std::int64_t num, std::int64_t den);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// Integer value; throws std::domain_error when the value is not integral.
    std::int64_t to_integer() const;

    Rational operator-() const;
    Rational& operator+=(const Rational& rhs);
    Rational& operator-=(const Rational& rhs);
    Rational& operator*=(const Rational& rhs);
    Rational& operator/=(const Rational& rhs);

    friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
    friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
    friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
    friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs);

    /// "n" for integers, "n/d" otherwise.
    std::string to_string() const;

    /// Exact decimal expansion when the denominator has only factors 2 and 5,
    /// otherwise a 17-significant-digit approximation.
    std::string to_decimal_string() const;

    /// Whether to_decimal_string() is exact for this value.
    bool has_finite_decimal() const;

    /// Parses "n", "n/d", or a decimal literal such as "0.125" (exactly).
    static Rational parse(std::string_view text);

    /// Closest rational with denominator at most max_den (continued fractions).
    static Rational approximate(double value, std::int64_t max_den = 1'000'000);

    std::size_t hash() const;

private:
    void normalize();

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace mlbisim

template <>
struct std::hash<mlbisim::Rational> {
    std::size_t operator()(const mlbisim::Rational& r) const noexcept { return r.hash(); }
};
