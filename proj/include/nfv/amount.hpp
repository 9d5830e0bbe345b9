#ifndef NFV_AMOUNT_HPP
#define NFV_AMOUNT_HPP

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace nfv {

/**
 * Fixed-point resource quantity with a resolution of one millionth of the
 * display unit.
 *
 * VM processing amounts are expressed in mega-cycles per second and link
 * amounts in megabits per second, so one micro-unit is exactly one cycle per
 * second or one bit per second. Charges and releases are integer operations,
 * which keeps the ledger conservation identity exact.
 */
class Amount
{
public:
    static constexpr std::int64_t scale = 1'000'000;

    constexpr Amount() = default;

    static constexpr Amount from_micros(std::int64_t micros) { return Amount{micros}; }

    /// Rounds a real quantity in display units to the nearest micro-unit.
    static Amount from_units(double units)
    {
        if (!std::isfinite(units)) {
            throw std::domain_error("non-finite resource amount");
        }
        double const micros = std::round(units * static_cast<double>(scale));
        if (std::fabs(micros) > static_cast<double>(std::numeric_limits<std::int64_t>::max() / 4)) {
            throw std::domain_error("resource amount out of range");
        }
        return Amount{static_cast<std::int64_t>(micros)};
    }

    constexpr std::int64_t micros() const { return micros_; }
    double units() const { return static_cast<double>(micros_) / static_cast<double>(scale); }
    /// Value in base SI units (cycles/s or bits/s).
    double base() const { return static_cast<double>(micros_); }

    constexpr Amount& operator+=(Amount rhs)
    {
        micros_ += rhs.micros_;
        return *this;
    }
    constexpr Amount& operator-=(Amount rhs)
    {
        micros_ -= rhs.micros_;
        return *this;
    }
    friend constexpr Amount operator+(Amount a, Amount b) { return a += b; }
    friend constexpr Amount operator-(Amount a, Amount b) { return a -= b; }
    friend constexpr auto operator<=>(Amount, Amount) = default;

    /// Exact decimal rendering, e.g. "1200.000000".
    std::string to_string() const
    {
        std::int64_t const whole = micros_ / scale;
        std::int64_t frac = micros_ % scale;
        bool const negative = micros_ < 0;
        if (frac < 0) {
            frac = -frac;
        }
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%s%lld.%06lld", (negative && whole == 0) ? "-" : "",
                      static_cast<long long>(whole), static_cast<long long>(frac));
        return buf;
    }

private:
    constexpr explicit Amount(std::int64_t micros) : micros_(micros) {}

    std::int64_t micros_ = 0;
};

} // namespace nfv

#endif // NFV_AMOUNT_HPP
