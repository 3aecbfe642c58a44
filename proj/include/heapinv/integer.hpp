#pragma once

#include <compare>
#include <concepts>
#include <limits>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace heapinv {

using BigInt = boost::multiprecision::cpp_int;

// Arbitrary-precision integer. Values that fit in int64 stay unboxed; the
// big representation is only used after an overflow.
class Integer {
public:
    Integer() = default;
    template <std::integral T>
    Integer(T v) {  // NOLINT: implicit on purpose
        if constexpr (std::is_unsigned_v<T> && sizeof(T) >= sizeof(std::int64_t)) {
            if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
                big_ = std::make_shared<const BigInt>(v);
                return;
            }
        }
        small_ = static_cast<std::int64_t>(v);
    }
    explicit Integer(const BigInt& v);

    static std::optional<Integer> parse(std::string_view digits);

    bool is_small() const { return !big_; }
    std::optional<std::int64_t> to_int64() const;
    BigInt to_big() const;
    bool is_zero() const { return !big_ && small_ == 0; }
    int sign() const;

    std::string to_string() const;
    std::size_t hash() const;

    friend Integer operator+(const Integer& a, const Integer& b);
    friend Integer operator-(const Integer& a, const Integer& b);
    friend Integer operator*(const Integer& a, const Integer& b);
    // truncated toward zero; callers check the divisor
    friend Integer operator/(const Integer& a, const Integer& b);
    friend Integer operator%(const Integer& a, const Integer& b);
    Integer operator-() const;

    friend bool operator==(const Integer& a, const Integer& b);
    friend std::strong_ordering operator<=>(const Integer& a, const Integer& b);

private:
    std::int64_t small_ = 0;
    std::shared_ptr<const BigInt> big_;  // non-null only when out of int64 range
};

}  // namespace heapinv
