#include "heapinv/integer.hpp"

#include <functional>
#include <limits>

namespace heapinv {

Integer::Integer(const BigInt& v) {
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
        small_ = static_cast<std::int64_t>(v);
    else
        big_ = std::make_shared<const BigInt>(v);
}

std::optional<Integer> Integer::parse(std::string_view digits) {
    if (digits.empty())
        return std::nullopt;
    std::size_t i = 0;
    bool neg = false;
    if (digits[0] == '-') {
        neg = true;
        i = 1;
    }
    if (i == digits.size())
        return std::nullopt;
    BigInt v = 0;
    for (; i < digits.size(); ++i) {
        char c = digits[i];
        if (c < '0' || c > '9')
            return std::nullopt;
        v = v * 10 + (c - '0');
    }
    return Integer(neg ? BigInt(-v) : v);
}

std::optional<std::int64_t> Integer::to_int64() const {
    if (big_)
        return std::nullopt;
    return small_;
}

BigInt Integer::to_big() const { return big_ ? *big_ : BigInt(small_); }

int Integer::sign() const {
    if (big_)
        return big_->sign();
    return small_ < 0 ? -1 : (small_ > 0 ? 1 : 0);
}

std::string Integer::to_string() const { return big_ ? big_->str() : std::to_string(small_); }

std::size_t Integer::hash() const {
    if (!big_)
        return std::hash<std::int64_t>{}(small_);
    return std::hash<std::string>{}(big_->str());
}

Integer operator+(const Integer& a, const Integer& b) {
    std::int64_t r;
    if (!a.big_ && !b.big_ && !__builtin_add_overflow(a.small_, b.small_, &r))
        return Integer(r);
    return Integer(BigInt(a.to_big() + b.to_big()));
}

Integer operator-(const Integer& a, const Integer& b) {
    std::int64_t r;
    if (!a.big_ && !b.big_ && !__builtin_sub_overflow(a.small_, b.small_, &r))
        return Integer(r);
    return Integer(BigInt(a.to_big() - b.to_big()));
}

Integer operator*(const Integer& a, const Integer& b) {
    std::int64_t r;
    if (!a.big_ && !b.big_ && !__builtin_mul_overflow(a.small_, b.small_, &r))
        return Integer(r);
    return Integer(BigInt(a.to_big() * b.to_big()));
}

Integer operator/(const Integer& a, const Integer& b) {
    if (!a.big_ && !b.big_ && !(a.small_ == std::numeric_limits<std::int64_t>::min() && b.small_ == -1))
        return Integer(a.small_ / b.small_);
    // cpp_int division truncates toward zero, same as C
    return Integer(BigInt(a.to_big() / b.to_big()));
}

Integer operator%(const Integer& a, const Integer& b) {
    if (!a.big_ && !b.big_) {
        if (b.small_ == -1)
            return Integer(0);
        return Integer(a.small_ % b.small_);
    }
    return Integer(BigInt(a.to_big() % b.to_big()));
}

Integer Integer::operator-() const {
    if (!big_ && small_ != std::numeric_limits<std::int64_t>::min())
        return Integer(-small_);
    return Integer(BigInt(-to_big()));
}

bool operator==(const Integer& a, const Integer& b) {
    if (!a.big_ && !b.big_)
        return a.small_ == b.small_;
    if (a.big_ && b.big_)
        return *a.big_ == *b.big_;
    return false;  // normalized: a big value never fits in int64
}

std::strong_ordering operator<=>(const Integer& a, const Integer& b) {
    if (!a.big_ && !b.big_)
        return a.small_ <=> b.small_;
    int c = a.to_big().compare(b.to_big());
    return c < 0 ? std::strong_ordering::less : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

}  // namespace heapinv
