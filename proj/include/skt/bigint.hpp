#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace skt {

// Arbitrary-precision signed integer, sign + little-endian 32-bit limbs.
// State sums accumulate products of many monomial coefficients; fixed-width
// integers could overflow without warning, so all coefficient arithmetic
// goes through this type.
class BigInt {
public:
    BigInt() = default;
    BigInt(long long v) {
        if (v < 0) { neg_ = true; }
        unsigned long long u = neg_ ? 0ull - static_cast<unsigned long long>(v)
                                    : static_cast<unsigned long long>(v);
        while (u) { mag_.push_back(static_cast<uint32_t>(u & 0xffffffffu)); u >>= 32; }
    }

    bool is_zero() const { return mag_.empty(); }
    bool negative() const { return neg_; }

    friend bool operator==(const BigInt& a, const BigInt& b) {
        return a.neg_ == b.neg_ && a.mag_ == b.mag_;
    }
    friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }

    friend BigInt operator-(const BigInt& a) {
        BigInt r = a;
        if (!r.mag_.empty()) r.neg_ = !r.neg_;
        return r;
    }

    friend BigInt operator+(const BigInt& a, const BigInt& b) {
        if (a.neg_ == b.neg_) {
            BigInt r;
            r.mag_ = add_mag(a.mag_, b.mag_);
            r.neg_ = a.neg_ && !r.mag_.empty();
            return r;
        }
        int c = cmp_mag(a.mag_, b.mag_);
        BigInt r;
        if (c == 0) return r;
        if (c > 0) { r.mag_ = sub_mag(a.mag_, b.mag_); r.neg_ = a.neg_; }
        else       { r.mag_ = sub_mag(b.mag_, a.mag_); r.neg_ = b.neg_; }
        if (r.mag_.empty()) r.neg_ = false;
        return r;
    }
    friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

    friend BigInt operator*(const BigInt& a, const BigInt& b) {
        BigInt r;
        if (a.is_zero() || b.is_zero()) return r;
        r.mag_.assign(a.mag_.size() + b.mag_.size(), 0);
        for (size_t i = 0; i < a.mag_.size(); ++i) {
            uint64_t carry = 0;
            for (size_t j = 0; j < b.mag_.size(); ++j) {
                uint64_t cur = static_cast<uint64_t>(a.mag_[i]) * b.mag_[j] +
                               r.mag_[i + j] + carry;
                r.mag_[i + j] = static_cast<uint32_t>(cur & 0xffffffffu);
                carry = cur >> 32;
            }
            r.mag_[i + b.mag_.size()] += static_cast<uint32_t>(carry);
        }
        while (!r.mag_.empty() && r.mag_.back() == 0) r.mag_.pop_back();
        r.neg_ = (a.neg_ != b.neg_) && !r.mag_.empty();
        return r;
    }

    BigInt& operator+=(const BigInt& o) { *this = *this + o; return *this; }
    BigInt& operator-=(const BigInt& o) { *this = *this - o; return *this; }
    BigInt& operator*=(const BigInt& o) { *this = *this * o; return *this; }

    // Returns the value as int64 when it fits; used by tests only.
    long long to_int64() const {
        if (mag_.size() > 2) throw std::overflow_error("BigInt::to_int64");
        unsigned long long u = 0;
        for (size_t i = mag_.size(); i-- > 0;) u = (u << 32) | mag_[i];
        if (!neg_ && u > 0x7fffffffffffffffull) throw std::overflow_error("BigInt::to_int64");
        if (neg_ && u > 0x8000000000000000ull) throw std::overflow_error("BigInt::to_int64");
        return neg_ ? -static_cast<long long>(u) : static_cast<long long>(u);
    }

    std::string to_string() const {
        if (mag_.empty()) return "0";
        std::vector<uint32_t> tmp = mag_;
        std::string digits;
        while (!tmp.empty()) {
            uint64_t rem = 0;
            for (size_t i = tmp.size(); i-- > 0;) {
                uint64_t cur = (rem << 32) | tmp[i];
                tmp[i] = static_cast<uint32_t>(cur / 1000000000u);
                rem = cur % 1000000000u;
            }
            while (!tmp.empty() && tmp.back() == 0) tmp.pop_back();
            std::string chunk = std::to_string(rem);
            if (!tmp.empty()) chunk = std::string(9 - chunk.size(), '0') + chunk;
            digits = chunk + digits;
        }
        return neg_ ? "-" + digits : digits;
    }

private:
    static int cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        for (size_t i = a.size(); i-- > 0;)
            if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
        return 0;
    }
    static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a,
                                         const std::vector<uint32_t>& b) {
        const auto& big = a.size() >= b.size() ? a : b;
        const auto& small = a.size() >= b.size() ? b : a;
        std::vector<uint32_t> r = big;
        uint64_t carry = 0;
        for (size_t i = 0; i < r.size(); ++i) {
            uint64_t cur = static_cast<uint64_t>(r[i]) + (i < small.size() ? small[i] : 0) + carry;
            r[i] = static_cast<uint32_t>(cur & 0xffffffffu);
            carry = cur >> 32;
            if (!carry && i >= small.size()) break;
        }
        if (carry) r.push_back(static_cast<uint32_t>(carry));
        return r;
    }
    // requires |a| >= |b|
    static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a,
                                         const std::vector<uint32_t>& b) {
        std::vector<uint32_t> r = a;
        int64_t borrow = 0;
        for (size_t i = 0; i < r.size(); ++i) {
            int64_t cur = static_cast<int64_t>(r[i]) - (i < b.size() ? b[i] : 0) - borrow;
            borrow = cur < 0;
            if (cur < 0) cur += (1ll << 32);
            r[i] = static_cast<uint32_t>(cur);
            if (!borrow && i >= b.size()) break;
        }
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }

    bool neg_ = false;
    std::vector<uint32_t> mag_;
};

} // namespace skt
