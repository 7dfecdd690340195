#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "bigint.hpp"

namespace skt {

// Laurent polynomial in q^{1/2} over the integers, the coefficient ring of
// every quantum torus here.  Exponents of q^{1/2} are stored doubled, so a
// key k stands for q^{k/2} and all arithmetic is integral.  The term map
// never holds a zero coefficient, making equality of maps equality of values.
class HalfLaurent {
public:
    HalfLaurent() = default;
    HalfLaurent(long long constant) {
        if (constant != 0) terms_[0] = BigInt(constant);
    }

    // q^{num/2}
    static HalfLaurent q_half(long long num, BigInt coeff = BigInt(1)) {
        HalfLaurent r;
        if (!coeff.is_zero()) r.terms_[num] = std::move(coeff);
        return r;
    }
    static HalfLaurent one() { return HalfLaurent(1); }

    bool is_zero() const { return terms_.empty(); }
    bool is_one() const {
        return terms_.size() == 1 && terms_.begin()->first == 0 &&
               terms_.begin()->second == BigInt(1);
    }

    // If the value is c*q^{k/2} with c = +-1, report (k, c).
    std::optional<std::pair<long long, int>> single_power() const {
        if (terms_.size() != 1) return std::nullopt;
        const auto& [k, c] = *terms_.begin();
        if (c == BigInt(1)) return std::make_pair(k, 1);
        if (c == BigInt(-1)) return std::make_pair(k, -1);
        return std::nullopt;
    }

    const std::map<long long, BigInt>& terms() const { return terms_; }

    friend bool operator==(const HalfLaurent& a, const HalfLaurent& b) {
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const HalfLaurent& a, const HalfLaurent& b) { return !(a == b); }
    friend bool operator<(const HalfLaurent& a, const HalfLaurent& b) {
        // arbitrary strict order for container keys
        auto ia = a.terms_.begin(), ib = b.terms_.begin();
        for (; ia != a.terms_.end() && ib != b.terms_.end(); ++ia, ++ib) {
            if (ia->first != ib->first) return ia->first < ib->first;
            if (ia->second != ib->second) {
                BigInt d = ia->second - ib->second;
                return d.negative();
            }
        }
        return ia == a.terms_.end() && ib != b.terms_.end();
    }

    friend HalfLaurent operator+(const HalfLaurent& a, const HalfLaurent& b) {
        HalfLaurent r = a;
        for (const auto& [k, c] : b.terms_) r.add_term(k, c);
        return r;
    }
    friend HalfLaurent operator-(const HalfLaurent& a, const HalfLaurent& b) {
        HalfLaurent r = a;
        for (const auto& [k, c] : b.terms_) r.add_term(k, -c);
        return r;
    }
    friend HalfLaurent operator-(const HalfLaurent& a) {
        HalfLaurent r;
        for (const auto& [k, c] : a.terms_) r.terms_[k] = -c;
        return r;
    }
    friend HalfLaurent operator*(const HalfLaurent& a, const HalfLaurent& b) {
        HalfLaurent r;
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_)
                r.add_term(ka + kb, ca * cb);
        return r;
    }
    HalfLaurent& operator+=(const HalfLaurent& o) { *this = *this + o; return *this; }
    HalfLaurent& operator-=(const HalfLaurent& o) { *this = *this - o; return *this; }
    HalfLaurent& operator*=(const HalfLaurent& o) { *this = *this * o; return *this; }

    void add_term(long long doubled_exp, const BigInt& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(doubled_exp);
        if (it == terms_.end()) {
            terms_.emplace(doubled_exp, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    // Multiply by q^{num/2} in place.
    void shift(long long num) {
        if (num == 0 || terms_.empty()) return;
        std::map<long long, BigInt> shifted;
        for (auto& [k, c] : terms_) shifted.emplace(k + num, std::move(c));
        terms_ = std::move(shifted);
    }

    // Coefficient action of the reflection anti-involution: q^{1/2} -> q^{-1/2}.
    HalfLaurent bar() const {
        HalfLaurent r;
        for (const auto& [k, c] : terms_) r.terms_[-k] = c;
        return r;
    }

    // Specialization q^{1/2} := 1.
    BigInt evaluate_q1() const {
        BigInt s;
        for (const auto& [k, c] : terms_) { (void)k; s += c; }
        return s;
    }

    // Canonical text: terms sorted by ascending exponent, `c*q^e` with e the
    // halved exponent when integral and `(k/2)` otherwise.  A lone constant
    // prints as the bare integer.
    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [k, c] : terms_) {
            if (!first) os << " + ";
            first = false;
            os << c.to_string();
            if (k != 0) {
                os << "*q^";
                if (k % 2 == 0) os << (k / 2);
                else os << "(" << k << "/2)";
            }
        }
        return os.str();
    }

private:
    std::map<long long, BigInt> terms_;
};

} // namespace skt
