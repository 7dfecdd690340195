#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <skt/qcoeff.hpp>

using namespace skt;

namespace {
HalfLaurent q(long long num) { return HalfLaurent::q_half(num); }
}

TEST_CASE("bigint arithmetic and printing") {
    BigInt a(123456789), b(-987654321);
    CHECK((a * b).to_string() == "-121932631112635269");
    CHECK((a + b).to_string() == "-864197532");
    CHECK((b - b).to_string() == "0");
    BigInt big(1);
    for (int i = 0; i < 9; ++i) big *= BigInt(1000000000ll);
    CHECK(big.to_string() == "1" + std::string(81, '0'));
    CHECK((big - big).is_zero());
    CHECK((-big).negative());
    CHECK(BigInt(-5).to_int64() == -5);
}

TEST_CASE("ring operations are exact and canonical") {
    // (q^{1/2})*(q^{1/2}) = q
    CHECK(q(1) * q(1) == q(2));
    // (-q^2 - q^{-2}) + (q^2 + q^{-2}) = 0
    HalfLaurent loop = HalfLaurent(-1) * q(4) + HalfLaurent(-1) * q(-4);
    CHECK((loop + (q(4) + q(-4))).is_zero());
    // (q - q^{-1})(q + q^{-1}) = q^2 - q^{-2}, frozen from the convolution
    HalfLaurent lhs = (q(2) - q(-2)) * (q(2) + q(-2));
    HalfLaurent expect = q(4) - q(-4);
    CHECK(lhs == expect);
}

TEST_CASE("bar involution") {
    CHECK(q(1).bar() == q(-1));
    CHECK(HalfLaurent(5).bar() == HalfLaurent(5));
    HalfLaurent sym = HalfLaurent(-1) * q(4) + HalfLaurent(-1) * q(-4);
    CHECK(sym.bar() == sym);
    // involution and ring homomorphism on random-ish values
    HalfLaurent a = q(3) + HalfLaurent(2) * q(-1) + HalfLaurent(-7);
    HalfLaurent b = q(5) - q(2) + HalfLaurent(3) * q(-4);
    CHECK(a.bar().bar() == a);
    CHECK((a * b).bar() == a.bar() * b.bar());
    CHECK((a + b).bar() == a.bar() + b.bar());
}

TEST_CASE("evaluation at q=1") {
    HalfLaurent loop = HalfLaurent(-1) * q(4) + HalfLaurent(-1) * q(-4);
    CHECK(loop.evaluate_q1().to_int64() == -2);
    CHECK(q(-1).evaluate_q1().to_int64() == 1);
    // q^{3/2} - q^{3/2} - q^{-5/2} = -q^{-5/2}
    HalfLaurent x = q(3) - q(3) - q(-5);
    CHECK(x.evaluate_q1().to_int64() == -1);
    HalfLaurent a = q(3) + HalfLaurent(2) * q(-1);
    HalfLaurent b = q(5) - q(2);
    CHECK((a * b).evaluate_q1() == a.evaluate_q1() * b.evaluate_q1());
    CHECK((a + b).evaluate_q1() == a.evaluate_q1() + b.evaluate_q1());
}

TEST_CASE("canonical rendering") {
    HalfLaurent loop = HalfLaurent(-1) * q(4) + HalfLaurent(-1) * q(-4);
    CHECK(loop.to_string() == "-1*q^-2 + -1*q^2");
    CHECK(q(1).to_string() == "1*q^(1/2)");
    CHECK(q(-5).to_string() == "1*q^(-5/2)");
    CHECK(HalfLaurent(7).to_string() == "7");
    CHECK(HalfLaurent().to_string() == "0");
}
