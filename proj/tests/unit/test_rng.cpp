#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "pbitrc/rng.hpp"

using pbitrc::CounterEngine;
using pbitrc::RngDomain;
using pbitrc::RngStream;

TEST_SUITE("rng") {

TEST_CASE("philox4x32-10 known-answer vectors") {
    using A4 = std::array<std::uint32_t, 4>;
    using A2 = std::array<std::uint32_t, 2>;
    CHECK(pbitrc::philox4x32(A4{0, 0, 0, 0}, A2{0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(pbitrc::philox4x32(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(pbitrc::philox4x32(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("domain keys are distinct") {
    std::set<std::array<std::uint32_t, 2>> keys;
    for (auto d : {RngDomain::NodeNoise, RngDomain::Weights, RngDomain::Symbols, RngDomain::ChannelNoise,
                   RngDomain::InitialState, RngDomain::Restart, RngDomain::Test}) {
        keys.insert(pbitrc::derive_key(42, d));
    }
    CHECK(keys.size() == 7);
    CHECK(pbitrc::derive_key(1, RngDomain::NodeNoise) != pbitrc::derive_key(2, RngDomain::NodeNoise));
}

TEST_CASE("stream sample is a pure function of the triple") {
    const RngStream a{7, 3, 11};
    const RngStream b{7, 3, 11};
    CHECK(a.uniform_pm1() == b.uniform_pm1());
    CHECK(a.uniform_pm1() != RngStream{7, 3, 12}.uniform_pm1());
    CHECK(a.uniform_pm1() != RngStream{7, 4, 11}.uniform_pm1());
    CHECK(a.uniform_pm1() != RngStream{8, 3, 11}.uniform_pm1());
    // high halves of node and step take part in the counter
    CHECK(RngStream{7, 1ULL << 32, 0}.uniform_pm1() != RngStream{7, 0, 0}.uniform_pm1());
    CHECK(RngStream{7, 0, 1ULL << 32}.uniform_pm1() != RngStream{7, 0, 0}.uniform_pm1());
}

TEST_CASE("evaluation order does not matter") {
    constexpr int n = 64;
    std::vector<double> forward(n), backward(n);
    for (int i = 0; i < n; ++i) {
        forward[i] = RngStream{5, static_cast<std::uint64_t>(i % 8), static_cast<std::uint64_t>(i / 8)}.uniform_pm1();
    }
    for (int i = n - 1; i >= 0; --i) {
        backward[i] = RngStream{5, static_cast<std::uint64_t>(i % 8), static_cast<std::uint64_t>(i / 8)}.uniform_pm1();
    }
    CHECK(forward == backward);
}

TEST_CASE("samples are uniform on [-1, 1) with fine resolution") {
    constexpr std::uint64_t n = 200000;
    double sum = 0.0;
    double sum2 = 0.0;
    double lo = 1.0;
    double hi = -1.0;
    std::set<double> distinct;
    for (std::uint64_t s = 0; s < n; ++s) {
        const double r = RngStream{99, s % 13, s}.uniform_pm1();
        REQUIRE(r >= -1.0);
        REQUIRE(r < 1.0);
        // a multiple of 2^-52: at least 32 bits of resolution
        const double scaled = std::ldexp(r, 52);
        REQUIRE(scaled == std::floor(scaled));
        sum += r;
        sum2 += r * r;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        distinct.insert(r);
    }
    const double mean = sum / n;
    CHECK(std::abs(mean) < 3.0 * std::sqrt(1.0 / 3.0 / n));
    CHECK(sum2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
    CHECK(lo < -0.999);
    CHECK(hi > 0.999);
    CHECK(distinct.size() == n);
}

TEST_CASE("counter engine is reproducible and substreams differ") {
    CounterEngine a(3, RngDomain::Weights, 0);
    CounterEngine b(3, RngDomain::Weights, 0);
    CounterEngine c(3, RngDomain::Weights, 1);
    CounterEngine d(3, RngDomain::Symbols, 0);
    bool all_equal_c = true;
    bool all_equal_d = true;
    for (int i = 0; i < 100; ++i) {
        const auto va = a();
        CHECK(va == b());
        all_equal_c = all_equal_c && va == c();
        all_equal_d = all_equal_d && va == d();
    }
    CHECK_FALSE(all_equal_c);
    CHECK_FALSE(all_equal_d);
    CHECK(a.position() == 100);
}

TEST_CASE("counter engine bounded draws") {
    CounterEngine e(11, RngDomain::Test);
    constexpr int n = 120000;
    std::array<int, 6> counts{};
    for (int i = 0; i < n; ++i) {
        const auto v = e.below(6);
        REQUIRE(v < 6);
        ++counts[v];
    }
    const double p = 1.0 / 6.0;
    const double sigma = std::sqrt(n * p * (1 - p));
    for (int c : counts) {
        CHECK(std::abs(c - n * p) < 4.0 * sigma);
    }
    CHECK(e.below(1) == 0);
    for (int i = 0; i < 1000; ++i) {
        const double u = e.uniform(-2.5, 4.0);
        REQUIRE(u >= -2.5);
        REQUIRE(u < 4.0);
    }
}

}
