#include <doctest.h>

#include "cpnet/driver.hpp"
#include "cpnet/error.hpp"
#include "cpnet/rng.hpp"

#include <cmath>
#include <vector>

using namespace cpnet;
using rng::Counter;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    CHECK(rng::philox4x32({0, 0, 0, 0}, {0, 0}) == Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(rng::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(rng::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are addressable and reproducible") {
    rng::Stream a(7, 3, 11), b(7, 3, 11), c(7, 4, 11), d(7, 3, 12), e(8, 3, 11);
    const double x = a.normal();
    CHECK(x == b.normal());
    CHECK(x != c.normal());
    CHECK(x != d.normal());
    CHECK(x != e.normal());
    rng::Stream f(7, 3, 11, rng::Domain::FirstPassage);
    CHECK(f.normal() != x);
}

TEST_CASE("uniforms lie strictly inside (0,1)") {
    rng::Stream s(0, 0, 0);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

namespace {

struct Moments {
    double mean, var, se_mean;
};

Moments sample(const DriverSpec& spec, double dt, int n) {
    IncrementSampler draw(spec, dt);
    double s1 = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        rng::Stream st(42, static_cast<std::uint64_t>(i / 1000), static_cast<std::uint32_t>(i % 1000));
        const double x = draw(st);
        s1 += x;
        s2 += x * x;
    }
    const double mean = s1 / n;
    const double var = (s2 - n * mean * mean) / (n - 1);
    return {mean, var, std::sqrt(var / n)};
}

}  // namespace

TEST_CASE("driver increments have mean 0 and variance dt") {
    const int n = 1000000;
    SUBCASE("brownian") {
        const auto m = sample(DriverSpec::brownian(), 1e-3, n);
        CHECK(std::abs(m.mean) < 4 * m.se_mean);
        CHECK(std::abs(m.var / 1e-3 - 1.0) < 0.01);
    }
    SUBCASE("compound poisson") {
        const auto m = sample(DriverSpec::compound_poisson(50.0), 0.1, n);
        CHECK(std::abs(m.mean) < 4 * m.se_mean);
        CHECK(std::abs(m.var / 0.1 - 1.0) < 0.01);
    }
    SUBCASE("brownian plus jumps") {
        const auto m = sample(DriverSpec::brownian_plus_jumps(2.0, 0.5), 0.05, n);
        CHECK(std::abs(m.mean) < 4 * m.se_mean);
        CHECK(std::abs(m.var / 0.05 - 1.0) < 0.01);
    }
}

TEST_CASE("compound poisson increments are exactly zero without a jump") {
    IncrementSampler draw(DriverSpec::compound_poisson(1.0), 1e-3);
    rng::Stream s(1, 0, 0);
    int zeros = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) zeros += draw(s) == 0.0;
    const double p = std::exp(-1e-3);
    CHECK(std::abs(zeros / double(n) - p) < 4 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("driver validation and names") {
    CHECK_THROWS_AS(DriverSpec::compound_poisson(0.0).validate(), Error);
    CHECK_THROWS_AS(DriverSpec::brownian_plus_jumps(10.0, 0.5).validate(), Error);  // jump variance 2.5 > 1
    CHECK_NOTHROW(DriverSpec::brownian_plus_jumps(4.0, 0.5).validate());
    CHECK(parse_driver_kind("brownian") == DriverKind::Brownian);
    CHECK(parse_driver_kind("compound-poisson-normalized") == DriverKind::CompoundPoisson);
    CHECK(parse_driver_kind(to_string(DriverKind::BrownianPlusJumps)) == DriverKind::BrownianPlusJumps);
    CHECK_THROWS_AS(parse_driver_kind("levy"), Error);
}
