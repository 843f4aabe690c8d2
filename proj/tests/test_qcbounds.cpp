#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "oracles.hpp"
#include "ringmod/qcbounds.hpp"

using namespace ringmod;
using std::numbers::pi;

TEST_CASE("distortion function is the identity at K = 1", "[qcbounds]") {
    for (int n : {2, 3, 5}) {
        for (double r : {0.01, 0.2, 0.5, 0.9, 0.999}) {
            CAPTURE(n, r);
            const ModulusBracket b = phi_distortion(1.0, Dimension(n), r);
            CHECK(b.is_exact());
            CHECK(b.hi == r);
        }
    }
}

TEST_CASE("planar distortion inverts the ring capacity exactly", "[qcbounds]") {
    SECTION("halving identity against the quadrature oracle") {
        // r' = 2 sqrt(r)/(1+r) is the closed form at K = 2; the oracle check
        // is mu(r') = mu(r)/2 with no library mu in the loop.
        for (double r : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            CAPTURE(r);
            const double landen = 2.0 * std::sqrt(r) / (1.0 + r);
            CHECK(oracles::mu_quadrature(landen) ==
                  Catch::Approx(0.5 * oracles::mu_quadrature(r)).epsilon(1e-9));
            CHECK(phi_distortion(2.0, Dimension(2), r).hi == Catch::Approx(landen).epsilon(1e-12));
        }
    }
    SECTION("semigroup law on a dilatation grid") {
        for (double K : {1.25, 1.5, 2.0, 3.0, 5.0}) {
            for (int i = 1; i <= 18; ++i) {
                const double r = i / 20.0;
                CAPTURE(K, r);
                const double rp = phi_distortion(K, Dimension(2), r).hi;
                CHECK(mu(rp) * K == Catch::Approx(mu(r)).margin(1e-9));
            }
        }
    }
    SECTION("stretch then compress is the identity") {
        for (double K : {1.5, 2.0, 3.0}) {
            for (int i = 1; i <= 18; ++i) {
                const double r = i / 20.0;
                CAPTURE(K, r);
                const double rp = phi_distortion(K, Dimension(2), r).hi;
                CHECK(inverse_mu(mu(rp) * K) == Catch::Approx(r).margin(1e-8));
            }
        }
    }
}

TEST_CASE("distortion endpoints grow with radius and dilatation", "[qcbounds]") {
    SECTION("planar values, strictly") {
        double prev = 0.0;
        for (int i = 1; i <= 19; ++i) {
            const double rp = phi_distortion(2.0, Dimension(2), i / 20.0).hi;
            CHECK(rp > prev);
            prev = rp;
        }
        prev = 0.0;
        for (double K : {1.0, 1.5, 2.0, 4.0, 8.0}) {
            const double rp = phi_distortion(K, Dimension(2), 0.5).hi;
            CHECK(rp >= prev);
            prev = rp;
        }
        CHECK(phi_distortion(1.5, Dimension(2), 0.5).hi > 0.5);
    }
    SECTION("spatial endpoints, within bisection noise") {
        double prev_lo = 0.0, prev_hi = 0.0;
        for (int i = 1; i <= 40; ++i) {
            const double r = 0.0005 * i;
            CAPTURE(r);
            const ModulusBracket b = phi_distortion(2.0, Dimension(3), r);
            CHECK(b.lo >= r);
            CHECK(b.hi <= 1.0);
            CHECK(b.lo <= b.hi);
            CHECK(b.lo >= prev_lo - 1e-12);
            CHECK(b.hi >= prev_hi - 1e-12);
            prev_lo = b.lo;
            prev_hi = b.hi;
        }
        prev_lo = prev_hi = 0.0;
        for (double K : {1.0, 1.2, 1.5, 2.0, 3.0}) {
            CAPTURE(K);
            const ModulusBracket b = phi_distortion(K, Dimension(3), 0.01);
            CHECK(b.lo >= prev_lo - 1e-12);
            CHECK(b.hi >= prev_hi - 1e-12);
            prev_lo = b.lo;
            prev_hi = b.hi;
        }
    }
    SECTION("spatial saturation is reported as an endpoint of one") {
        // Past the certifiable zone the bracket machinery cannot keep the
        // image radius away from 1; the upper endpoint says so.
        const ModulusBracket b = phi_distortion(2.0, Dimension(3), 0.5);
        CHECK(b.hi == 1.0);
        CHECK(b.lo >= 0.5);
    }
}

TEST_CASE("distortion function rejects bad input", "[qcbounds]") {
    CHECK_THROWS_AS(phi_distortion(0.5, Dimension(2), 0.5), domain_error);
    CHECK_THROWS_AS(phi_distortion(2.0, Dimension(2), 0.0), domain_error);
    CHECK_THROWS_AS(phi_distortion(2.0, Dimension(2), 1.0), domain_error);
    CHECK_THROWS_AS(phi_distortion(2.0, Dimension(2), -0.3), domain_error);
    CHECK_THROWS_AS(QCParams(0.99, Dimension(2)), domain_error);
    CHECK_THROWS_AS(holder_halfspace(1.0, Dimension(2), 0.0), domain_error);
    CHECK_THROWS_AS(holder_halfspace(1.0, Dimension(2), -2.0), domain_error);
}

TEST_CASE("ball certificate carries the documented exponent and constant", "[qcbounds]") {
    const HolderCertificate c12 = holder_ball(1.0, Dimension(2));
    CHECK(c12.domain == HolderDomain::ball);
    CHECK(c12.bounded);
    CHECK(c12.exponent == Catch::Approx(0.5).epsilon(1e-15));
    CHECK(c12.constant.is_exact());
    // 2 Q_2 = 8 e^{pi/2}
    CHECK(c12.constant.hi == Catch::Approx(8.0 * std::exp(pi / 2.0)).epsilon(1e-13));
    // gap radius Q_2^{-2/alpha} with alpha = 1
    CHECK(c12.epsilon0 ==
          Catch::Approx(std::pow(4.0 * std::exp(pi / 2.0), -2.0)).epsilon(1e-13));

    CHECK(holder_ball(4.0, Dimension(2)).exponent == Catch::Approx(0.125).epsilon(1e-15));

    const HolderCertificate c23 = holder_ball(2.0, Dimension(3));
    CHECK(c23.exponent == Catch::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-13));
    CHECK(c23.bounded);
    CHECK(c23.constant.lo > 0.0);
    CHECK(c23.constant.lo < c23.constant.hi);
    CHECK(c23.epsilon0 > 0.0);
    CHECK(c23.epsilon0 < c12.epsilon0);
}

TEST_CASE("half-space certificate chain is recomputable by hand", "[qcbounds]") {
    const HolderCertificate c = holder_halfspace(1.0, Dimension(2), 1.0);
    CHECK(c.domain == HolderDomain::halfspace);
    CHECK(c.bounded);
    CHECK(c.exponent == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(c.R == 1.0);
    CHECK(c.R_prime == Catch::Approx(4.0 * std::exp(pi)).epsilon(1e-13));
    CHECK(c.r == Catch::Approx((c.R_prime - 1.0) / (c.R_prime + 1.0)).epsilon(1e-14));
    CHECK(c.r_prime.is_exact());
    CHECK(c.r_prime.hi == Catch::Approx(c.r).epsilon(1e-13));
    CHECK(c.rho == Catch::Approx(1.0 + 4.0 / (1.0 - c.r_prime.hi)).epsilon(1e-14));
    CHECK(c.M == Catch::Approx(4.0 * std::exp(pi)).epsilon(1e-14));
    CHECK(c.constant.is_exact());
    CHECK(c.constant.hi == Catch::Approx((c.rho + 1.0) * c.M).epsilon(1e-14));
    CHECK(c.delta == Catch::Approx(std::exp(-pi) / 2.0).epsilon(1e-13));

    SECTION("more distortion can only weaken the certificate") {
        const HolderCertificate worse = holder_halfspace(2.0, Dimension(2), 1.0);
        CHECK(worse.bounded);
        CHECK(worse.exponent < c.exponent);
        CHECK(worse.constant.hi > c.constant.hi);
    }
    SECTION("a wider boundary patch costs a bigger constant") {
        const HolderCertificate wider = holder_halfspace(1.0, Dimension(2), 10.0);
        CHECK(wider.constant.hi > c.constant.hi);
    }
}

TEST_CASE("spatial half-space certificates report blow-up honestly", "[qcbounds]") {
    // Any genuine distortion pushes the chain radius past the certifiable
    // zone of the spatial capacity brackets, so no finite constant exists.
    const HolderCertificate blown = holder_halfspace(2.0, Dimension(3), 1.0);
    CHECK_FALSE(blown.bounded);
    CHECK(blown.r_prime.hi == 1.0);
    CHECK(std::isinf(blown.rho));
    CHECK(std::isinf(blown.constant.hi));
    CHECK(blown.constant.lo > 0.0);
    CHECK(std::isfinite(blown.constant.lo));

    // Distortion free the chain survives, with a genuinely two-sided constant.
    const HolderCertificate fine = holder_halfspace(1.0, Dimension(3), 1.0);
    CHECK(fine.bounded);
    CHECK(std::isfinite(fine.constant.hi));
    CHECK(fine.constant.lo < fine.constant.hi);
    CHECK(fine.rho > 1.0);
}

TEST_CASE("verifier passes conformal and stretch maps against their certificates",
          "[qcbounds]") {
    const HolderCertificate ball1 = holder_ball(1.0, Dimension(2));
    SECTION("identity and rotation on the distortion-free ball certificate") {
        const HolderVerification id = verify_holder_empirical(TestMap(), ball1, 20000, 1);
        CHECK(id.pass);
        CHECK(id.samples == 20000);
        // identity ratio is |x - xi|^{1/2} / C, largest near diameter pairs
        CHECK(id.max_ratio > 0.01);
        CHECK(id.max_ratio < 0.05);
        CHECK(id.at_distance > 1.5);

        const double th = 0.7;
        const TestMap rot = TestMap::moebius(MoebiusMap::rotation(
            {std::cos(th), -std::sin(th), std::sin(th), std::cos(th)}, 2));
        const HolderVerification r = verify_holder_empirical(rot, ball1, 20000, 1);
        CHECK(r.pass);
        // a rotation is an isometry, so each sampled pair scores as it does
        // under the identity, up to rounding in the matrix multiply
        CHECK(r.max_ratio == Catch::Approx(id.max_ratio).epsilon(1e-12));
    }
    SECTION("radial stretch against the matching dilatation") {
        const HolderCertificate ball2 = holder_ball(2.0, Dimension(2));
        const HolderVerification v =
            verify_holder_empirical(TestMap::radial_stretch(2.0), ball2, 20000, 1);
        CHECK(v.pass);
        CHECK(v.max_ratio < 0.06);
    }
    SECTION("half-space certificates") {
        const HolderCertificate half1 = holder_halfspace(1.0, Dimension(2), 1.0);
        CHECK(verify_holder_empirical(TestMap(), half1, 20000, 1).pass);
        const HolderCertificate half2 = holder_halfspace(2.0, Dimension(2), 1.0);
        CHECK(verify_holder_empirical(TestMap::radial_stretch(2.0), half2, 20000, 1).pass);
    }
    SECTION("same seed, same verdict") {
        const HolderVerification a = verify_holder_empirical(TestMap(), ball1, 4000, 9);
        const HolderVerification b = verify_holder_empirical(TestMap(), ball1, 4000, 9);
        CHECK(a.max_ratio == b.max_ratio);
        CHECK(a.at_distance == b.at_distance);
    }
}

TEST_CASE("verifier rejects maps that move the base point", "[qcbounds]") {
    const HolderCertificate ball1 = holder_ball(1.0, Dimension(2));
    // hyperbolic translation of the ball: Moebius, but 0 is not fixed
    const TestMap slide = TestMap::moebius(ball_automorphism({1.0, 0.0}, 2.0));
    CHECK_THROWS_AS(verify_holder_empirical(slide, ball1, 100), domain_error);

    const HolderCertificate half1 = holder_halfspace(1.0, Dimension(2), 1.0);
    const TestMap shift = TestMap::moebius(MoebiusMap::affine(1.0, {0.5, 0.0}));
    CHECK_THROWS_AS(verify_holder_empirical(shift, half1, 100), domain_error);

    // an unbounded certificate carries nothing to test
    const HolderCertificate blown = holder_halfspace(2.0, Dimension(3), 1.0);
    CHECK_THROWS_AS(verify_holder_empirical(TestMap(), blown, 100), domain_error);

    CHECK_THROWS_AS(verify_holder_empirical(TestMap(), ball1, 0), domain_error);
}
