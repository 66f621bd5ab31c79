#include <doctest.h>

#include <cmath>
#include <utility>

#include "coopsim/analysis.hpp"
#include "support/chain_sampler.hpp"

using namespace coopsim;

TEST_CASE("steady state idle probability") {
    CHECK(steady_state(0.5, 0.6).pi_0 == doctest::Approx(1.0 / 6.0));
    CHECK(steady_state(0.5, 0.8).pi_0 == doctest::Approx(0.375));
    CHECK(steady_state(0.5, 2.0 / 3.0).pi_0 == doctest::Approx(0.25));
    CHECK_THROWS_AS(steady_state(0.6, 0.6), UnstableChainError);
    CHECK_THROWS_AS(steady_state(0.7, 0.6), UnstableChainError);
}

TEST_CASE("steady state agrees with a sampled chain") {
    for (double mu : {0.6, 0.8, 2.0 / 3.0}) {
        chain::Sampler s(0.5, mu, 17);
        const double empirical = s.idle_fraction(2'000'000);
        CHECK(empirical == doctest::Approx(steady_state(0.5, mu).pi_0).epsilon(0.02));
    }
}

TEST_CASE("frame length bounds") {
    const auto b = frame_length_bounds(reference_params());
    CHECK(b.t_min == doctest::Approx(16.0 / 3.0));
    CHECK(b.t_max == doctest::Approx(12.0));

    const auto flat = frame_length_bounds(two_point_params(0.5, 0.5, 0.6, 0.6, 0.5, 1.0));
    CHECK(flat.t_min == doctest::Approx(flat.t_max));

    SUBCASE("sampled frame means") {
        const auto nc = chain::sample_moments(0.5, 0.6, 400'000, 5);
        const auto c = chain::sample_moments(0.5, 0.8, 400'000, 6);
        CHECK(nc.mean_frame == doctest::Approx(12.0).epsilon(0.02));
        CHECK(c.mean_frame == doctest::Approx(16.0 / 3.0).epsilon(0.02));
    }
}

TEST_CASE("busy period moments") {
    const auto m = busy_period_moments(0.5, 0.6);
    CHECK(m.e_b == doctest::Approx(10.0));
    CHECK(m.e_b2 == doctest::Approx(2570.0 / 3.0));

    const double phi = 0.6;
    const auto tiny = busy_period_moments(1e-9, phi);
    CHECK(tiny.e_b == doctest::Approx(1.0 / phi).epsilon(1e-6));
    CHECK(tiny.e_b2 == doctest::Approx((2.0 - phi) / (phi * phi)).epsilon(1e-6));

    CHECK_THROWS_AS(busy_period_moments(0.6, 0.6), UnstableChainError);
}

TEST_CASE("exact busy period moments match the sampled chain") {
    CHECK(exact_busy_period_moments(0.5, 0.6).e_b2 == doctest::Approx(590.0));
    // random-walk identity: Var(B) = sigma^2 / drift^3 for unit up/down steps
    for (auto [lam, phi] : {std::pair{0.5, 0.6}, std::pair{0.2, 0.6}, std::pair{0.3, 0.9}}) {
        const double up = lam * (1 - phi), down = phi * (1 - lam), drift = down - up;
        const double var = up + down - drift * drift;
        const auto m = exact_busy_period_moments(lam, phi);
        CHECK(m.e_b2 - m.e_b * m.e_b == doctest::Approx(var / (drift * drift * drift)));

        const auto sampled = chain::sample_moments(lam, phi, 1'000'000, 31);
        CHECK(sampled.mean_busy_sq == doctest::Approx(m.e_b2).epsilon(0.03));
        CHECK(sampled.mean_frame_sq == doctest::Approx(exact_frame_second_moment(lam, phi)).epsilon(0.03));
    }
    // the closed form overshoots above lambda = phi / 2 and undershoots below
    CHECK(busy_period_moments(0.5, 0.6).e_b2 > exact_busy_period_moments(0.5, 0.6).e_b2);
    CHECK(busy_period_moments(0.2, 0.6).e_b2 < exact_busy_period_moments(0.2, 0.6).e_b2);
    CHECK(busy_period_moments(0.3, 0.6).e_b2 == doctest::Approx(exact_busy_period_moments(0.3, 0.6).e_b2));
}

TEST_CASE("second frame moment") {
    CHECK(compute_d(0.5, 0.6) == doctest::Approx(902.0 + 2.0 / 3.0));
    CHECK(std::isfinite(compute_d(0.5999, 0.6)));
    CHECK(compute_d(0.5999, 0.6) > 1e6);

    // cooperation only shortens frames
    CHECK(exact_frame_second_moment(0.5, 0.8) < exact_frame_second_moment(0.5, 0.6));
    CHECK(exact_frame_second_moment(0.5, 0.6) < compute_d(0.5, 0.6));
}

TEST_CASE("drift constants") {
    const auto c = drift_constants(reference_params());
    CHECK(c.d_const == doctest::Approx(902.6666666667));
    CHECK(c.b_const == doctest::Approx(1015.5));
    CHECK(c.c_const == doctest::Approx(902.6666666667));
    CHECK(c.t_min == doctest::Approx(16.0 / 3.0));
    CHECK(c.t_max == doctest::Approx(12.0));

    auto p = two_point_params(0.5, 0.0, 0.6, 0.8, 1.0, 1.0, 0.0, 0);
    const auto z = drift_constants(p);
    CHECK(z.b_const == 0.0);

    for (auto params : {reference_params(), two_point_params(0.3, 1.5, 0.5, 0.9, 0.4, 2.0, 0.7, 2)}) {
        const auto k = drift_constants(params);
        const double a = params.a_max, mu = params.mu_max(), gap = params.p_max() - params.p_avg;
        CHECK(k.c_const / k.b_const == doctest::Approx((a + mu) * a / (mu * mu + a * a + gap * gap)));
    }
}

TEST_CASE("throughput lower bound") {
    const auto c = drift_constants(reference_params());
    CHECK(throughput_lower_bound(500.0, 0.25, c) == doctest::Approx(-0.4693125).epsilon(1e-6));
    CHECK(throughput_lower_bound(1e12, 0.25, c) == doctest::Approx(0.25));
    const double v_half = 2.0 * (c.b_const + c.c_const) / (0.25 * c.t_min);
    CHECK(throughput_lower_bound(v_half, 0.25, c) == doctest::Approx(0.125));
    CHECK_THROWS(throughput_lower_bound(0.0, 0.25, c));
}
