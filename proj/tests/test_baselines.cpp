#include <doctest.h>

#include "coopsim/baselines.hpp"
#include "coopsim/sim.hpp"

using namespace coopsim;

namespace {

RunMetrics long_run(PolicySpec spec, ModelParams params = reference_params()) {
    Scenario s;
    s.base_params = params;
    s.policy = spec;
    s.horizon_frames = 1'000'000'000;
    s.max_slots = 200'000;
    s.record_frames = false;
    s.seed = 3;
    return run_episode(s);
}

}  // namespace

TEST_CASE("counter ledger") {
    CounterState c;
    CHECK(c.running_average() == 0.0);
    CHECK(c.busy_fraction() == 0.0);
    c.record(Phase::PuBusy, 1.0);
    c.record(Phase::PuIdle, 0.0);
    CHECK(c.running_average() == doctest::Approx(0.5));
    CHECK(c.busy_fraction() == doctest::Approx(0.5));
}

TEST_CASE("no cooperation") {
    CounterState c;
    CHECK(no_coop_decide(Phase::PuBusy, c, 0.5, 1.0) == 0.0);
    CHECK(no_coop_decide(Phase::PuIdle, c, 0.5, 1.0) == 1.0);
    c.record(Phase::PuIdle, 1.0);
    CHECK(no_coop_decide(Phase::PuIdle, c, 0.5, 1.0) == 0.0);

    const auto m = long_run(PolicySpec::no_coop());
    CHECK(m.throughput_served() == doctest::Approx(1.0 / 6.0).epsilon(0.06));
    CHECK(m.avg_power() <= 0.5 + 1e-9);
}

TEST_CASE("always cooperate") {
    CounterState c;
    CHECK(always_coop_decide(Phase::PuBusy, c, 0.5, 1.0) == 0.0);
    c.record(Phase::PuIdle, 0.0);
    CHECK(always_coop_decide(Phase::PuBusy, c, 0.5, 1.0) == 1.0);

    // budget covers every slot at full power
    CounterState slack;
    for (int i = 0; i < 50; ++i) {
        const Phase ph = i % 3 == 0 ? Phase::PuIdle : Phase::PuBusy;
        const double p = always_coop_decide(ph, slack, 1.0, 1.0);
        CHECK(p == 1.0);
        slack.record(ph, p);
    }

    const auto m = long_run(PolicySpec::always_coop());
    CHECK(m.throughput_served() <= 0.005);
    CHECK(m.avg_power() <= 0.5 + 1e-9);
}

TEST_CASE("counter based") {
    CounterState c;
    CHECK(counter_decide(Phase::PuBusy, c, 0.5, 1.0) == 1.0);
    CHECK(counter_decide(Phase::PuIdle, c, 0.5, 1.0) == 1.0);
    CHECK(counter_decide(Phase::PuIdle, c, 0.0, 1.0) == 0.0);
    c.record(Phase::PuBusy, 1.0);
    CHECK(counter_decide(Phase::PuIdle, c, 0.5, 1.0) == 0.0);

    const auto m = long_run(PolicySpec::counter_based());
    CHECK(m.throughput_served() == doctest::Approx(0.137).epsilon(0.1));
    CHECK(m.avg_power() <= 0.5 + 1e-3);

    auto zero = reference_params();
    zero.p_avg = 0.0;
    const auto z = long_run(PolicySpec::counter_based(), zero);
    CHECK(z.total_power == 0.0);
}
