#include "coopsim/baselines.hpp"

namespace coopsim {

namespace {

// Spending p_max now keeps the cumulative average at or below p_avg.
bool spend_keeps_budget(const CounterState& counter, double p_avg, double p_max) {
    const double allowed = p_avg * static_cast<double>(counter.slots_elapsed + 1);
    return counter.total_power + p_max <= allowed * (1.0 + 1e-12);
}

}  // namespace

double no_coop_decide(Phase phase, const CounterState& counter, double p_avg, double p_max) {
    if (phase == Phase::PuBusy) {
        return 0.0;
    }
    return counter.running_average() < p_avg ? p_max : 0.0;
}

double always_coop_decide(Phase phase, const CounterState& counter, double p_avg, double p_max) {
    if (!spend_keeps_budget(counter, p_avg, p_max)) {
        return 0.0;
    }
    if (phase == Phase::PuBusy) {
        return p_max;
    }
    return counter.busy_fraction() * p_max < p_avg ? p_max : 0.0;
}

double counter_decide(Phase /*phase*/, const CounterState& counter, double p_avg, double p_max) {
    return counter.running_average() < p_avg ? p_max : 0.0;
}

}  // namespace coopsim
