#pragma once

#include "coopsim/model.hpp"

namespace coopsim {

/// Running power ledger shared by the baseline policies.
struct CounterState {
    double total_power = 0.0;
    long long slots_elapsed = 0;
    long long busy_slots = 0;

    double running_average() const {
        return total_power / static_cast<double>(slots_elapsed > 0 ? slots_elapsed : 1);
    }
    /// Fraction of elapsed slots in which the PU was busy (0 before the first slot).
    double busy_fraction() const {
        return slots_elapsed > 0 ? static_cast<double>(busy_slots) / static_cast<double>(slots_elapsed) : 0.0;
    }
    void record(Phase phase, double power_spent) {
        total_power += power_spent;
        ++slots_elapsed;
        if (phase == Phase::PuBusy) {
            ++busy_slots;
        }
    }
};

/// Never cooperates. Idle slots use P_max while the running average power
/// is below P_avg.
double no_coop_decide(Phase phase, const CounterState& counter, double p_avg, double p_max);

/// Cooperates at P_max whenever doing so keeps the running average within
/// P_avg. Idle transmission is only funded from whatever the observed
/// cooperation demand (busy fraction times P_max) leaves of the budget.
double always_coop_decide(Phase phase, const CounterState& counter, double p_avg, double p_max);

/// Acts at P_max in any phase iff the running average is below P_avg.
double counter_decide(Phase phase, const CounterState& counter, double p_avg, double p_max);

}  // namespace coopsim
