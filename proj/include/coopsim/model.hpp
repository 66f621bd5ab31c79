#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace coopsim {

/// Raised for any invalid model or scenario configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Set of admissible secondary-user power levels.
///
/// Levels are strictly increasing, start at 0, and end at P_max. A two-point
/// set {0, P_max} is the "idle / full power" special case for which several
/// solvers have closed forms.
class PowerSet {
public:
    static PowerSet two_point(double p_max);
    static PowerSet grid(std::vector<double> levels);

    std::span<const double> levels() const { return levels_; }
    std::size_t size() const { return levels_.size(); }
    double operator[](std::size_t i) const { return levels_[i]; }
    double p_max() const { return levels_.back(); }
    bool is_two_point() const { return two_point_; }

    /// Index of an exact member level; throws ConfigError if absent.
    std::size_t index_of(double power) const;

private:
    PowerSet(std::vector<double> levels, bool two_point);

    std::vector<double> levels_;
    bool two_point_ = false;
};

/// Static model inputs.
///
/// `phi` and `mu_su` are tabulated per power level, aligned with
/// `power_set.levels()`.
struct ModelParams {
    double lambda_pu = 0.5;
    double lambda_su = 0.5;
    int a_max = 1;
    PowerSet power_set = PowerSet::two_point(1.0);
    std::vector<double> phi{0.6, 0.8};
    std::vector<double> mu_su{0.0, 1.0};
    double p_avg = 0.5;

    double p_max() const { return power_set.p_max(); }
    double phi_nc() const { return phi.front(); }
    double phi_c() const { return phi.back(); }
    /// Largest SU service probability over the power set.
    double mu_max() const;

    /// Throws ConfigError naming the first violated invariant.
    ///
    /// lambda_pu = 0 is accepted (the PU never becomes busy); the closed-form
    /// analysis routines reject it separately.
    void validate() const;
};

/// Parameters of the reference experiment: lambda_pu = lambda_su = 0.5,
/// phi_nc = 0.6, phi_c = 0.8, P_avg = 0.5, P_max = 1, mu_su(P_max) = 1.
ModelParams reference_params();

/// Builds two-point params from scalar rates.
ModelParams two_point_params(double lambda_pu, double lambda_su, double phi_nc, double phi_c,
                             double p_avg, double p_max, double mu_su_max = 1.0, int a_max = 1);

enum class Phase { PuIdle, PuBusy };

const char* to_string(Phase phase);

struct SystemState {
    long long q_pu = 0;
    long long q_su = 0;
    double x_su = 0.0;
    long long slot = 0;
    long long frame = 0;
    long long frame_start_slot = 0;
    long long q_su_at_frame_start = 0;
    double x_su_at_frame_start = 0.0;
    Phase phase = Phase::PuIdle;
};

struct SlotOutcome {
    int admitted = 0;
    int su_served = 0;
    bool pu_success = false;
    double power_spent = 0.0;
    bool was_idle_phase = true;
};

/// Primary queue update; departures are applied before arrivals.
long long step_pu_queue(long long q_pu, bool pu_success, int arrival);

long long step_su_queue(long long q_su, int served, int admitted);

/// Frame-boundary update of the virtual power queue.
double update_virtual_queue(double x_su, long long frame_len, double frame_power_sum, double p_avg);

}  // namespace coopsim
