#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "coopsim/model.hpp"

namespace coopsim {

/// Per-frame control pair. Indices refer to `ModelParams::power_set`.
struct FramePowers {
    std::size_t p0_index = 0;
    std::size_t p1_index = 0;
    double p0_star = 0.0;
    double p1_star = 0.0;
    double theta_star = 0.0;
};

struct IdleDecision {
    std::size_t index = 0;
    double power = 0.0;
    double theta_star = 0.0;
};

/// Admission threshold: admit everything while the current backlog is at
/// most V, nothing otherwise.
int admit(long long q_su_now, int arrivals_now, double v);

/// Maximizes q * mu_su(P) - x * P over the power set. Ties resolve to the
/// lower power.
IdleDecision solve_p0(double q_su_frame, double x_su_frame, const ModelParams& params);

/// Minimizes (theta + x * P) / phi(P) over the power set; returns the level
/// index. Ties resolve to the lower power. Levels with phi(P) = 0 are never
/// chosen.
std::size_t solve_p1_index(double theta_star, double x_su_frame, const ModelParams& params);

double solve_p1(double theta_star, double x_su_frame, const ModelParams& params);

/// Closed-form rule for {0, P_max}: no cooperation iff
/// x >= theta (phi_c - phi_nc) / (P_max phi_nc).
double two_point_threshold_rule(double theta_star, double x_su_frame, const ModelParams& params);

/// Both steps at a frame start.
FramePowers solve_frame(double q_su_frame, double x_su_frame, const ModelParams& params);

/// Power used in a slot of the given phase.
inline double frame_power(Phase phase, const FramePowers& fp) {
    return phase == Phase::PuIdle ? fp.p0_star : fp.p1_star;
}

// ---- multiple secondary users ---------------------------------------------

struct UserQueues {
    double q = 0.0;
    double x = 0.0;
};

struct MultiUserDecision {
    std::size_t idle_user = 0;
    std::size_t p0_index = 0;
    double p0_star = 0.0;
    double theta_star = 0.0;
    std::size_t coop_user = 0;
    std::size_t p1_index = 0;
    double p1_star = 0.0;
};

/// One user transmits in every idle slot and one user cooperates in every
/// busy slot. Ties prefer lower power, then lower user index.
MultiUserDecision solve_multiuser_frame(const std::vector<UserQueues>& frame_queues,
                                        const std::vector<ModelParams>& params_per_user);

/// Per-user admission with a shared V.
std::vector<int> admit_multiuser(const std::vector<long long>& q_now, const std::vector<int>& arrivals,
                                 double v);

// ---- fading ----------------------------------------------------------------

struct FadingState {
    std::string id;
    double prob = 0.0;
    std::vector<double> phi;  ///< aligned with the power set
};

struct FadingModel {
    std::vector<FadingState> states;

    /// Checks probabilities sum to one and each phi is a non-decreasing
    /// probability table of the right length.
    void validate(const PowerSet& power_set) const;
};

struct FadingOptions {
    /// Largest |P|^|S| solved by full enumeration.
    std::size_t exhaustive_cap = 1u << 16;
    /// Above the cap, solve exactly via the separable parametric (Dinkelbach)
    /// iteration instead of failing.
    bool allow_fallback = true;
};

class SizeCapExceeded : public std::length_error {
public:
    using std::length_error::length_error;
};

struct FadingDecision {
    std::vector<std::size_t> indices;  ///< per fading state
    std::vector<double> powers;
    double objective = 0.0;  ///< (theta + x sum q_s P_s) / sum q_s phi_s(P_s)
    bool exhaustive = true;
};

/// Busy-slot cooperation power per fading state, minimizing
/// (theta + x sum_s q_s P_s) / (sum_s q_s phi_s(P_s)) over deterministic
/// per-state powers. Ties prefer lower mean power, then the
/// lexicographically smaller index vector.
FadingDecision solve_p1_fading(double theta_star, double x_su_frame, const FadingModel& fading,
                               const ModelParams& params, const FadingOptions& options = {});

}  // namespace coopsim
