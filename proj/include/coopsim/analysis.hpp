#pragma once

#include <stdexcept>

#include "coopsim/model.hpp"

namespace coopsim {

/// Raised when a birth-death chain would be non-recurrent (arrival rate not
/// below the service rate).
class UnstableChainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct ChainSolution {
    double pi_0 = 1.0;
    double busy_fraction = 0.0;
    double effective_mu = 1.0;
};

struct FrameLengthBounds {
    double t_min = 0.0;
    double t_max = 0.0;
};

struct BusyPeriodMoments {
    double e_b = 0.0;
    double e_b2 = 0.0;
};

struct DriftConstants {
    double b_const = 0.0;
    double c_const = 0.0;
    double d_const = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
};

/// Idle probability of the PU queue when every busy slot succeeds with
/// probability `mu_eff`: pi_0 = 1 - lambda_pu / mu_eff.
ChainSolution steady_state(double lambda_pu, double mu_eff);

/// Expected frame length under full cooperation (t_min) and under no
/// cooperation (t_max).
FrameLengthBounds frame_length_bounds(const ModelParams& params);

/// First two moments of the PU busy period without cooperation.
BusyPeriodMoments busy_period_moments(double lambda_pu, double phi_nc);

/// Busy-period moments of the slotted chain obtained without dropping the
/// correlation between the first service time and the number of arrivals
/// during it. Equals the sample moments of the simulated chain; the closed
/// form above is larger when lambda_pu > phi_nc / 2 and smaller below.
BusyPeriodMoments exact_busy_period_moments(double lambda_pu, double phi_nc);

/// E[T^2] of a frame whose busy slots succeed with probability `phi`.
double exact_frame_second_moment(double lambda_pu, double phi);

/// Second moment of the frame length without cooperation. This is the
/// largest E[T^2] over all policies and serves as the constant D.
double compute_d(double lambda_pu, double phi_nc);

/// Constants B, C, D plus the frame-length bounds.
///
/// B = D [mu_max^2 + A_max^2 + (P_max - P_avg)^2] / 2 and
/// C = D (A_max + mu_max) A_max / 2, with A_max and mu_max read from params.
DriftConstants drift_constants(const ModelParams& params);

/// Worst-case throughput guarantee upsilon* - (B + C) / (V T_min). Negative
/// values mean the guarantee is vacuous at this V.
double throughput_lower_bound(double v, double upsilon_star, const DriftConstants& constants);

}  // namespace coopsim
