#pragma once

#include <cstddef>
#include <cstdint>

#include "coopsim/model.hpp"

namespace coopsim {

/// State-only randomized policy: in busy slots cooperate at `busy_level`
/// with probability q, in idle slots transmit at `idle_level` with
/// probability p. Zero power otherwise.
struct StationaryPolicy {
    double coop_prob = 0.0;     ///< q
    double idle_tx_prob = 0.0;  ///< p
    std::size_t idle_level = 0;
    std::size_t busy_level = 0;
    double upsilon = 0.0;     ///< long-run admitted throughput, capped at lambda_su
    double pi_0 = 1.0;        ///< PU idle probability
    double power_used = 0.0;  ///< long-run average power
};

/// Analytic long-run performance of a stationary policy.
StationaryPolicy evaluate_stationary(const ModelParams& params, double q, double p, std::size_t idle_level,
                                     std::size_t busy_level);

/// Same, at full power for both phases.
StationaryPolicy evaluate_stationary(const ModelParams& params, double q, double p);

/// Optimal stationary policy for a {0, P_max} power set.
///
/// Throughput pi_0(q) p mu_su(P_max) is increasing in q while p = 1 and
/// decreasing once the power budget binds, so the optimum sits where
/// pi_0 + (1 - pi_0) q = P_avg / P_max, clamped to q in [0, 1]. The result
/// is cross-checked against a 1e-4 grid over q. When lambda_su caps the
/// throughput, the least-power (q, p) that attains the cap is returned.
StationaryPolicy optimal_two_point(const ModelParams& params);

struct GridOptions {
    /// Restrict the scan to q = 0 (no cooperation).
    bool force_no_coop = false;
};

/// Exhaustive scan of (q, p) on a `step` grid (plus the endpoint 1). For
/// multi-level power sets every pair of non-zero idle/busy levels is tried
/// with two-point support {0, level} per phase, which is an approximation of
/// the full per-state mixing problem.
StationaryPolicy grid_search(const ModelParams& params, double step, const GridOptions& options = {});

struct StationaryRunStats {
    double admitted = 0.0;  ///< packets/slot
    double admitted_stderr = 0.0;
    double served = 0.0;
    double power = 0.0;
    double power_stderr = 0.0;
    double pi_0 = 0.0;  ///< empirical PU idle fraction
    long long slots = 0;
};

/// Monte-Carlo run of the slotted chain under a fixed stationary policy.
///
/// The SU queue admits arrivals while its backlog is at most `buffer`, so
/// the admitted rate settles at min(lambda_su, service capacity) through the
/// queue dynamics themselves. Standard errors come from 50 batch means.
StationaryRunStats simulate_stationary(const StationaryPolicy& policy, const ModelParams& params, long long horizon,
                                       std::uint64_t seed, long long buffer = 100);

}  // namespace coopsim
