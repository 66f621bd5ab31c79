#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coopsim/model.hpp"

namespace coopsim {

/// Deterministic 64-bit generator; all simulation randomness flows through it.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next() { return engine_(); }
    /// Uniform double in [0, 1) built from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform() < p; }

    static constexpr std::string_view name() { return "mt19937_64"; }

private:
    std::mt19937_64 engine_;
};

/// Seed of the i-th independent episode derived from a base seed. Index 0
/// maps to the base seed itself.
std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t index);

struct PolicySpec {
    enum class Kind { Fbdpp, NoCoop, AlwaysCoop, CounterBased, OracleStationary };

    Kind kind = Kind::Fbdpp;
    double coop_prob = 0.0;     ///< OracleStationary: cooperation probability in busy slots
    double idle_tx_prob = 0.0;  ///< OracleStationary: transmit probability in idle slots

    static PolicySpec fbdpp() { return {Kind::Fbdpp}; }
    static PolicySpec no_coop() { return {Kind::NoCoop}; }
    static PolicySpec always_coop() { return {Kind::AlwaysCoop}; }
    static PolicySpec counter_based() { return {Kind::CounterBased}; }
    static PolicySpec stationary(double q, double p) { return {Kind::OracleStationary, q, p}; }

    std::string name() const;
    /// Accepts fbdpp, no-coop, always-coop, counter, stationary.
    static PolicySpec parse(std::string_view text);
};

struct LambdaChange {
    long long after_frames = 0;  ///< takes effect once this many frames have completed
    double lambda_pu = 0.0;
};

struct Scenario {
    ModelParams base_params = reference_params();
    long long horizon_frames = 1000;
    std::uint64_t seed = 1;
    std::vector<LambdaChange> lambda_schedule;
    PolicySpec policy = PolicySpec::fbdpp();
    /// Admission threshold (and FBDPP control parameter); applied to every policy.
    double v = 500.0;
    /// Idle slots with an empty SU queue spend nothing when set.
    bool skip_when_empty = false;
    /// Hard stop in slots (0 = none). A frame open at the cap is closed and
    /// flagged as truncated. With lambda_pu = 0 every slot is its own frame.
    long long max_slots = 0;
    bool record_frames = true;
    std::size_t window = 100;

    void validate() const;
};

struct FrameRecord {
    long long frame = 0;  ///< 1-based
    long long frame_len = 0;
    long long busy_len = 0;
    long long admitted = 0;
    long long served = 0;
    double power_idle = 0.0;
    double power_coop = 0.0;
    long long q_su_end = 0;
    double x_su_end = 0.0;
    double lambda_pu = 0.0;
    bool truncated = false;
};

struct RunMetrics {
    std::string policy;
    double v = 0.0;
    std::uint64_t seed = 0;
    std::string generator{Rng::name()};

    std::vector<FrameRecord> frames;
    long long frame_count = 0;
    long long total_slots = 0;
    long long total_admitted = 0;
    long long total_served = 0;
    double total_power = 0.0;
    double total_power_coop = 0.0;
    double sum_q_su = 0.0;  ///< sum over slots of the end-of-slot SU backlog
    long long max_q_su = 0;
    long long bound_violations = 0;  ///< slots with Q_su > V + A_max

    // Streaming frame-length statistics, kept even when frames are not recorded.
    double frame_len_sum = 0.0;
    double frame_len_sq_sum = 0.0;
    double busy_len_sum = 0.0;
    double busy_len_sq_sum = 0.0;

    double throughput_admitted() const;
    double throughput_served() const;
    /// Sum of power over sum of frame lengths.
    double avg_power() const;
    double avg_coop_power() const;
    double avg_q_su() const;
    double mean_frame_len() const;
    double mean_frame_len_sq() const;
    double frame_len_stddev() const;
};

enum class SeriesField { AdmittedPerSlot, ServedPerSlot, PowerPerSlot, CoopPowerPerSlot };

/// Trailing moving average over up to `window` frames, computed as a ratio of
/// window sums to window slot counts. One entry per recorded frame.
std::vector<double> moving_average(const std::vector<FrameRecord>& frames, std::size_t window, SeriesField field);

/// Runs complete frames under the scenario's policy.
RunMetrics run_episode(const Scenario& scenario);

/// Same as run_episode; the schedule in the scenario drives lambda_pu changes.
RunMetrics run_adaptive(const Scenario& scenario);

/// One independent episode per V, seeds derived from (scenario.seed, index),
/// results in input order. `threads` = 0 reads COOPSIM_THREADS, else uses
/// the hardware concurrency.
std::vector<std::pair<double, RunMetrics>> sweep_v(const Scenario& scenario_template,
                                                   const std::vector<double>& v_values, std::size_t threads = 0);

/// Worker count honoring COOPSIM_THREADS.
std::size_t default_worker_count();

}  // namespace coopsim
