#include "coopsim/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "coopsim/baselines.hpp"
#include "coopsim/controller.hpp"

namespace coopsim {

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t index) {
    return base_seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(index);
}

std::string PolicySpec::name() const {
    switch (kind) {
        case Kind::Fbdpp:
            return "fbdpp";
        case Kind::NoCoop:
            return "no-coop";
        case Kind::AlwaysCoop:
            return "always-coop";
        case Kind::CounterBased:
            return "counter";
        case Kind::OracleStationary:
            return "stationary";
    }
    return "unknown";
}

PolicySpec PolicySpec::parse(std::string_view text) {
    if (text == "fbdpp") return fbdpp();
    if (text == "no-coop" || text == "nocoop") return no_coop();
    if (text == "always-coop" || text == "alwayscoop") return always_coop();
    if (text == "counter" || text == "counter-based") return counter_based();
    if (text == "stationary") return stationary(0.0, 0.0);
    throw ConfigError("unknown policy '" + std::string(text) +
                      "' (expected fbdpp, no-coop, always-coop, counter, stationary)");
}

void Scenario::validate() const {
    base_params.validate();
    if (horizon_frames < 1) {
        throw ConfigError("horizon_frames must be at least 1");
    }
    if (!(v > 0.0)) {
        throw ConfigError("V must be positive");
    }
    if (max_slots < 0) {
        throw ConfigError("max_slots must be non-negative");
    }
    if (window < 1) {
        throw ConfigError("window must be at least 1");
    }
    long long prev = -1;
    for (const auto& change : lambda_schedule) {
        if (change.after_frames <= prev || change.after_frames < 0) {
            throw ConfigError("lambda schedule frame indices must be strictly increasing and non-negative");
        }
        prev = change.after_frames;
        if (!(change.lambda_pu >= 0.0) || !(change.lambda_pu < base_params.phi_nc())) {
            throw ConfigError("unstable primary queue: scheduled lambda_pu must be below phi_nc");
        }
    }
    if (policy.kind == PolicySpec::Kind::OracleStationary) {
        if (!(policy.coop_prob >= 0.0 && policy.coop_prob <= 1.0) ||
            !(policy.idle_tx_prob >= 0.0 && policy.idle_tx_prob <= 1.0)) {
            throw ConfigError("stationary policy probabilities must lie in [0, 1]");
        }
    }
}

double RunMetrics::throughput_admitted() const {
    return total_slots > 0 ? static_cast<double>(total_admitted) / static_cast<double>(total_slots) : 0.0;
}
double RunMetrics::throughput_served() const {
    return total_slots > 0 ? static_cast<double>(total_served) / static_cast<double>(total_slots) : 0.0;
}
double RunMetrics::avg_power() const {
    return total_slots > 0 ? total_power / static_cast<double>(total_slots) : 0.0;
}
double RunMetrics::avg_coop_power() const {
    return total_slots > 0 ? total_power_coop / static_cast<double>(total_slots) : 0.0;
}
double RunMetrics::avg_q_su() const {
    return total_slots > 0 ? sum_q_su / static_cast<double>(total_slots) : 0.0;
}
double RunMetrics::mean_frame_len() const {
    return frame_count > 0 ? frame_len_sum / static_cast<double>(frame_count) : 0.0;
}
double RunMetrics::mean_frame_len_sq() const {
    return frame_count > 0 ? frame_len_sq_sum / static_cast<double>(frame_count) : 0.0;
}
double RunMetrics::frame_len_stddev() const {
    const double m = mean_frame_len();
    return std::sqrt(std::max(mean_frame_len_sq() - m * m, 0.0));
}

std::vector<double> moving_average(const std::vector<FrameRecord>& frames, std::size_t window, SeriesField field) {
    std::vector<double> out;
    out.reserve(frames.size());
    auto value = [field](const FrameRecord& f) {
        switch (field) {
            case SeriesField::AdmittedPerSlot:
                return static_cast<double>(f.admitted);
            case SeriesField::ServedPerSlot:
                return static_cast<double>(f.served);
            case SeriesField::PowerPerSlot:
                return f.power_idle + f.power_coop;
            case SeriesField::CoopPowerPerSlot:
                return f.power_coop;
        }
        return 0.0;
    };
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < frames.size(); ++k) {
        num += value(frames[k]);
        den += static_cast<double>(frames[k].frame_len);
        if (k >= window) {
            num -= value(frames[k - window]);
            den -= static_cast<double>(frames[k - window].frame_len);
        }
        out.push_back(den > 0.0 ? num / den : 0.0);
    }
    return out;
}

namespace {

/// Per-episode controller for one policy. Returns a power-set index per slot.
class Policy {
public:
    virtual ~Policy() = default;
    virtual void on_frame_start(const SystemState& /*state*/) {}
    virtual std::size_t decide(Phase phase, const SystemState& state, Rng& rng) = 0;
    virtual void on_slot_end(Phase /*phase*/, double /*power_spent*/) {}
};

class FbdppPolicy final : public Policy {
public:
    explicit FbdppPolicy(const ModelParams& params) : params_(params) {}

    void on_frame_start(const SystemState& state) override {
        powers_ = solve_frame(static_cast<double>(state.q_su_at_frame_start), state.x_su_at_frame_start, params_);
    }
    std::size_t decide(Phase phase, const SystemState&, Rng&) override {
        return phase == Phase::PuIdle ? powers_.p0_index : powers_.p1_index;
    }

private:
    const ModelParams& params_;
    FramePowers powers_;
};

/// Baselines act at P_max or not at all.
class CounterGatedPolicy final : public Policy {
public:
    using Rule = double (*)(Phase, const CounterState&, double, double);

    CounterGatedPolicy(const ModelParams& params, Rule rule) : params_(params), rule_(rule) {}

    std::size_t decide(Phase phase, const SystemState&, Rng&) override {
        const double p = rule_(phase, counter_, params_.p_avg, params_.p_max());
        return p > 0.0 ? params_.power_set.size() - 1 : 0;
    }
    void on_slot_end(Phase phase, double power_spent) override { counter_.record(phase, power_spent); }

private:
    const ModelParams& params_;
    Rule rule_;
    CounterState counter_;
};

class StationaryPolicy final : public Policy {
public:
    StationaryPolicy(const ModelParams& params, double q, double p) : params_(params), q_(q), p_(p) {}

    std::size_t decide(Phase phase, const SystemState&, Rng& rng) override {
        const double prob = phase == Phase::PuIdle ? p_ : q_;
        return rng.bernoulli(prob) ? params_.power_set.size() - 1 : 0;
    }

private:
    const ModelParams& params_;
    double q_;
    double p_;
};

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const ModelParams& params) {
    switch (spec.kind) {
        case PolicySpec::Kind::Fbdpp:
            return std::make_unique<FbdppPolicy>(params);
        case PolicySpec::Kind::NoCoop:
            return std::make_unique<CounterGatedPolicy>(params, &no_coop_decide);
        case PolicySpec::Kind::AlwaysCoop:
            return std::make_unique<CounterGatedPolicy>(params, &always_coop_decide);
        case PolicySpec::Kind::CounterBased:
            return std::make_unique<CounterGatedPolicy>(params, &counter_decide);
        case PolicySpec::Kind::OracleStationary:
            return std::make_unique<StationaryPolicy>(params, spec.coop_prob, spec.idle_tx_prob);
    }
    throw ConfigError("unknown policy kind");
}

int sample_su_arrivals(Rng& rng, const ModelParams& params) {
    if (params.a_max <= 0) {
        return 0;
    }
    if (params.a_max == 1) {
        return rng.bernoulli(params.lambda_su) ? 1 : 0;
    }
    // Binomial(a_max, lambda_su / a_max): mean lambda_su, capped at a_max.
    const double p = params.lambda_su / static_cast<double>(params.a_max);
    int n = 0;
    for (int i = 0; i < params.a_max; ++i) {
        n += rng.bernoulli(p) ? 1 : 0;
    }
    return n;
}

}  // namespace

RunMetrics run_episode(const Scenario& scenario) {
    scenario.validate();

    ModelParams params = scenario.base_params;
    Rng rng(scenario.seed);
    auto policy = make_policy(scenario.policy, params);

    RunMetrics m;
    m.policy = scenario.policy.name();
    m.v = scenario.v;
    m.seed = scenario.seed;
    if (scenario.record_frames) {
        m.frames.reserve(static_cast<std::size_t>(std::min<long long>(scenario.horizon_frames, 1 << 20)));
    }

    const long long q_bound_limit = static_cast<long long>(std::floor(scenario.v)) + params.a_max;
    std::size_t next_change = 0;

    SystemState st;
    st.frame = 1;
    FrameRecord cur;
    cur.frame = 1;
    cur.lambda_pu = params.lambda_pu;
    bool seen_busy = false;
    policy->on_frame_start(st);

    auto close_frame = [&](bool truncated) {
        cur.frame_len = st.slot - st.frame_start_slot;
        cur.q_su_end = st.q_su;
        st.x_su = update_virtual_queue(st.x_su, cur.frame_len, cur.power_idle + cur.power_coop, params.p_avg);
        cur.x_su_end = st.x_su;
        cur.truncated = truncated;

        const auto len = static_cast<double>(cur.frame_len);
        const auto busy = static_cast<double>(cur.busy_len);
        ++m.frame_count;
        m.frame_len_sum += len;
        m.frame_len_sq_sum += len * len;
        m.busy_len_sum += busy;
        m.busy_len_sq_sum += busy * busy;
        if (scenario.record_frames) {
            m.frames.push_back(cur);
        }
    };

    while (true) {
        // With lambda_pu = 0 the primary never turns busy; every slot is then a
        // frame of its own so the controller keeps re-deciding.
        const bool degenerate = params.lambda_pu == 0.0 && st.slot > st.frame_start_slot;
        if (st.q_pu == 0 && (seen_busy || degenerate)) {
            close_frame(false);
            if (m.frame_count >= scenario.horizon_frames) {
                break;
            }
            while (next_change < scenario.lambda_schedule.size() &&
                   scenario.lambda_schedule[next_change].after_frames <= m.frame_count) {
                params.lambda_pu = scenario.lambda_schedule[next_change].lambda_pu;
                ++next_change;
            }
            ++st.frame;
            st.frame_start_slot = st.slot;
            st.q_su_at_frame_start = st.q_su;
            st.x_su_at_frame_start = st.x_su;
            cur = FrameRecord{};
            cur.frame = st.frame;
            cur.lambda_pu = params.lambda_pu;
            seen_busy = false;
            policy->on_frame_start(st);
        }
        if (scenario.max_slots > 0 && st.slot >= scenario.max_slots) {
            if (st.slot > st.frame_start_slot) {
                close_frame(true);
            }
            break;
        }

        st.phase = st.q_pu == 0 ? Phase::PuIdle : Phase::PuBusy;
        const bool idle = st.phase == Phase::PuIdle;
        std::size_t level = policy->decide(st.phase, st, rng);
        if (idle && scenario.skip_when_empty && st.q_su == 0) {
            level = 0;
        }
        const double power = params.power_set[level];

        SlotOutcome out;
        out.was_idle_phase = idle;
        out.power_spent = power;
        if (idle) {
            if (st.q_su > 0 && rng.bernoulli(params.mu_su[level])) {
                out.su_served = 1;
            }
        } else {
            out.pu_success = rng.bernoulli(params.phi[level]);
        }
        const int pu_arrival = rng.bernoulli(params.lambda_pu) ? 1 : 0;
        const int su_arrivals = sample_su_arrivals(rng, params);
        out.admitted = admit(st.q_su, su_arrivals, scenario.v);

        st.q_pu = step_pu_queue(st.q_pu, out.pu_success, pu_arrival);
        st.q_su = step_su_queue(st.q_su, out.su_served, out.admitted);
        ++st.slot;

        cur.admitted += out.admitted;
        cur.served += out.su_served;
        if (idle) {
            cur.power_idle += power;
        } else {
            cur.power_coop += power;
            ++cur.busy_len;
            seen_busy = true;
            m.total_power_coop += power;
        }
        m.total_admitted += out.admitted;
        m.total_served += out.su_served;
        m.total_power += power;
        m.sum_q_su += static_cast<double>(st.q_su);
        m.max_q_su = std::max(m.max_q_su, st.q_su);
        if (st.q_su > q_bound_limit) {
            ++m.bound_violations;
        }
        policy->on_slot_end(st.phase, power);
    }
    m.total_slots = st.slot;
    return m;
}

RunMetrics run_adaptive(const Scenario& scenario) { return run_episode(scenario); }

std::size_t default_worker_count() {
    if (const char* env = std::getenv("COOPSIM_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && n > 0) {
            return static_cast<std::size_t>(n);
        }
    }
    const auto hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

std::vector<std::pair<double, RunMetrics>> sweep_v(const Scenario& scenario_template,
                                                   const std::vector<double>& v_values, std::size_t threads) {
    if (v_values.empty()) {
        throw ConfigError("sweep_v: empty V list");
    }
    for (double v : v_values) {
        Scenario s = scenario_template;
        s.v = v;
        s.validate();
    }

    std::vector<std::pair<double, RunMetrics>> results(v_values.size());
    const std::size_t workers = std::min(threads > 0 ? threads : default_worker_count(), v_values.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        for (std::size_t i = next++; i < v_values.size(); i = next++) {
            try {
                Scenario s = scenario_template;
                s.v = v_values[i];
                s.seed = derive_seed(scenario_template.seed, i);
                results[i] = {v_values[i], run_episode(s)};
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return results;
}

}  // namespace coopsim
