// End-to-end checks at the reference operating point. One PASS/FAIL line per
// check; exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "coopsim/analysis.hpp"
#include "coopsim/controller.hpp"
#include "coopsim/io.hpp"
#include "coopsim/oracle.hpp"
#include "coopsim/sim.hpp"
#include "support/brute_force.hpp"
#include "support/chain_sampler.hpp"
#include "support/random_instances.hpp"

using namespace coopsim;
using Clock = std::chrono::steady_clock;

namespace {

struct Report {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const std::vector<double> kSweep{10, 50, 100, 500, 1000};

std::vector<std::pair<double, RunMetrics>> reference_sweep() {
    Scenario s;
    s.horizon_frames = 1000;
    s.seed = 1;
    return sweep_v(s, kSweep);
}

Report oracle_optimum() {
    Report r;
    const auto t0 = Clock::now();
    const auto closed = optimal_two_point(reference_params());
    const auto grid = grid_search(reference_params(), 1e-3);
    const double elapsed = seconds_since(t0);
    r.detail << "closed=" << closed.upsilon << " grid=" << grid.upsilon << " q=" << closed.coop_prob
             << " p=" << closed.idle_tx_prob << " time=" << elapsed << "s";
    r.require(std::abs(closed.upsilon - 0.25) <= 1e-12, "closed form equals 0.25");
    r.require(std::abs(grid.upsilon - 0.25) <= 1e-3, "grid within 1e-3");
    r.require(elapsed < 1.0, "runtime < 1 s");
    return r;
}

Report convergence(const std::vector<std::pair<double, RunMetrics>>& sweep, double elapsed) {
    Report r;
    const double target = optimal_two_point(reference_params()).upsilon;
    std::vector<double> gap;
    for (const auto& [v, m] : sweep) {
        gap.push_back(target - m.throughput_admitted());
        r.detail << "V=" << v << ":thr=" << m.throughput_admitted() << ",q=" << m.avg_q_su() << " ";
    }
    int inversions = 0;
    for (std::size_t i = 1; i < gap.size(); ++i) inversions += gap[i] > gap[i - 1] ? 1 : 0;
    const double ratio = sweep[4].second.avg_q_su() / sweep[2].second.avg_q_su();
    r.detail << "inversions=" << inversions << " qratio=" << ratio << " time=" << elapsed << "s";
    r.require(sweep[4].second.throughput_admitted() >= 0.235, "throughput at V=1000 >= 0.235");
    r.require(inversions <= 1, "gap decreasing in V up to one inversion");
    r.require(ratio >= 5.0, "avg Q at V=1000 >= 5x avg Q at V=100");
    r.require(elapsed < 60.0, "runtime < 1 min");
    return r;
}

Report baselines_table() {
    Report r;
    const auto run = [](PolicySpec spec) {
        Scenario s;
        s.policy = spec;
        s.horizon_frames = std::numeric_limits<long long>::max();
        s.max_slots = 200'000;
        s.record_frames = false;
        s.seed = 1;
        return run_episode(s);
    };
    const auto nc = run(PolicySpec::no_coop());
    const auto ac = run(PolicySpec::always_coop());
    const auto cb = run(PolicySpec::counter_based());
    r.detail << "no-coop=" << nc.throughput_served() << " always-coop=" << ac.throughput_served()
             << " counter=" << cb.throughput_served() << " slots=" << nc.total_slots;
    r.require(std::abs(nc.throughput_served() - 0.166) <= 0.010, "no-coop 0.166 +- 0.010");
    r.require(ac.throughput_served() <= 0.005, "always-coop <= 0.005");
    r.require(std::abs(cb.throughput_served() - 0.137) <= 0.015, "counter 0.137 +- 0.015");
    r.require(nc.total_slots >= 100'000, ">= 1e5 slots");
    return r;
}

Report queue_bound(const std::vector<std::pair<double, RunMetrics>>& sweep) {
    Report r;
    long long violations = 0;
    for (const auto& [v, m] : sweep) {
        const long long cap = static_cast<long long>(std::floor(v)) + reference_params().a_max;
        violations += m.bound_violations;
        r.detail << "V=" << v << ":max_q=" << m.max_q_su << " ";
        r.require(m.max_q_su <= cap, "max Q_su <= V + A_max at V=" + format_double(v));
    }
    r.detail << "violations=" << violations;
    r.require(violations == 0, "zero per-slot violations");
    return r;
}

Report power_constraint(const std::vector<std::pair<double, RunMetrics>>& sweep) {
    Report r;
    for (const auto& [v, m] : sweep) {
        r.detail << "V=" << v << ":power=" << m.avg_power() << " ";
        r.require(m.avg_power() <= 0.5 + 0.01, "frame-averaged power <= 0.51 at V=" + format_double(v));
    }
    return r;
}

Report busy_moments() {
    Report r;
    const auto t0 = Clock::now();
    const long long n = 2'000'000;
    const auto nc = chain::sample_moments(0.5, 0.6, n, 2024);
    const auto ac = chain::sample_moments(0.5, 0.8, n, 2025);
    const double d = compute_d(0.5, 0.6);
    const double elapsed = seconds_since(t0);
    r.detail << "n=" << n << " E[B]=" << nc.mean_busy << " E[B^2]=" << nc.mean_busy_sq << " E[T^2]=" << nc.mean_frame_sq
             << " E[T^2]coop=" << ac.mean_frame_sq << " D=" << d << " time=" << elapsed << "s";
    r.require(std::abs(nc.mean_busy - 10.0) <= 0.1, "E[B] = 10 +- 0.1");
    r.require(std::abs(nc.mean_busy_sq / 856.67 - 1.0) <= 0.02, "E[B^2] = 856.67 +- 2%");
    r.require(std::abs(nc.mean_frame_sq / 902.67 - 1.0) <= 0.02, "E[T^2] = 902.67 +- 2%");
    r.require(ac.mean_frame_sq <= d, "always-cooperate E[T^2] <= D");
    r.require(elapsed < 30.0, "runtime < 30 s");
    return r;
}

double mean_over(const std::vector<double>& series, long long first_frame, long long last_frame) {
    double sum = 0.0;
    for (long long f = first_frame; f <= last_frame; ++f) sum += series[static_cast<std::size_t>(f - 1)];
    return sum / static_cast<double>(last_frame - first_frame + 1);
}

Report adaptive() {
    Report r;
    Scenario s;
    s.base_params.lambda_pu = 0.4;
    s.base_params.lambda_su = 0.8;
    s.v = 500;
    s.horizon_frames = 1000;
    s.lambda_schedule = {{350, 0.2}, {700, 0.55}};
    const auto m = run_adaptive(s);
    const auto coop = moving_average(m.frames, 100, SeriesField::CoopPowerPerSlot);
    double peak = 0.0;
    for (long long f = 500; f <= 700; ++f) peak = std::max(peak, coop[static_cast<std::size_t>(f - 1)]);
    const double early = mean_over(coop, 100, 300);
    const double late = mean_over(coop, 800, 1000);
    r.detail << "max[500,700]=" << peak << " mean[100,300]=" << early << " mean[800,1000]=" << late;
    r.require(peak < 0.02, "coop power < 0.02 over frames 500-700");
    r.require(late > early, "late mean exceeds early mean");
    return r;
}

Report solver_equivalence() {
    Report r;
    instances::Gen g(8);
    const auto ref = reference_params();

    int a_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const double theta = instances::unif(g, 0.0, 200.0);
        const double x = instances::unif(g, 0.0, 100.0);
        if (two_point_threshold_rule(theta, x, ref) != brute::two_point_p1(theta, x, ref)) ++a_bad;
    }

    int b_bad = 0;
    for (int i = 0; i < 200; ++i) {
        std::vector<ModelParams> ps{instances::user(g), instances::user(g), instances::user(g)};
        std::vector<UserQueues> uq;
        for (int u = 0; u < 3; ++u) uq.push_back({instances::unif(g, 0, 50), instances::unif(g, 0, 50)});
        const auto m = solve_multiuser_frame(uq, ps);
        const auto b = brute::multiuser(uq, ps);
        if (m.idle_user != b.idle_user || m.p0_star != b.p0 || m.coop_user != b.coop_user || m.p1_star != b.p1) {
            ++b_bad;
        }
    }

    ModelParams grid = ref;
    grid.power_set = PowerSet::grid({0.0, 0.5, 1.0});
    grid.phi = {0.6, 0.7, 0.8};
    grid.mu_su = {0.0, 0.6, 1.0};
    int c_bad = 0;
    for (int i = 0; i < 100; ++i) {
        const auto fm = instances::two_state_fading(g, 3);
        const double theta = instances::unif(g, 0, 50), x = instances::unif(g, 0, 50);
        if (solve_p1_fading(theta, x, fm, grid).indices != brute::fading(theta, x, fm, grid).indices) ++c_bad;
    }

    int d_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto& p = i % 2 == 0 ? ref : grid;
        const double q = instances::unif(g, 0, 1000), x = instances::unif(g, 0, 1000);
        const double k = instances::unif(g, 1e-3, 1e3);
        const auto a = solve_frame(q, x, p);
        const auto b = solve_frame(k * q, k * x, p);
        if (a.p0_index != b.p0_index || a.p1_index != b.p1_index) ++d_bad;
    }
    r.detail << "threshold=" << a_bad << "/1000 multiuser=" << b_bad << "/200 fading=" << c_bad
             << "/100 scaling=" << d_bad << "/1000 mismatches";
    r.require(a_bad == 0, "threshold rule");
    r.require(b_bad == 0, "multi-user");
    r.require(c_bad == 0, "fading");
    r.require(d_bad == 0, "scaling");
    return r;
}

Report reproducibility() {
    Report r;
    const auto render = [](const Scenario& s) {
        const auto m = run_episode(s);
        std::ostringstream os;
        write_frames_csv(os, m);
        write_summary_csv(os, m);
        return os.str();
    };
    int mismatches = 0;
    std::size_t bytes = 0;
    for (auto spec : {PolicySpec::fbdpp(), PolicySpec::counter_based(), PolicySpec::stationary(1.0 / 3.0, 1.0)}) {
        for (std::uint64_t seed : {1ULL, 77ULL, 123456789ULL}) {
            Scenario s;
            s.policy = spec;
            s.seed = seed;
            const auto a = render(s);
            const auto b = render(s);
            bytes += a.size();
            if (a != b) ++mismatches;
        }
    }
    Scenario s;
    std::ostringstream x, y;
    write_sweep_csv(x, sweep_v(s, kSweep, 4));
    write_sweep_csv(y, sweep_v(s, kSweep, 1));
    if (x.str() != y.str()) ++mismatches;
    r.detail << "episodes=9 bytes=" << bytes << " mismatches=" << mismatches;
    r.require(mismatches == 0, "byte-identical reruns");
    return r;
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    const auto sweep = reference_sweep();
    const double sweep_time = seconds_since(t0);

    const std::vector<std::pair<std::string, std::function<Report()>>> checks{
        {"oracle optimum", oracle_optimum},
        {"fbdpp convergence", [&] { return convergence(sweep, sweep_time); }},
        {"baselines table", baselines_table},
        {"deterministic queue bound", [&] { return queue_bound(sweep); }},
        {"average power constraint", [&] { return power_constraint(sweep); }},
        {"busy period moments", busy_moments},
        {"adaptive lambda_pu", adaptive},
        {"solver equivalence", solver_equivalence},
        {"reproducibility", reproducibility},
    };

    int failures = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const auto rep = checks[i].second();
        failures += rep.ok ? 0 : 1;
        std::printf("%s [%zu] %s: %s\n", rep.ok ? "PASS" : "FAIL", i + 1, checks[i].first.c_str(),
                    rep.detail.str().c_str());
    }
    std::printf("%d of %zu checks failed\n", failures, checks.size());
    return failures;
}
