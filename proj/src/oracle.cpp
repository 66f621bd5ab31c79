#include "coopsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "coopsim/controller.hpp"
#include "coopsim/sim.hpp"

namespace coopsim {

namespace {

double idle_probability(double lambda_pu, double mu_eff) {
    return lambda_pu > 0.0 ? 1.0 - lambda_pu / mu_eff : 1.0;
}

std::vector<double> probability_grid(double step) {
    std::vector<double> grid;
    const auto n = static_cast<long long>(std::floor(1.0 / step + 1e-9));
    grid.reserve(static_cast<std::size_t>(n) + 2);
    for (long long i = 0; i <= n; ++i) {
        grid.push_back(std::min(1.0, static_cast<double>(i) * step));
    }
    if (grid.back() < 1.0 - 1e-12) {
        grid.push_back(1.0);
    }
    return grid;
}

// Best throughput at cooperation probability q with p chosen as large as the
// budget allows (two-point set, mu_su(0) = 0).
double best_throughput_at(const ModelParams& params, double q) {
    const double rho = params.p_avg / params.p_max();
    const double mu_eff = params.phi_nc() + q * (params.phi_c() - params.phi_nc());
    const double pi_0 = idle_probability(params.lambda_pu, mu_eff);
    const double p = pi_0 > 0.0 ? std::clamp((rho - (1.0 - pi_0) * q) / pi_0, 0.0, 1.0) : 0.0;
    if (rho - (1.0 - pi_0) * q < 0.0) {
        return -1.0;  // infeasible
    }
    return std::min(params.lambda_su, pi_0 * p * params.mu_su[1]);
}

}  // namespace

StationaryPolicy evaluate_stationary(const ModelParams& params, double q, double p, std::size_t idle_level,
                                     std::size_t busy_level) {
    const auto& set = params.power_set;
    StationaryPolicy s;
    s.coop_prob = q;
    s.idle_tx_prob = p;
    s.idle_level = idle_level;
    s.busy_level = busy_level;
    const double mu_eff = (1.0 - q) * params.phi[0] + q * params.phi[busy_level];
    s.pi_0 = idle_probability(params.lambda_pu, mu_eff);
    const double service = (1.0 - p) * params.mu_su[0] + p * params.mu_su[idle_level];
    s.upsilon = std::min(params.lambda_su, s.pi_0 * service);
    s.power_used = (1.0 - s.pi_0) * q * set[busy_level] + s.pi_0 * p * set[idle_level];
    return s;
}

StationaryPolicy evaluate_stationary(const ModelParams& params, double q, double p) {
    const std::size_t top = params.power_set.size() - 1;
    return evaluate_stationary(params, q, p, top, top);
}

StationaryPolicy optimal_two_point(const ModelParams& params) {
    params.validate();
    if (!params.power_set.is_two_point()) {
        throw ConfigError("optimal_two_point needs a {0, P_max} power set; use grid_search for multi-level sets");
    }
    if (params.mu_su[0] != 0.0) {
        throw ConfigError("optimal_two_point assumes mu_su(0) = 0");
    }
    const double lam = params.lambda_pu;
    const double phi_nc = params.phi_nc();
    const double delta = params.phi_c() - phi_nc;
    const double rho = params.p_avg / params.p_max();
    const double m = params.mu_su[1];

    if (params.p_avg == 0.0 || params.lambda_su == 0.0 || m == 0.0) {
        return evaluate_stationary(params, 0.0, 0.0);
    }

    double q = 0.0;
    if (lam > 0.0 && delta > 0.0) {
        // pi_0(q) + (1 - pi_0(q)) q = rho  <=>  (1 - q) lam = (1 - rho)(phi_nc + q delta)
        q = std::clamp((lam - (1.0 - rho) * phi_nc) / (lam + (1.0 - rho) * delta), 0.0, 1.0);
    }
    double pi_0 = idle_probability(lam, phi_nc + q * delta);
    double p = std::clamp((rho - (1.0 - pi_0) * q) / pi_0, 0.0, 1.0);

    if (pi_0 * p * m > params.lambda_su) {
        // Arrival-limited: least cooperation whose idle capacity still covers lambda_su.
        double q_min = 0.0;
        if (lam > 0.0 && delta > 0.0 && params.lambda_su < m) {
            q_min = std::clamp((lam / (1.0 - params.lambda_su / m) - phi_nc) / delta, 0.0, q);
        }
        q = q_min;
        pi_0 = idle_probability(lam, phi_nc + q * delta);
        p = std::min(1.0, params.lambda_su / (pi_0 * m));
    }
    auto best = evaluate_stationary(params, q, p);

    // Cross-check the balance point against a fine scan over q.
    for (int i = 0; i <= 10000; ++i) {
        const double qq = static_cast<double>(i) * 1e-4;
        if (best_throughput_at(params, qq) > best.upsilon + 1e-12) {
            throw std::logic_error("optimal_two_point: grid refinement found a better cooperation probability");
        }
    }
    return best;
}

StationaryPolicy grid_search(const ModelParams& params, double step, const GridOptions& options) {
    params.validate();
    if (!(step > 0.0) || step > 1.0) {
        throw ConfigError("grid_search: step must lie in (0, 1]");
    }
    const auto grid = probability_grid(step);
    const std::vector<double> q_values = options.force_no_coop ? std::vector<double>{0.0} : grid;
    const std::size_t n_levels = params.power_set.size();

    StationaryPolicy best = evaluate_stationary(params, 0.0, 0.0, n_levels - 1, n_levels - 1);
    for (std::size_t a = 1; a < n_levels; ++a) {
        for (std::size_t b = 1; b < n_levels; ++b) {
            for (double q : q_values) {
                for (double p : grid) {
                    const auto s = evaluate_stationary(params, q, p, a, b);
                    if (s.power_used > params.p_avg + 1e-12) {
                        continue;
                    }
                    if (s.upsilon > best.upsilon + 1e-15 ||
                        (std::abs(s.upsilon - best.upsilon) <= 1e-15 && s.power_used < best.power_used)) {
                        best = s;
                    }
                }
            }
        }
    }
    return best;
}

StationaryRunStats simulate_stationary(const StationaryPolicy& policy, const ModelParams& params, long long horizon,
                                       std::uint64_t seed, long long buffer) {
    params.validate();
    if (horizon < 50) {
        throw ConfigError("simulate_stationary: horizon must be at least 50 slots");
    }
    const auto& set = params.power_set;
    Rng rng(seed);

    constexpr int kBatches = 50;
    const long long batch_len = horizon / kBatches;
    std::vector<double> batch_admitted(kBatches, 0.0);
    std::vector<double> batch_power(kBatches, 0.0);

    long long q_pu = 0;
    long long q_su = 0;
    long long admitted = 0;
    long long served = 0;
    long long idle_slots = 0;
    double power = 0.0;
    const long long total = batch_len * kBatches;
    const double su_p = params.a_max > 0 ? params.lambda_su / static_cast<double>(params.a_max) : 0.0;

    for (long long t = 0; t < total; ++t) {
        const bool idle = q_pu == 0;
        const double prob = idle ? policy.idle_tx_prob : policy.coop_prob;
        const std::size_t level = rng.bernoulli(prob) ? (idle ? policy.idle_level : policy.busy_level) : 0;
        int su_served = 0;
        bool pu_success = false;
        if (idle) {
            ++idle_slots;
            if (q_su > 0 && rng.bernoulli(params.mu_su[level])) {
                su_served = 1;
            }
        } else {
            pu_success = rng.bernoulli(params.phi[level]);
        }
        const int pu_arrival = rng.bernoulli(params.lambda_pu) ? 1 : 0;
        int arrivals = 0;
        for (int i = 0; i < params.a_max; ++i) {
            arrivals += rng.bernoulli(su_p) ? 1 : 0;
        }
        const int r = admit(q_su, arrivals, static_cast<double>(buffer));

        q_pu = step_pu_queue(q_pu, pu_success, pu_arrival);
        q_su = step_su_queue(q_su, su_served, r);
        admitted += r;
        served += su_served;
        power += set[level];
        const auto b = static_cast<std::size_t>(t / batch_len);
        batch_admitted[b] += r;
        batch_power[b] += set[level];
    }

    auto mean_and_stderr = [&](const std::vector<double>& sums) {
        double mean = 0.0;
        for (double s : sums) mean += s / static_cast<double>(batch_len);
        mean /= kBatches;
        double var = 0.0;
        for (double s : sums) {
            const double d = s / static_cast<double>(batch_len) - mean;
            var += d * d;
        }
        var /= (kBatches - 1);
        return std::pair{mean, std::sqrt(var / kBatches)};
    };

    StationaryRunStats out;
    out.slots = total;
    out.admitted = static_cast<double>(admitted) / static_cast<double>(total);
    out.served = static_cast<double>(served) / static_cast<double>(total);
    out.power = power / static_cast<double>(total);
    out.pi_0 = static_cast<double>(idle_slots) / static_cast<double>(total);
    out.admitted_stderr = mean_and_stderr(batch_admitted).second;
    out.power_stderr = mean_and_stderr(batch_power).second;
    return out;
}

}  // namespace coopsim
