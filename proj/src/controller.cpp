#include "coopsim/controller.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace coopsim {

namespace {

// a/b < c/d for positive denominators, without division.
bool ratio_less(double a, double b, double c, double d) { return a * d < c * b; }
bool ratio_equal(double a, double b, double c, double d) { return a * d == c * b; }

struct RatioChoice {
    std::size_t index = 0;
    double num = 0.0;
    double den = 0.0;
    bool found = false;
};

// argmin over levels of (theta + x P) / phi(P), lower power on ties.
RatioChoice min_ratio(double theta, double x, const PowerSet& set, const std::vector<double>& phi) {
    RatioChoice best;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double den = phi[i];
        if (!(den > 0.0)) {
            continue;
        }
        const double num = theta + x * set[i];
        if (!best.found || ratio_less(num, den, best.num, best.den)) {
            best = {i, num, den, true};
        }
    }
    return best;
}

}  // namespace

int admit(long long q_su_now, int arrivals_now, double v) {
    return static_cast<double>(q_su_now) <= v ? arrivals_now : 0;
}

IdleDecision solve_p0(double q_su_frame, double x_su_frame, const ModelParams& params) {
    const auto& set = params.power_set;
    IdleDecision best{0, set[0], q_su_frame * params.mu_su[0] - x_su_frame * set[0]};
    for (std::size_t i = 1; i < set.size(); ++i) {
        const double value = q_su_frame * params.mu_su[i] - x_su_frame * set[i];
        if (value > best.theta_star) {
            best = {i, set[i], value};
        }
    }
    return best;
}

std::size_t solve_p1_index(double theta_star, double x_su_frame, const ModelParams& params) {
    const auto choice = min_ratio(theta_star, x_su_frame, params.power_set, params.phi);
    if (!choice.found) {
        throw ConfigError("solve_p1: phi is zero at every power level");
    }
    return choice.index;
}

double solve_p1(double theta_star, double x_su_frame, const ModelParams& params) {
    return params.power_set[solve_p1_index(theta_star, x_su_frame, params)];
}

double two_point_threshold_rule(double theta_star, double x_su_frame, const ModelParams& params) {
    // x >= theta (phi_c - phi_nc) / (P_max phi_nc), multiplied out so the
    // boundary case does not depend on the rounding of phi_c - phi_nc.
    const double p_max = params.p_max();
    return (theta_star + x_su_frame * p_max) * params.phi_nc() >= theta_star * params.phi_c() ? 0.0 : p_max;
}

FramePowers solve_frame(double q_su_frame, double x_su_frame, const ModelParams& params) {
    const auto idle = solve_p0(q_su_frame, x_su_frame, params);
    FramePowers fp;
    fp.p0_index = idle.index;
    fp.p0_star = idle.power;
    fp.theta_star = idle.theta_star;
    fp.p1_index = solve_p1_index(idle.theta_star, x_su_frame, params);
    fp.p1_star = params.power_set[fp.p1_index];
    return fp;
}

MultiUserDecision solve_multiuser_frame(const std::vector<UserQueues>& frame_queues,
                                        const std::vector<ModelParams>& params_per_user) {
    if (frame_queues.empty() || frame_queues.size() != params_per_user.size()) {
        throw ConfigError("solve_multiuser_frame: need one queue pair and one parameter set per user");
    }
    MultiUserDecision d;
    bool have_idle = false;
    for (std::size_t u = 0; u < frame_queues.size(); ++u) {
        const auto& set = params_per_user[u].power_set;
        for (std::size_t i = 0; i < set.size(); ++i) {
            const double value =
                frame_queues[u].q * params_per_user[u].mu_su[i] - frame_queues[u].x * set[i];
            if (!have_idle || value > d.theta_star || (value == d.theta_star && set[i] < d.p0_star)) {
                d.idle_user = u;
                d.p0_index = i;
                d.p0_star = set[i];
                d.theta_star = value;
                have_idle = true;
            }
        }
    }

    RatioChoice best;
    for (std::size_t u = 0; u < frame_queues.size(); ++u) {
        const auto& set = params_per_user[u].power_set;
        const auto c = min_ratio(d.theta_star, frame_queues[u].x, set, params_per_user[u].phi);
        if (!c.found) {
            continue;
        }
        const bool better = !best.found || ratio_less(c.num, c.den, best.num, best.den) ||
                            (ratio_equal(c.num, c.den, best.num, best.den) && set[c.index] < d.p1_star);
        if (better) {
            best = c;
            d.coop_user = u;
            d.p1_index = c.index;
            d.p1_star = set[c.index];
        }
    }
    if (!best.found) {
        throw ConfigError("solve_multiuser_frame: phi is zero for every user and power level");
    }
    return d;
}

std::vector<int> admit_multiuser(const std::vector<long long>& q_now, const std::vector<int>& arrivals,
                                 double v) {
    if (q_now.size() != arrivals.size()) {
        throw ConfigError("admit_multiuser: queue and arrival vectors differ in length");
    }
    std::vector<int> out(q_now.size());
    for (std::size_t i = 0; i < q_now.size(); ++i) {
        out[i] = admit(q_now[i], arrivals[i], v);
    }
    return out;
}

void FadingModel::validate(const PowerSet& power_set) const {
    if (states.empty()) {
        throw ConfigError("fading model: no states");
    }
    double total = 0.0;
    for (const auto& s : states) {
        if (!(s.prob >= 0.0 && s.prob <= 1.0)) {
            throw ConfigError("fading model: state probabilities must lie in [0, 1]");
        }
        if (s.phi.size() != power_set.size()) {
            throw ConfigError("fading model: phi table for state '" + s.id + "' has wrong length");
        }
        for (std::size_t i = 0; i < s.phi.size(); ++i) {
            if (!(s.phi[i] >= 0.0 && s.phi[i] <= 1.0) || (i > 0 && s.phi[i] < s.phi[i - 1])) {
                throw ConfigError("fading model: phi for state '" + s.id +
                                  "' must be a non-decreasing probability table");
            }
        }
        total += s.prob;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("fading model: state probabilities must sum to 1");
    }
}

namespace {

struct FadingEval {
    double num = 0.0;
    double den = 0.0;
    double mean_power = 0.0;
};

FadingEval evaluate(const std::vector<std::size_t>& idx, double theta, double x, const FadingModel& fading,
                    const PowerSet& set) {
    FadingEval e;
    for (std::size_t s = 0; s < idx.size(); ++s) {
        const auto& st = fading.states[s];
        e.mean_power += st.prob * set[idx[s]];
        e.den += st.prob * st.phi[idx[s]];
    }
    e.num = theta + x * e.mean_power;
    return e;
}

FadingDecision finish(std::vector<std::size_t> idx, const FadingEval& e, const PowerSet& set, bool exhaustive) {
    FadingDecision d;
    d.powers.reserve(idx.size());
    for (auto i : idx) {
        d.powers.push_back(set[i]);
    }
    d.indices = std::move(idx);
    d.objective = e.num / e.den;
    d.exhaustive = exhaustive;
    return d;
}

bool advance(std::vector<std::size_t>& idx, std::size_t n_levels) {
    for (std::size_t pos = idx.size(); pos-- > 0;) {
        if (++idx[pos] < n_levels) {
            return true;
        }
        idx[pos] = 0;
    }
    return false;
}

FadingDecision fading_exhaustive(double theta, double x, const FadingModel& fading, const PowerSet& set) {
    const std::size_t n_states = fading.states.size();
    const std::size_t n_levels = set.size();
    std::vector<std::size_t> idx(n_states, 0);
    std::vector<std::size_t> best_idx;
    FadingEval best;
    bool found = false;
    while (true) {
        const auto e = evaluate(idx, theta, x, fading, set);
        if (e.den > 0.0) {
            const bool better = !found || ratio_less(e.num, e.den, best.num, best.den) ||
                                (ratio_equal(e.num, e.den, best.num, best.den) && e.mean_power < best.mean_power);
            if (better) {
                best = e;
                best_idx = idx;
                found = true;
            }
        }
        // Mixed-radix increment, last state fastest, so the first hit among
        // equals is the lexicographically smallest vector.
        if (!advance(idx, n_levels)) {
            break;
        }
    }
    if (!found) {
        throw ConfigError("solve_p1_fading: success probability is zero for every power vector");
    }
    return finish(std::move(best_idx), best, set, true);
}

// Parametric iteration: for a trial ratio g, minimizing num - g*den separates
// across fading states. Terminates in finitely many steps over a finite set.
FadingDecision fading_parametric(double theta, double x, const FadingModel& fading, const PowerSet& set) {
    const std::size_t n_states = fading.states.size();
    std::vector<std::size_t> idx(n_states, set.size() - 1);
    auto e = evaluate(idx, theta, x, fading, set);
    if (!(e.den > 0.0)) {
        throw ConfigError("solve_p1_fading: success probability is zero for every power vector");
    }
    for (int iter = 0; iter < 1000; ++iter) {
        const double g = e.num / e.den;
        std::vector<std::size_t> next(n_states, 0);
        for (std::size_t s = 0; s < n_states; ++s) {
            const auto& st = fading.states[s];
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < set.size(); ++i) {
                const double val = x * set[i] - g * st.phi[i];
                if (val < best) {
                    best = val;
                    next[s] = i;
                }
            }
        }
        const auto ne = evaluate(next, theta, x, fading, set);
        if (!(ne.num - g * ne.den < -1e-12 * std::max(1.0, std::abs(e.num)))) {
            break;
        }
        idx = std::move(next);
        e = ne;
    }
    return finish(std::move(idx), e, set, false);
}

}  // namespace

FadingDecision solve_p1_fading(double theta_star, double x_su_frame, const FadingModel& fading,
                               const ModelParams& params, const FadingOptions& options) {
    const auto& set = params.power_set;
    fading.validate(set);

    // |P|^|S| with overflow guard.
    std::size_t combos = 1;
    bool over = false;
    for (std::size_t s = 0; s < fading.states.size(); ++s) {
        if (combos > options.exhaustive_cap / set.size()) {
            over = true;
            break;
        }
        combos *= set.size();
    }
    over = over || combos > options.exhaustive_cap;

    if (!over) {
        return fading_exhaustive(theta_star, x_su_frame, fading, set);
    }
    if (!options.allow_fallback) {
        std::ostringstream os;
        os << "solve_p1_fading: " << set.size() << "^" << fading.states.size()
           << " power vectors exceed the exhaustive cap of " << options.exhaustive_cap;
        throw SizeCapExceeded(os.str());
    }
    return fading_parametric(theta_star, x_su_frame, fading, set);
}

}  // namespace coopsim
