#include "coopsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace coopsim {

PowerSet::PowerSet(std::vector<double> levels, bool two_point)
    : levels_(std::move(levels)), two_point_(two_point) {}

PowerSet PowerSet::two_point(double p_max) {
    if (!(p_max > 0.0) || !std::isfinite(p_max)) {
        throw ConfigError("power set: p_max must be positive and finite");
    }
    return PowerSet({0.0, p_max}, true);
}

PowerSet PowerSet::grid(std::vector<double> levels) {
    if (levels.size() < 2) {
        throw ConfigError("power set: need at least two levels");
    }
    if (levels.front() != 0.0) {
        throw ConfigError("power set: first level must be 0");
    }
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (!(levels[i] > levels[i - 1]) || !std::isfinite(levels[i])) {
            throw ConfigError("power set: levels must be finite and strictly increasing");
        }
    }
    const bool two = levels.size() == 2;
    return PowerSet(std::move(levels), two);
}

std::size_t PowerSet::index_of(double power) const {
    auto it = std::find(levels_.begin(), levels_.end(), power);
    if (it == levels_.end()) {
        std::ostringstream os;
        os << "power " << power << " is not a member of the power set";
        throw ConfigError(os.str());
    }
    return static_cast<std::size_t>(it - levels_.begin());
}

double ModelParams::mu_max() const {
    return mu_su.empty() ? 0.0 : *std::max_element(mu_su.begin(), mu_su.end());
}

void ModelParams::validate() const {
    const std::size_t n = power_set.size();
    if (phi.size() != n) {
        throw ConfigError("phi must have one entry per power level");
    }
    if (mu_su.size() != n) {
        throw ConfigError("mu_su must have one entry per power level");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(phi[i] >= 0.0 && phi[i] <= 1.0)) {
            throw ConfigError("phi values must lie in [0, 1]");
        }
        if (!(mu_su[i] >= 0.0 && mu_su[i] <= 1.0)) {
            throw ConfigError("mu_su values must lie in [0, 1]");
        }
        if (i > 0 && phi[i] < phi[i - 1]) {
            throw ConfigError("phi must be non-decreasing in power");
        }
    }
    if (a_max < 0) {
        throw ConfigError("a_max must be non-negative");
    }
    if (!(lambda_pu >= 0.0) || !std::isfinite(lambda_pu)) {
        throw ConfigError("lambda_pu must be a non-negative probability");
    }
    if (!(lambda_pu < phi_nc())) {
        throw ConfigError("unstable primary queue: lambda_pu must be below phi_nc = phi(0)");
    }
    if (!(lambda_su >= 0.0) || lambda_su > static_cast<double>(a_max)) {
        throw ConfigError("lambda_su must lie in [0, a_max]");
    }
    if (!(p_avg >= 0.0) || p_avg > p_max()) {
        throw ConfigError("p_avg must lie in [0, p_max]");
    }
}

ModelParams two_point_params(double lambda_pu, double lambda_su, double phi_nc, double phi_c,
                             double p_avg, double p_max, double mu_su_max, int a_max) {
    ModelParams p;
    p.lambda_pu = lambda_pu;
    p.lambda_su = lambda_su;
    p.a_max = a_max;
    p.power_set = PowerSet::two_point(p_max);
    p.phi = {phi_nc, phi_c};
    p.mu_su = {0.0, mu_su_max};
    p.p_avg = p_avg;
    return p;
}

ModelParams reference_params() { return two_point_params(0.5, 0.5, 0.6, 0.8, 0.5, 1.0); }

const char* to_string(Phase phase) { return phase == Phase::PuIdle ? "PU_Idle" : "PU_Busy"; }

long long step_pu_queue(long long q_pu, bool pu_success, int arrival) {
    return std::max(q_pu - (pu_success ? 1 : 0), 0LL) + arrival;
}

long long step_su_queue(long long q_su, int served, int admitted) {
    return std::max(q_su - served, 0LL) + admitted;
}

double update_virtual_queue(double x_su, long long frame_len, double frame_power_sum, double p_avg) {
    return std::max(x_su - static_cast<double>(frame_len) * p_avg + frame_power_sum, 0.0);
}

}  // namespace coopsim
