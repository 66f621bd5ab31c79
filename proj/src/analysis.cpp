#include "coopsim/analysis.hpp"

#include <cmath>
#include <sstream>

namespace coopsim {

namespace {

void require_stable(double lambda, double mu, const char* what) {
    if (!(lambda > 0.0)) {
        std::ostringstream os;
        os << what << ": lambda_pu must be positive (got " << lambda << ")";
        throw UnstableChainError(os.str());
    }
    if (!(lambda < mu) || mu > 1.0) {
        std::ostringstream os;
        os << what << ": unstable chain, need lambda_pu < mu <= 1 (lambda_pu=" << lambda
           << ", mu=" << mu << ")";
        throw UnstableChainError(os.str());
    }
}

}  // namespace

ChainSolution steady_state(double lambda_pu, double mu_eff) {
    if (!(lambda_pu >= 0.0) || !(lambda_pu < mu_eff) || mu_eff > 1.0) {
        std::ostringstream os;
        os << "steady_state: unstable chain, need lambda_pu < mu_eff <= 1 (lambda_pu=" << lambda_pu
           << ", mu_eff=" << mu_eff << ")";
        throw UnstableChainError(os.str());
    }
    ChainSolution s;
    s.effective_mu = mu_eff;
    s.pi_0 = 1.0 - lambda_pu / mu_eff;
    s.busy_fraction = 1.0 - s.pi_0;
    return s;
}

FrameLengthBounds frame_length_bounds(const ModelParams& params) {
    params.validate();
    const double lam = params.lambda_pu;
    const double phi_c = params.phi_c();
    const double phi_nc = params.phi_nc();
    require_stable(lam, phi_nc, "frame_length_bounds");
    return {phi_c / ((phi_c - lam) * lam), phi_nc / ((phi_nc - lam) * lam)};
}

BusyPeriodMoments busy_period_moments(double lambda_pu, double phi_nc) {
    // lambda_pu = 0 is the single-packet busy period (pure geometric service).
    if (!(lambda_pu >= 0.0) || !(lambda_pu < phi_nc) || phi_nc > 1.0) {
        std::ostringstream os;
        os << "busy_period_moments: unstable chain (lambda_pu=" << lambda_pu << ", phi_nc=" << phi_nc
           << ")";
        throw UnstableChainError(os.str());
    }
    const double gap = phi_nc - lambda_pu;
    BusyPeriodMoments m;
    m.e_b = 1.0 / gap;
    m.e_b2 = (2.0 - phi_nc) / (phi_nc * gap) + 2.0 * lambda_pu / (phi_nc * gap * gap) +
             4.0 * lambda_pu * lambda_pu * (1.0 - phi_nc) / (phi_nc * gap * gap * gap);
    return m;
}

BusyPeriodMoments exact_busy_period_moments(double lambda_pu, double phi_nc) {
    if (!(lambda_pu >= 0.0) || !(lambda_pu < phi_nc) || phi_nc > 1.0) {
        throw UnstableChainError("exact_busy_period_moments: unstable chain");
    }
    // B = X + sum_{i<=N} B_i with N | X ~ Binomial(X, lambda), so X and N are
    // correlated: E[XN] = lambda E[X^2].
    const double e_b = 1.0 / (phi_nc - lambda_pu);
    const double e_x2 = (2.0 - phi_nc) / (phi_nc * phi_nc);
    const double e_nn1 = 2.0 * lambda_pu * lambda_pu * (1.0 - phi_nc) / (phi_nc * phi_nc);
    BusyPeriodMoments m;
    m.e_b = e_b;
    m.e_b2 = (e_x2 * (1.0 + 2.0 * lambda_pu * e_b) + e_b * e_b * e_nn1) / (1.0 - lambda_pu / phi_nc);
    return m;
}

double exact_frame_second_moment(double lambda_pu, double phi) {
    require_stable(lambda_pu, phi, "exact_frame_second_moment");
    const auto busy = exact_busy_period_moments(lambda_pu, phi);
    return (2.0 - lambda_pu) / (lambda_pu * lambda_pu) + busy.e_b2 + 2.0 * busy.e_b / lambda_pu;
}

double compute_d(double lambda_pu, double phi_nc) {
    require_stable(lambda_pu, phi_nc, "compute_d");
    const auto busy = busy_period_moments(lambda_pu, phi_nc);
    const double e_i = 1.0 / lambda_pu;
    const double e_i2 = (2.0 - lambda_pu) / (lambda_pu * lambda_pu);
    return e_i2 + busy.e_b2 + 2.0 * e_i * busy.e_b;
}

DriftConstants drift_constants(const ModelParams& params) {
    const auto bounds = frame_length_bounds(params);
    const double d = compute_d(params.lambda_pu, params.phi_nc());
    const double a_max = static_cast<double>(params.a_max);
    const double mu_max = params.mu_max();
    const double slack = params.p_max() - params.p_avg;

    DriftConstants c;
    c.d_const = d;
    c.b_const = d * (mu_max * mu_max + a_max * a_max + slack * slack) / 2.0;
    c.c_const = d * (a_max + mu_max) * a_max / 2.0;
    c.t_min = bounds.t_min;
    c.t_max = bounds.t_max;
    return c;
}

double throughput_lower_bound(double v, double upsilon_star, const DriftConstants& constants) {
    if (!(v > 0.0)) {
        throw std::invalid_argument("throughput_lower_bound: V must be positive");
    }
    return upsilon_star - (constants.b_const + constants.c_const) / (v * constants.t_min);
}

}  // namespace coopsim
