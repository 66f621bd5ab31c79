#include "coopsim/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>

#include "coopsim/analysis.hpp"
#include "coopsim/io.hpp"
#include "coopsim/oracle.hpp"
#include "coopsim/sim.hpp"

namespace coopsim {

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<long long> frames;
    std::optional<double> v;
    std::string v_list;
    std::string policy;
    std::string out_dir;
    std::optional<std::size_t> window;
    bool validate = false;
    bool no_coop = false;
    std::optional<double> grid_step;
};

RunConfig load_with_overrides(const Overrides& o) {
    RunConfig cfg = load_config(o.config);
    Scenario& sc = cfg.scenario;
    if (o.seed) sc.seed = *o.seed;
    if (o.frames) sc.horizon_frames = *o.frames;
    if (o.v) sc.v = *o.v;
    if (o.window) sc.window = *o.window;
    if (!o.policy.empty()) {
        const auto q = sc.policy.coop_prob;
        const auto p = sc.policy.idle_tx_prob;
        sc.policy = PolicySpec::parse(o.policy);
        sc.policy.coop_prob = q;
        sc.policy.idle_tx_prob = p;
    }
    if (!o.v_list.empty()) cfg.v_list = parse_number_list(o.v_list);
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.no_coop) cfg.force_no_coop = true;
    if (o.grid_step) cfg.grid_step = *o.grid_step;
    sc.validate();
    for (double v : cfg.v_list) {
        if (!(v > 0.0)) throw ConfigError("V values must be positive");
    }
    return cfg;
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / name);
    if (!f) {
        throw std::runtime_error("cannot write " + (dir / name).string());
    }
    return f;
}

void print_summary_line(std::ostream& out, const RunMetrics& m) {
    out << "policy=" << m.policy << " v=" << format_double(m.v) << " frames=" << m.frame_count
        << " slots=" << m.total_slots << " throughput_admitted=" << format_double(m.throughput_admitted())
        << " throughput_served=" << format_double(m.throughput_served())
        << " avg_power=" << format_double(m.avg_power()) << " max_q_su=" << m.max_q_su
        << " bound_violations=" << m.bound_violations << " seed=" << m.seed << " generator=" << m.generator << "\n";
}

int cmd_run(const Overrides& o, std::ostream& out) {
    const auto cfg = load_with_overrides(o);
    const auto m = run_episode(cfg.scenario);
    auto frames = open_output(cfg.out_dir, "frames.csv");
    write_frames_csv(frames, m);
    auto summary = open_output(cfg.out_dir, "summary.csv");
    write_summary_csv(summary, m);
    print_summary_line(out, m);
    return kExitOk;
}

int cmd_sweep(const Overrides& o, std::ostream& out) {
    const auto cfg = load_with_overrides(o);
    if (cfg.v_list.empty()) {
        throw ConfigError("sweep needs a V list (--v-list or v_list in the config)");
    }
    const auto results = sweep_v(cfg.scenario, cfg.v_list);
    auto f = open_output(cfg.out_dir, "sweep.csv");
    write_sweep_csv(f, results);
    out << std::left << std::setw(10) << "v" << std::setw(22) << "throughput_admitted" << std::setw(14) << "avg_q_su"
        << "avg_power\n";
    for (const auto& [v, m] : results) {
        out << std::setw(10) << format_double(v) << std::setw(22) << m.throughput_admitted() << std::setw(14)
            << m.avg_q_su() << m.avg_power() << "\n";
    }
    return kExitOk;
}

int cmd_adaptive(const Overrides& o, std::ostream& out) {
    const auto cfg = load_with_overrides(o);
    const auto m = run_adaptive(cfg.scenario);
    auto frames = open_output(cfg.out_dir, "frames.csv");
    write_frames_csv(frames, m);
    auto summary = open_output(cfg.out_dir, "summary.csv");
    write_summary_csv(summary, m);

    const auto thr = moving_average(m.frames, cfg.scenario.window, SeriesField::AdmittedPerSlot);
    const auto coop = moving_average(m.frames, cfg.scenario.window, SeriesField::CoopPowerPerSlot);
    const auto power = moving_average(m.frames, cfg.scenario.window, SeriesField::PowerPerSlot);
    auto ma = open_output(cfg.out_dir, "moving_average.csv");
    ma << "# window=" << cfg.scenario.window << " frames\n";
    ma << "frame,lambda_pu,throughput_admitted,coop_power,total_power\n";
    for (std::size_t k = 0; k < m.frames.size(); ++k) {
        ma << m.frames[k].frame << ',' << format_double(m.frames[k].lambda_pu) << ',' << format_double(thr[k]) << ','
           << format_double(coop[k]) << ',' << format_double(power[k]) << "\n";
    }
    print_summary_line(out, m);
    return kExitOk;
}

void print_policy(std::ostream& out, const StationaryPolicy& s) {
    out << "upsilon_star=" << format_double(s.upsilon) << "\n"
        << "q=" << format_double(s.coop_prob) << "\n"
        << "p=" << format_double(s.idle_tx_prob) << "\n"
        << "pi_0=" << format_double(s.pi_0) << "\n"
        << "power_used=" << format_double(s.power_used) << "\n";
}

int cmd_oracle(const Overrides& o, std::ostream& out) {
    const auto cfg = load_with_overrides(o);
    const auto& params = cfg.scenario.base_params;
    StationaryPolicy s;
    std::string method;
    if (cfg.force_no_coop || cfg.grid_step > 0.0) {
        const double step = cfg.grid_step > 0.0 ? cfg.grid_step : 1e-3;
        s = grid_search(params, step, {cfg.force_no_coop});
        method = "grid";
    } else {
        if (!params.power_set.is_two_point()) {
            throw ConfigError(
                "the closed-form oracle needs a two-point power set {0, P_max}; pass --grid-step to use the "
                "approximate grid search for multi-level sets");
        }
        s = optimal_two_point(params);
        method = "closed-form";
    }
    out << "method=" << method << "\n";
    print_policy(out, s);

    auto f = open_output(cfg.out_dir, "oracle.csv");
    f << "method,upsilon_star,q,p,pi_0,power_used\n"
      << method << ',' << format_double(s.upsilon) << ',' << format_double(s.coop_prob) << ','
      << format_double(s.idle_tx_prob) << ',' << format_double(s.pi_0) << ',' << format_double(s.power_used) << "\n";

    if (o.validate) {
        const auto r = simulate_stationary(s, params, 10'000'000, cfg.scenario.seed);
        out << "mc_admitted=" << format_double(r.admitted) << "\n"
            << "mc_admitted_stderr=" << format_double(r.admitted_stderr) << "\n"
            << "mc_power=" << format_double(r.power) << "\n"
            << "mc_power_stderr=" << format_double(r.power_stderr) << "\n"
            << "mc_slots=" << r.slots << "\n";
    }
    return kExitOk;
}

int cmd_analyze(const Overrides& o, std::ostream& out) {
    const auto cfg = load_with_overrides(o);
    const auto& params = cfg.scenario.base_params;
    const auto bounds = frame_length_bounds(params);
    const auto busy = busy_period_moments(params.lambda_pu, params.phi_nc());
    const auto c = drift_constants(params);
    const double upsilon =
        params.power_set.is_two_point() ? optimal_two_point(params).upsilon : grid_search(params, 1e-2).upsilon;

    out << "t_min=" << format_double(bounds.t_min) << "\n"
        << "t_max=" << format_double(bounds.t_max) << "\n"
        << "e_b=" << format_double(busy.e_b) << "\n"
        << "e_b2=" << format_double(busy.e_b2) << "\n"
        << "e_b2_exact=" << format_double(exact_busy_period_moments(params.lambda_pu, params.phi_nc()).e_b2) << "\n"
        << "d=" << format_double(c.d_const) << "\n"
        << "d_exact=" << format_double(exact_frame_second_moment(params.lambda_pu, params.phi_nc())) << "\n"
        << "b=" << format_double(c.b_const) << "\n"
        << "c=" << format_double(c.c_const) << "\n"
        << "upsilon_star=" << format_double(upsilon) << "\n";
    const auto vs = cfg.v_list.empty() ? std::vector<double>{cfg.scenario.v} : cfg.v_list;
    for (double v : vs) {
        const double bound = throughput_lower_bound(v, upsilon, c);
        out << "bound[v=" << format_double(v) << "]=" << format_double(bound) << (bound <= 0.0 ? " vacuous" : "")
            << "\n";
    }
    return kExitOk;
}

int cmd_baselines(const Overrides& o, std::ostream& out) {
    const auto cfg = load_with_overrides(o);
    std::vector<RunMetrics> rows;
    for (auto spec : {PolicySpec::no_coop(), PolicySpec::always_coop(), PolicySpec::counter_based()}) {
        Scenario s = cfg.scenario;
        s.policy = spec;
        s.horizon_frames = std::numeric_limits<long long>::max();
        s.max_slots = cfg.baseline_slots;
        s.record_frames = false;
        rows.push_back(run_episode(s));
    }
    Scenario fb = cfg.scenario;
    fb.policy = PolicySpec::fbdpp();
    fb.record_frames = false;
    rows.push_back(run_episode(fb));

    out << std::left << std::setw(14) << "policy" << std::setw(20) << "throughput_served" << std::setw(22)
        << "throughput_admitted" << std::setw(12) << "avg_power" << "slots\n";
    for (const auto& m : rows) {
        out << std::setw(14) << m.policy << std::setw(20) << m.throughput_served() << std::setw(22)
            << m.throughput_admitted() << std::setw(12) << m.avg_power() << m.total_slots << "\n";
    }
    if (cfg.scenario.base_params.power_set.is_two_point()) {
        out << "oracle upsilon_star=" << format_double(optimal_two_point(cfg.scenario.base_params).upsilon) << "\n";
    }

    auto f = open_output(cfg.out_dir, "baselines.csv");
    f << "# generator=" << Rng::name() << " seed=" << cfg.scenario.seed << "\n";
    f << "policy,throughput_served,throughput_admitted,avg_power,slots\n";
    for (const auto& m : rows) {
        f << m.policy << ',' << format_double(m.throughput_served()) << ',' << format_double(m.throughput_admitted())
          << ',' << format_double(m.avg_power()) << ',' << m.total_slots << "\n";
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Slotted simulator for opportunistic PU/SU cooperation", "coopsim"};
    app.require_subcommand(1);

    Overrides o;
    auto add_common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config, "key = value configuration file")->required();
        sub->add_option("--seed", o.seed, "override the RNG seed");
        sub->add_option("--frames", o.frames, "override the horizon in frames");
        sub->add_option("--v", o.v, "override V");
        sub->add_option("--v-list", o.v_list, "comma-separated V values");
        sub->add_option("--policy", o.policy, "fbdpp | no-coop | always-coop | counter | stationary");
        sub->add_option("--out-dir", o.out_dir, "directory for CSV output");
        sub->add_option("--window", o.window, "moving-average window in frames");
    };

    auto* run = app.add_subcommand("run", "simulate one episode; writes frames.csv and summary.csv");
    auto* sweep = app.add_subcommand("sweep", "one episode per V; writes sweep.csv");
    auto* adaptive = app.add_subcommand("adaptive", "episode with a lambda_pu schedule; adds moving_average.csv");
    auto* oracle = app.add_subcommand("oracle", "optimal stationary policy");
    auto* analyze = app.add_subcommand("analyze", "frame-length bounds, moments and drift constants");
    auto* baselines = app.add_subcommand("baselines", "compare the three baselines with FBDPP");
    for (auto* sub : {run, sweep, adaptive, oracle, analyze, baselines}) {
        add_common(sub);
    }
    oracle->add_flag("--validate", o.validate, "Monte-Carlo check of the returned policy");
    oracle->add_flag("--no-coop", o.no_coop, "restrict to policies that never cooperate");
    oracle->add_option("--grid-step", o.grid_step, "use grid search with this step");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (run->parsed()) return cmd_run(o, out);
        if (sweep->parsed()) return cmd_sweep(o, out);
        if (adaptive->parsed()) return cmd_adaptive(o, out);
        if (oracle->parsed()) return cmd_oracle(o, out);
        if (analyze->parsed()) return cmd_analyze(o, out);
        if (baselines->parsed()) return cmd_baselines(o, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitConfigError;
}

}  // namespace coopsim
