#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "coopsim/analysis.hpp"
#include "coopsim/controller.hpp"
#include "coopsim/io.hpp"
#include "coopsim/oracle.hpp"
#include "coopsim/sim.hpp"

namespace py = pybind11;
using namespace coopsim;

namespace {

py::dict frame_to_dict(const FrameRecord& f) {
    py::dict d;
    d["frame"] = f.frame;
    d["frame_len"] = f.frame_len;
    d["busy_len"] = f.busy_len;
    d["admitted"] = f.admitted;
    d["served"] = f.served;
    d["power_idle"] = f.power_idle;
    d["power_coop"] = f.power_coop;
    d["q_su_end"] = f.q_su_end;
    d["x_su_end"] = f.x_su_end;
    d["lambda_pu"] = f.lambda_pu;
    return d;
}

std::string frames_csv(const RunMetrics& m) {
    std::ostringstream os;
    write_frames_csv(os, m);
    return os.str();
}

}  // namespace

PYBIND11_MODULE(_coopsim, m) {
    m.doc() = "Frame-based cooperative PU/SU simulator";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<UnstableChainError>(m, "UnstableChainError", PyExc_ValueError);

    py::class_<PowerSet>(m, "PowerSet")
        .def_static("two_point", &PowerSet::two_point, py::arg("p_max"))
        .def_static("grid", &PowerSet::grid, py::arg("levels"))
        .def_property_readonly("levels",
                               [](const PowerSet& s) { return std::vector<double>(s.levels().begin(), s.levels().end()); })
        .def_property_readonly("p_max", &PowerSet::p_max)
        .def_property_readonly("is_two_point", &PowerSet::is_two_point)
        .def("__len__", &PowerSet::size);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_readwrite("lambda_pu", &ModelParams::lambda_pu)
        .def_readwrite("lambda_su", &ModelParams::lambda_su)
        .def_readwrite("a_max", &ModelParams::a_max)
        .def_readwrite("power_set", &ModelParams::power_set)
        .def_readwrite("phi", &ModelParams::phi)
        .def_readwrite("mu_su", &ModelParams::mu_su)
        .def_readwrite("p_avg", &ModelParams::p_avg)
        .def_property_readonly("p_max", &ModelParams::p_max)
        .def_property_readonly("phi_nc", &ModelParams::phi_nc)
        .def_property_readonly("phi_c", &ModelParams::phi_c)
        .def("validate", &ModelParams::validate);

    m.def("reference_params", &reference_params);
    m.def("two_point_params", &two_point_params, py::arg("lambda_pu"), py::arg("lambda_su"), py::arg("phi_nc"),
          py::arg("phi_c"), py::arg("p_avg"), py::arg("p_max"), py::arg("mu_su_max") = 1.0, py::arg("a_max") = 1);

    m.def("steady_state", [](double lam, double mu) { return steady_state(lam, mu).pi_0; }, py::arg("lambda_pu"),
          py::arg("mu_eff"), "PU idle probability");
    m.def("frame_length_bounds", [](const ModelParams& p) {
        const auto b = frame_length_bounds(p);
        return py::make_tuple(b.t_min, b.t_max);
    });
    m.def("busy_period_moments", [](double lam, double phi) {
        const auto b = busy_period_moments(lam, phi);
        return py::make_tuple(b.e_b, b.e_b2);
    });
    m.def("exact_busy_period_moments", [](double lam, double phi) {
        const auto b = exact_busy_period_moments(lam, phi);
        return py::make_tuple(b.e_b, b.e_b2);
    });
    m.def("compute_d", &compute_d);
    m.def("drift_constants", [](const ModelParams& p) {
        const auto c = drift_constants(p);
        py::dict d;
        d["b"] = c.b_const;
        d["c"] = c.c_const;
        d["d"] = c.d_const;
        d["t_min"] = c.t_min;
        d["t_max"] = c.t_max;
        return d;
    });
    m.def("throughput_lower_bound", [](double v, double upsilon, const ModelParams& p) {
        return throughput_lower_bound(v, upsilon, drift_constants(p));
    });

    m.def("admit", &admit);
    m.def(
        "solve_frame",
        [](double q, double x, const ModelParams& p) {
            const auto f = solve_frame(q, x, p);
            return py::make_tuple(f.p0_star, f.p1_star, f.theta_star);
        },
        py::arg("q_su"), py::arg("x_su"), py::arg("params"), "(p0_star, p1_star, theta_star)");

    py::class_<StationaryPolicy>(m, "StationaryPolicy")
        .def_readonly("q", &StationaryPolicy::coop_prob)
        .def_readonly("p", &StationaryPolicy::idle_tx_prob)
        .def_readonly("upsilon", &StationaryPolicy::upsilon)
        .def_readonly("pi_0", &StationaryPolicy::pi_0)
        .def_readonly("power_used", &StationaryPolicy::power_used);
    m.def("optimal_two_point", &optimal_two_point);
    m.def(
        "grid_search",
        [](const ModelParams& p, double step, bool no_coop) { return grid_search(p, step, {no_coop}); },
        py::arg("params"), py::arg("step"), py::arg("force_no_coop") = false);

    py::class_<RunMetrics>(m, "RunMetrics")
        .def_readonly("policy", &RunMetrics::policy)
        .def_readonly("v", &RunMetrics::v)
        .def_readonly("seed", &RunMetrics::seed)
        .def_readonly("frame_count", &RunMetrics::frame_count)
        .def_readonly("total_slots", &RunMetrics::total_slots)
        .def_readonly("max_q_su", &RunMetrics::max_q_su)
        .def_readonly("bound_violations", &RunMetrics::bound_violations)
        .def_property_readonly("throughput_admitted", &RunMetrics::throughput_admitted)
        .def_property_readonly("throughput_served", &RunMetrics::throughput_served)
        .def_property_readonly("avg_power", &RunMetrics::avg_power)
        .def_property_readonly("avg_q_su", &RunMetrics::avg_q_su)
        .def_property_readonly("frames",
                               [](const RunMetrics& r) {
                                   py::list out;
                                   for (const auto& f : r.frames) out.append(frame_to_dict(f));
                                   return out;
                               })
        .def("frames_csv", &frames_csv);

    m.def(
        "run_episode",
        [](const ModelParams& params, const std::string& policy, double v, long long frames, std::uint64_t seed,
           std::vector<std::pair<long long, double>> schedule) {
            Scenario s;
            s.base_params = params;
            s.policy = PolicySpec::parse(policy);
            s.v = v;
            s.horizon_frames = frames;
            s.seed = seed;
            for (auto [after, lam] : schedule) s.lambda_schedule.push_back({after, lam});
            py::gil_scoped_release release;
            return run_episode(s);
        },
        py::arg("params"), py::arg("policy") = "fbdpp", py::arg("v") = 500.0, py::arg("frames") = 1000,
        py::arg("seed") = 1, py::arg("lambda_schedule") = std::vector<std::pair<long long, double>>{});

    m.def(
        "sweep_v",
        [](const ModelParams& params, const std::vector<double>& vs, long long frames, std::uint64_t seed) {
            Scenario s;
            s.base_params = params;
            s.horizon_frames = frames;
            s.seed = seed;
            py::gil_scoped_release release;
            return sweep_v(s, vs);
        },
        py::arg("params"), py::arg("v_values"), py::arg("frames") = 1000, py::arg("seed") = 1);

    m.attr("generator") = std::string(Rng::name());
}
