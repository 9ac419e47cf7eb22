#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uavsec/channel.hpp"
#include "uavsec/experiment.hpp"
#include "uavsec/robust.hpp"
#include "uavsec/schemes.hpp"

namespace py = pybind11;
using namespace uavsec;

namespace {

SchemeSpec make_spec(const std::string& scheme, const std::string& space,
                     const std::string& location, double radius_q) {
    SchemeSpec spec;
    spec.kind = scheme_from_string(scheme);
    if (space == "2d") spec.space_mode = SpaceMode::TwoD;
    else if (space == "3d") spec.space_mode = SpaceMode::ThreeD;
    else throw std::invalid_argument("space must be '2d' or '3d'");
    if (location == "perfect") spec.location = LocationModel::Perfect;
    else if (location == "robust") spec.location = LocationModel::Robust;
    else throw std::invalid_argument("location must be 'perfect' or 'robust'");
    spec.radius_q = radius_q;
    return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Joint UAV-jammer trajectory and power optimization for secure "
              "cognitive-radio links";

    py::class_<Position3D>(m, "Position3D")
        .def(py::init<>())
        .def(py::init([](double x, double y, double z) { return Position3D{x, y, z}; }),
             py::arg("x"), py::arg("y"), py::arg("z"))
        .def_readwrite("x", &Position3D::x)
        .def_readwrite("y", &Position3D::y)
        .def_readwrite("z", &Position3D::z)
        .def("__repr__", [](const Position3D& p) {
            return "Position3D(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
                   std::to_string(p.z) + ")";
        });

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def_readwrite("st_pos", &ScenarioConfig::st_pos)
        .def_readwrite("sr_pos", &ScenarioConfig::sr_pos)
        .def_readwrite("pr_pos", &ScenarioConfig::pr_pos)
        .def_readwrite("eve_pos", &ScenarioConfig::eve_pos)
        .def_readwrite("uav_start", &ScenarioConfig::uav_start)
        .def_readwrite("uav_end", &ScenarioConfig::uav_end)
        .def_readwrite("horizon_T", &ScenarioConfig::horizon_T)
        .def_readwrite("slot_count_N", &ScenarioConfig::slot_count_N)
        .def_readonly("slot_len_delta", &ScenarioConfig::slot_len_delta)
        .def_readwrite("v_max", &ScenarioConfig::v_max)
        .def_readonly("l_max", &ScenarioConfig::l_max)
        .def_readwrite("h_min", &ScenarioConfig::h_min)
        .def_readwrite("h_max", &ScenarioConfig::h_max)
        .def_readwrite("p_s_max", &ScenarioConfig::p_s_max)
        .def_readwrite("p_s_avg", &ScenarioConfig::p_s_avg)
        .def_readwrite("p_u_max", &ScenarioConfig::p_u_max)
        .def_readwrite("p_u_avg", &ScenarioConfig::p_u_avg)
        .def_readwrite("interference_eps", &ScenarioConfig::interference_eps)
        .def_readwrite("noise_power", &ScenarioConfig::noise_power)
        .def_readwrite("rho0", &ScenarioConfig::rho0)
        .def_readonly("gamma0", &ScenarioConfig::gamma0)
        .def_readwrite("path_loss_exp", &ScenarioConfig::path_loss_exp)
        .def_readwrite("euler_k", &ScenarioConfig::euler_k)
        .def_readwrite("eve_radius_q", &ScenarioConfig::eve_radius_q)
        .def_readwrite("bandwidth_hz", &ScenarioConfig::bandwidth_hz)
        .def_readwrite("eps_tol", &ScenarioConfig::eps_tol)
        .def_readwrite("rng_seed", &ScenarioConfig::rng_seed);

    py::class_<IteratePoint>(m, "IteratePoint")
        .def_readonly("traj", &IteratePoint::traj)
        .def_readonly("p_s", &IteratePoint::p_s)
        .def_readonly("p_u", &IteratePoint::p_u)
        .def_readonly("r_s", &IteratePoint::r_s)
        .def_readonly("r_e", &IteratePoint::r_e)
        .def_readonly("alpha_e", &IteratePoint::alpha_e)
        .def_readonly("beta", &IteratePoint::beta);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("final_point", &RunResult::final_point)
        .def_readonly("objective_history", &RunResult::objective_history)
        .def_readonly("per_slot_rate_s", &RunResult::per_slot_rate_s)
        .def_readonly("per_slot_rate_e", &RunResult::per_slot_rate_e)
        .def_readonly("per_slot_secrecy", &RunResult::per_slot_secrecy)
        .def_readonly("uav_eve_distance", &RunResult::uav_eve_distance)
        .def_readonly("iterations", &RunResult::iterations)
        .def_readonly("converged", &RunResult::converged)
        .def_readonly("objective", &RunResult::objective)
        .def_readonly("average_secrecy", &RunResult::average_secrecy)
        .def_readonly("scheme", &RunResult::scheme)
        .def_readonly("robust", &RunResult::robust)
        .def_readonly("radius_q", &RunResult::radius_q);

    m.def("default_scenario", &default_scenario,
          "Scenario with the reference simulation parameters");
    m.def("parse_config", &parse_config, py::arg("text"),
          "Parse a key/value scenario document");
    m.def("load_config_file", &load_config_file, py::arg("path"));
    m.def("default_config_document", &default_config_document);
    m.def("dbm_to_watts", &dbm_to_watts, py::arg("dbm"));
    m.def("watts_to_dbm", &watts_to_dbm, py::arg("watts"));

    m.def("squared_distance", &squared_distance, py::arg("a"), py::arg("b"));
    m.def("uav_gain", &uav_gain, py::arg("rho0"), py::arg("dist"));
    m.def("secrecy_lower_bound", &secrecy_lower_bound, py::arg("p_s"), py::arg("p_u"),
          py::arg("d_ss"), py::arg("d_us"), py::arg("cfg"));
    m.def("eavesdropper_upper_bound", &eavesdropper_upper_bound, py::arg("p_s"), py::arg("p_u"),
          py::arg("d_se"), py::arg("d_ue"), py::arg("cfg"));
    m.def("ergodic_rate_mc", &ergodic_rate_mc, py::arg("p_s"), py::arg("p_u"), py::arg("d_tx"),
          py::arg("d_jam"), py::arg("samples"), py::arg("seed"), py::arg("cfg"),
          "Monte-Carlo estimate of the ergodic rate under Rayleigh fading");
    m.def("worst_case_st_eve_distance", &worst_case_st_eve_distance, py::arg("eve_estimate"),
          py::arg("radius_q"), py::arg("st"));

    m.def(
        "solve_sca",
        [](const ScenarioConfig& cfg) { return solve_sca(cfg); }, py::arg("cfg"),
        py::call_guard<py::gil_scoped_release>(),
        "Joint trajectory/power optimization with perfect Eve location");
    m.def(
        "solve_robust_sca",
        [](const ScenarioConfig& cfg) { return solve_robust_sca(cfg); }, py::arg("cfg"),
        py::call_guard<py::gil_scoped_release>(),
        "Worst-case variant over the Eve uncertainty disk");
    m.def(
        "run_scheme",
        [](const std::string& scheme, const std::string& space, const std::string& location,
           double radius_q, const ScenarioConfig& cfg) {
            return run_scheme(make_spec(scheme, space, location, radius_q), cfg);
        },
        py::arg("scheme"), py::arg("space"), py::arg("location"), py::arg("radius_q"),
        py::arg("cfg"), py::call_guard<py::gil_scoped_release>(),
        "Run one comparison scheme: proposed, fixed-power, straight-line or no-jamming");

#ifdef UAVSEC_VERSION
    m.attr("__version__") = UAVSEC_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
