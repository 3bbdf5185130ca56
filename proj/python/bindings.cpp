// Python bindings for the solver, network, genie, and simulation layers.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sepnet/genie.hpp"
#include "sepnet/json_io.hpp"
#include "sepnet/sim.hpp"

namespace py = pybind11;
using namespace sepnet;

namespace {

NetworkSpec spec_from_json_str(const std::string& text) {
  return load_network_spec(Json::parse(text));
}

std::string report_to_json_str(const SimReport& r) { return dump_sim_report(r).dump(); }

}  // namespace

PYBIND11_MODULE(_sepnet, m) {
  m.doc() = "source-channel separation toolkit";

  py::class_<Pmf>(m, "Pmf")
      .def(py::init<Vec>())
      .def_static("uniform", &Pmf::uniform)
      .def_readonly("p", &Pmf::p)
      .def("__len__", &Pmf::size)
      .def("__getitem__", [](const Pmf& p, std::size_t i) { return p[i]; });

  py::class_<JointPmf>(m, "JointPmf")
      .def(py::init<std::vector<std::size_t>, Vec>())
      .def_readonly("dims", &JointPmf::dims)
      .def_readonly("p", &JointPmf::p)
      .def("marginal", &JointPmf::marginal);

  py::class_<Dmc>(m, "Dmc")
      .def(py::init<std::size_t, std::size_t, Vec>())
      .def_static("bsc", &Dmc::bsc)
      .def_static("identity", &Dmc::identity)
      .def_readonly("in_size", &Dmc::in_size)
      .def_readonly("out_size", &Dmc::out_size)
      .def_readonly("t", &Dmc::t)
      .def("at", &Dmc::at);

  py::class_<FiniteAbelianGroup>(m, "FiniteAbelianGroup")
      .def_static("make_cyclic", &FiniteAbelianGroup::make_cyclic)
      .def_readonly("order", &FiniteAbelianGroup::order)
      .def("add", &FiniteAbelianGroup::add)
      .def("neg", &FiniteAbelianGroup::neg);

  py::class_<DistortionMeasure>(m, "DistortionMeasure")
      .def(py::init<std::size_t, std::size_t, Vec>())
      .def_static("hamming", &DistortionMeasure::hamming)
      .def_static("difference", &DistortionMeasure::difference)
      .def_readonly("ns", &DistortionMeasure::ns)
      .def_readonly("nr", &DistortionMeasure::nr)
      .def("at", &DistortionMeasure::at)
      .def("d_max", &DistortionMeasure::d_max);

  py::class_<SeededRng>(m, "SeededRng")
      .def(py::init<std::uint64_t, std::uint64_t>())
      .def("child", &SeededRng::child)
      .def("uniform", &SeededRng::uniform);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("tolerance", &SolverConfig::tolerance)
      .def_readwrite("max_iterations", &SolverConfig::max_iterations)
      .def_readwrite("lagrange_grid", &SolverConfig::lagrange_grid)
      .def_readwrite("multistart_count", &SolverConfig::multistart_count);

  py::class_<SolverResult>(m, "SolverResult")
      .def_readonly("value", &SolverResult::value)
      .def_readonly("lower_bound", &SolverResult::lower_bound)
      .def_readonly("upper_bound", &SolverResult::upper_bound)
      .def_readonly("argument", &SolverResult::argument)
      .def_readonly("iterations", &SolverResult::iterations)
      .def_readonly("converged", &SolverResult::converged)
      .def_readonly("test_channel", &SolverResult::test_channel);

  py::class_<AdditiveStructure>(m, "AdditiveStructure")
      .def_static("from_group", &AdditiveStructure::from_group)
      .def_static("quadratic_line_grid", &AdditiveStructure::quadratic_line_grid)
      .def_static("quadratic_cyclic_grid", &AdditiveStructure::quadratic_cyclic_grid)
      .def_readonly("q", &AdditiveStructure::q)
      .def_readonly("cost", &AdditiveStructure::cost)
      .def("out_size", &AdditiveStructure::out_size)
      .def("discrete_gaussian", &AdditiveStructure::discrete_gaussian)
      .def("gaussian_with_cost", &AdditiveStructure::gaussian_with_cost);

  m.def("entropy", py::overload_cast<const Pmf&>(&entropy));
  m.def("mutual_information", &mutual_information);
  m.def("channel_capacity", &channel_capacity, py::arg("channel"),
        py::arg("config") = SolverConfig{});
  m.def("rate_distortion", &rate_distortion, py::arg("source"), py::arg("distortion"),
        py::arg("D"), py::arg("config") = SolverConfig{});
  m.def("distortion_rate", &distortion_rate, py::arg("source"), py::arg("distortion"),
        py::arg("R"), py::arg("config") = SolverConfig{});
  m.def("constrained_additive_capacity", &constrained_additive_capacity, py::arg("noise"),
        py::arg("structure"), py::arg("D"), py::arg("config") = SolverConfig{});
  m.def("worst_noise_capacity", &worst_noise_capacity, py::arg("structure"), py::arg("D"),
        py::arg("config") = SolverConfig{});

  py::class_<NetworkSpec>(m, "NetworkSpec")
      .def_static("from_json", &spec_from_json_str)
      .def_readonly("node_count", &NetworkSpec::node_count)
      .def_readonly("kappa", &NetworkSpec::kappa)
      .def("validate", &NetworkSpec::validate)
      .def("source_marginal", &NetworkSpec::source_marginal);

  py::class_<CapacityPolytope>(m, "CapacityPolytope")
      .def(py::init<>())
      .def_readwrite("dim", &CapacityPolytope::dim)
      .def_readwrite("A", &CapacityPolytope::A)
      .def_readwrite("b", &CapacityPolytope::b)
      .def("validate", &CapacityPolytope::validate)
      .def("contains", &CapacityPolytope::contains, py::arg("r"), py::arg("tol") = 1e-9);

  py::class_<FeasibilityVerdict>(m, "FeasibilityVerdict")
      .def_readonly("feasible", &FeasibilityVerdict::feasible)
      .def_readonly("witness", &FeasibilityVerdict::witness)
      .def_readonly("required_rates", &FeasibilityVerdict::required_rates);

  m.def("edge_capacities", &edge_capacities, py::arg("spec"),
        py::arg("config") = SolverConfig{});
  m.def("min_cut_bound", &min_cut_bound, py::arg("spec"), py::arg("source_node"),
        py::arg("sink_node"), py::arg("config") = SolverConfig{});
  m.def("separation_feasible_unicast", &separation_feasible_unicast, py::arg("spec"),
        py::arg("region"), py::arg("D"), py::arg("config") = SolverConfig{});
  m.def("separation_frontier_point_to_point", &separation_frontier_point_to_point,
        py::arg("source"), py::arg("distortion"), py::arg("channel"), py::arg("kappa"),
        py::arg("config") = SolverConfig{});

  py::class_<DistortionMatrix>(m, "DistortionMatrix")
      .def(py::init<std::size_t, std::size_t>())
      .def_readwrite("d", &DistortionMatrix::d)
      .def("at", py::overload_cast<std::size_t, std::size_t>(&DistortionMatrix::at, py::const_))
      .def("set",
           [](DistortionMatrix& m, std::size_t s, std::size_t n, double v) { m.at(s, n) = v; });

  py::class_<OrderVector>(m, "OrderVector")
      .def_readonly("orders", &OrderVector::orders)
      .def("slots", &OrderVector::slots)
      .def("depth", &OrderVector::depth)
      .def("fanout", &OrderVector::fanout);

  py::class_<AuxChain>(m, "AuxChain")
      .def_readonly("v_laws", &AuxChain::v_laws)
      .def_readonly("u_laws", &AuxChain::u_laws)
      .def_readonly("expected_distortions", &AuxChain::expected_distortions);

  py::class_<GenieRateMatrix>(m, "GenieRateMatrix")
      .def_readonly("source_count", &GenieRateMatrix::source_count)
      .def_readonly("node_count", &GenieRateMatrix::node_count)
      .def_readonly("r", &GenieRateMatrix::r)
      .def("at", py::overload_cast<std::size_t, std::size_t>(&GenieRateMatrix::at, py::const_))
      .def("defined", &GenieRateMatrix::defined);

  m.def("induce_orders", &induce_orders);
  m.def("build_aux_chain", &build_aux_chain);
  m.def("genie_rate_matrix", &genie_rate_matrix, py::arg("D"), py::arg("orders"),
        py::arg("chains"), py::arg("structures"), py::arg("config") = SolverConfig{});
  m.def("quadratic_genie_rate_matrix", &quadratic_genie_rate_matrix);
  m.def("aggregate_throughput", &aggregate_throughput);
  m.def("dms_rates", &dms_rates, py::arg("source"), py::arg("chain"), py::arg("structure"),
        py::arg("D_row"), py::arg("config") = SolverConfig{});
  m.def("verify_rate_loss_bounds", &verify_rate_loss_bounds, py::arg("source"),
        py::arg("recon_channels"), py::arg("recon_budgets"), py::arg("chain"),
        py::arg("structure"), py::arg("distortion"), py::arg("config") = SolverConfig{});

  py::class_<BaseJointCode>(m, "BaseJointCode")
      .def_static("identity_for", &BaseJointCode::identity_for)
      .def_readonly("m", &BaseJointCode::m)
      .def_readonly("n", &BaseJointCode::n);

  py::class_<SimReport>(m, "SimReport")
      .def_readonly("trials", &SimReport::trials)
      .def_readonly("e1", &SimReport::e1)
      .def_readonly("e2", &SimReport::e2)
      .def_readonly("e3", &SimReport::e3)
      .def_readonly("distortions", &SimReport::distortions)
      .def_readonly("mean_tv", &SimReport::mean_tv)
      .def_readonly("error_rate", &SimReport::error_rate)
      .def_readonly("rates", &SimReport::rates)
      .def("to_csv", &SimReport::to_csv)
      .def("to_json", &report_to_json_str);

  m.def("channel_simulation_experiment", &channel_simulation_experiment, py::arg("channel"),
        py::arg("input_law"), py::arg("n_prime"), py::arg("delta"), py::arg("rate_margin"),
        py::arg("trials"), py::arg("rng"));
  m.def("dnjscc_separation_experiment", &dnjscc_separation_experiment, py::arg("spec"),
        py::arg("base"), py::arg("n_prime"), py::arg("delta"), py::arg("trials"),
        py::arg("rng"), py::arg("config") = SolverConfig{});
  m.def("jscmud_superchannel_experiment", &jscmud_superchannel_experiment, py::arg("spec"),
        py::arg("base"), py::arg("target_D"), py::arg("epsilon"), py::arg("delta"),
        py::arg("n_prime"), py::arg("trials"), py::arg("rng"),
        py::arg("config") = SolverConfig{});
  m.def("separation_baseline_experiment", &separation_baseline_experiment, py::arg("source"),
        py::arg("distortion"), py::arg("channel"), py::arg("kappa"), py::arg("target_D"),
        py::arg("delta"), py::arg("n"), py::arg("trials"), py::arg("rng"),
        py::arg("config") = SolverConfig{});
}
