#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "costrain/outcomes.hpp"
#include "costrain/reduction.hpp"
#include "costrain/run.hpp"
#include "costrain/scenario.hpp"

namespace py = pybind11;
using namespace costrain;

namespace {

TraitMask mask_from_dims(const std::vector<int>& dims) { return TraitMask::from_dims(dims); }

RunArtifacts run_dispatch(const std::string& subcommand, const Scenario& sc) {
  if (subcommand == "simulate-full") return run_simulate_full(sc);
  if (subcommand == "simulate-reduced") return run_simulate_reduced(sc);
  if (subcommand == "compare") return run_compare(sc);
  if (subcommand == "classify") return run_classify(sc);
  if (subcommand == "scaling") return run_scaling(sc);
  throw ValidationError("unknown subcommand '" + subcommand + "'");
}

}  // namespace

PYBIND11_MODULE(_costrain, m) {
  m.doc() = "N-strain SIS coinfection dynamics: full compartmental system, replicator "
            "reduction, invasion-fitness analysis";
  m.attr("__version__") = kToolVersion;

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<NeutralParameters>(m, "NeutralParameters")
      .def(py::init<>())
      .def(py::init([](double beta, double gamma, double r, double k) {
             NeutralParameters p{beta, gamma, r, k};
             p.validate();
             return p;
           }),
           py::arg("beta"), py::arg("gamma"), py::arg("r"), py::arg("k"))
      .def_readwrite("beta", &NeutralParameters::beta)
      .def_readwrite("gamma", &NeutralParameters::gamma)
      .def_readwrite("r", &NeutralParameters::r)
      .def_readwrite("k", &NeutralParameters::k)
      .def_property_readonly("m", &NeutralParameters::m)
      .def_property_readonly("r0", &NeutralParameters::r0);

  py::class_<TraitPerturbations>(m, "TraitPerturbations")
      .def_static("zeros", &TraitPerturbations::zeros, py::arg("n"))
      .def_readwrite("n", &TraitPerturbations::n)
      .def_readwrite("b", &TraitPerturbations::b)
      .def_readwrite("nu", &TraitPerturbations::nu)
      .def_readwrite("u", &TraitPerturbations::u)
      .def_readwrite("omega", &TraitPerturbations::omega)
      .def_readwrite("alpha", &TraitPerturbations::alpha)
      .def_property(
          "mask", [](const TraitPerturbations& p) { return p.mask.dims(); },
          [](TraitPerturbations& p, const std::vector<int>& dims) {
            p.mask = mask_from_dims(dims);
          });

  py::class_<StrainParameters>(m, "StrainParameters")
      .def_readonly("beta", &StrainParameters::beta)
      .def_readonly("gamma", &StrainParameters::gamma)
      .def_readonly("gamma_pair", &StrainParameters::gamma_pair)
      .def_readonly("p_first", &StrainParameters::p_first)
      .def_readonly("k_pair", &StrainParameters::k_pair)
      .def_readonly("epsilon", &StrainParameters::epsilon);

  py::class_<NeutralEquilibrium>(m, "NeutralEquilibrium")
      .def_readonly("s_star", &NeutralEquilibrium::s_star)
      .def_readonly("t_star", &NeutralEquilibrium::t_star)
      .def_readonly("i_star", &NeutralEquilibrium::i_star)
      .def_readonly("d_star", &NeutralEquilibrium::d_star)
      .def_readonly("mu", &NeutralEquilibrium::mu)
      .def_readonly("xi", &NeutralEquilibrium::xi)
      .def_readonly("det_p", &NeutralEquilibrium::det_p)
      .def_readonly("theta_raw", &NeutralEquilibrium::theta_raw)
      .def_readonly("theta_total", &NeutralEquilibrium::theta_total)
      .def_readonly("theta_norm", &NeutralEquilibrium::theta_norm)
      .def_property_readonly("mask",
                             [](const NeutralEquilibrium& e) { return e.mask.dims(); });

  py::class_<FullState>(m, "FullState")
      .def_static("zero", &FullState::zero, py::arg("n"))
      .def_readwrite("s", &FullState::s)
      .def_readwrite("i_single", &FullState::i_single)
      .def_readwrite("i_double", &FullState::i_double)
      .def_property_readonly("n", &FullState::n)
      .def("total_mass", &FullState::total_mass);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("times", &Trajectory::times)
      .def_readonly("states", &Trajectory::states);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("rtol", &SolverConfig::rtol)
      .def_readwrite("atol", &SolverConfig::atol)
      .def_readwrite("max_step", &SolverConfig::max_step)
      .def_readwrite("samples", &SolverConfig::samples);

  py::class_<InvasionFitnessMatrix>(m, "InvasionFitnessMatrix")
      .def_readonly("n", &InvasionFitnessMatrix::n)
      .def_readonly("lambda_", &InvasionFitnessMatrix::lambda)
      .def_property_readonly("mask",
                             [](const InvasionFitnessMatrix& l) { return l.mask.dims(); });

  py::class_<ReplicatorTrajectory>(m, "ReplicatorTrajectory")
      .def_readonly("taus", &ReplicatorTrajectory::taus)
      .def_readonly("zs", &ReplicatorTrajectory::zs)
      .def_readonly("max_drift", &ReplicatorTrajectory::max_drift);

  py::enum_<PairwiseOutcome>(m, "PairwiseOutcome")
      .value("Coexistence", PairwiseOutcome::Coexistence)
      .value("ExclusionOf1", PairwiseOutcome::ExclusionOf1)
      .value("ExclusionOf2", PairwiseOutcome::ExclusionOf2)
      .value("Bistability", PairwiseOutcome::Bistability);

  py::enum_<LimitKind>(m, "LimitKind")
      .value("FixedPoint", LimitKind::FixedPoint)
      .value("Cycle", LimitKind::Cycle)
      .value("Undetermined", LimitKind::Undetermined);

  py::class_<OutcomeReport>(m, "OutcomeReport")
      .def_readonly("persistent_set", &OutcomeReport::persistent_set)
      .def_readonly("limit_kind", &OutcomeReport::limit_kind)
      .def_readonly("final_frequencies", &OutcomeReport::final_frequencies)
      .def_readonly("diagnostics", &OutcomeReport::diagnostics);

  py::class_<SlowProjection>(m, "SlowProjection")
      .def_readonly("z_raw", &SlowProjection::z_raw)
      .def_readonly("z", &SlowProjection::z)
      .def_readonly("v", &SlowProjection::v)
      .def_readonly("x_dev", &SlowProjection::x_dev)
      .def_readonly("y_dev", &SlowProjection::y_dev);

  py::class_<ScalingReport>(m, "ScalingReport")
      .def_readonly("epsilons", &ScalingReport::epsilons)
      .def_readonly("errors", &ScalingReport::errors)
      .def_readonly("fitted_slope", &ScalingReport::fitted_slope)
      .def_readonly("residuals", &ScalingReport::residuals)
      .def_readonly("degenerate", &ScalingReport::degenerate);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readonly("neutral", &Scenario::neutral)
      .def_readonly("perturbations", &Scenario::perturbations)
      .def_readonly("epsilon", &Scenario::epsilon)
      .def_readonly("t_end", &Scenario::t_end)
      .def_readonly("tau_end", &Scenario::tau_end);

  m.def(
      "neutral_equilibrium",
      [](const NeutralParameters& p, const std::vector<int>& mask) {
        return neutral_equilibrium(p, mask_from_dims(mask));
      },
      py::arg("params"), py::arg("mask"));
  m.def("realize_traits", &realize_traits, py::arg("params"), py::arg("pert"),
        py::arg("epsilon"));
  m.def("basic_reproduction_numbers", &basic_reproduction_numbers, py::arg("sp"),
        py::arg("params"));

  m.def("force_of_infection", &force_of_infection, py::arg("state"), py::arg("sp"));
  m.def("full_rhs", &full_rhs, py::arg("state"), py::arg("sp"), py::arg("params"));
  m.def("neutral_scalar_observables", &neutral_scalar_observables, py::arg("state"));
  m.def("integrate_full", &integrate_full, py::arg("state0"), py::arg("sp"), py::arg("params"),
        py::arg("t_end"), py::arg("cfg") = SolverConfig{});
  m.def("slow_manifold_state", &slow_manifold_state, py::arg("z"), py::arg("params"),
        py::arg("eq"));

  m.def("invasion_fitness", &invasion_fitness, py::arg("pert"), py::arg("eq"));
  m.def(
      "replicator_rhs",
      [](const Eigen::VectorXd& z, const InvasionFitnessMatrix& lam, double theta_total) {
        return replicator_rhs(SimplexState(z), lam, theta_total);
      },
      py::arg("z"), py::arg("lam"), py::arg("theta_total"));
  m.def(
      "integrate_replicator",
      [](const Eigen::VectorXd& z0, const InvasionFitnessMatrix& lam, double theta_total,
         double tau_end, const SolverConfig& cfg) {
        return integrate_replicator(SimplexState(z0), lam, theta_total, tau_end, cfg);
      },
      py::arg("z0"), py::arg("lam"), py::arg("theta_total"), py::arg("tau_end"),
      py::arg("cfg") = SolverConfig{});
  m.def(
      "per_trait_slow_rhs",
      [](const Eigen::VectorXd& z, const TraitPerturbations& pert, const NeutralEquilibrium& eq,
         int trait) { return per_trait_slow_rhs(SimplexState(z), pert, eq, trait); },
      py::arg("z"), py::arg("pert"), py::arg("eq"), py::arg("trait"));

  m.def("classify_pair", &classify_pair, py::arg("l12"), py::arg("l21"));
  m.def("surviving_strain", &surviving_strain, py::arg("outcome"));
  m.def("predict_exclusion_winner", &predict_exclusion_winner, py::arg("pert"), py::arg("eq"));
  m.def(
      "symmetric_lyapunov",
      [](const Eigen::VectorXd& z, const Eigen::MatrixXd& u) {
        return symmetric_lyapunov(SimplexState(z), u);
      },
      py::arg("z"), py::arg("u"));
  m.def("detect_persistent_set", &detect_persistent_set, py::arg("traj"), py::arg("threshold"),
        py::arg("window"), py::arg("amplitude_tol") = 1e-3);

  m.def("project_slow", &project_slow, py::arg("state"), py::arg("sp"), py::arg("eq"));
  m.def("co_clearance_load", &co_clearance_load, py::arg("state"), py::arg("u"));
  m.def("reduction_error", &reduction_error, py::arg("full"), py::arg("reduced"), py::arg("eq"),
        py::arg("params"), py::arg("epsilon"), py::arg("tau_grid"));
  m.def(
      "epsilon_scaling_study",
      [](const NeutralParameters& params, const TraitPerturbations& pert,
         const Eigen::VectorXd& z0, std::vector<double> epsilons, double tau_end, int threads) {
        ScalingSetup ss;
        ss.params = params;
        ss.pert = pert;
        ss.z0 = z0;
        ss.tau_end = tau_end;
        return epsilon_scaling_study(ss, std::move(epsilons), threads);
      },
      py::arg("params"), py::arg("pert"), py::arg("z0"), py::arg("epsilons"),
      py::arg("tau_end") = 50.0, py::arg("threads") = 1);

  m.def(
      "load_scenario",
      [](const std::string& path) { return load_scenario(path); },
      py::arg("path"));
  m.def(
      "run_report_json",
      [](const std::string& subcommand, const std::string& scenario_path) {
        return run_dispatch(subcommand, load_scenario(scenario_path)).report.dump();
      },
      py::arg("subcommand"), py::arg("scenario_path"),
      "Runs a subcommand on a scenario file and returns the JSON report text.");
  m.def(
      "run_to_files",
      [](const std::string& subcommand, const std::string& scenario_path,
         const std::string& out_dir, const std::string& format) {
        const Scenario sc = load_scenario(scenario_path);
        return write_artifacts(run_dispatch(subcommand, sc), out_dir, format,
                               sc.name + "_" + subcommand);
      },
      py::arg("subcommand"), py::arg("scenario_path"), py::arg("out_dir"),
      py::arg("format") = "both");
}
