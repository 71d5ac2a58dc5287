#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "brickshadows/brickwork.hpp"
#include "brickshadows/channel.hpp"
#include "brickshadows/inverse.hpp"
#include "brickshadows/markov.hpp"
#include "brickshadows/norms.hpp"
#include "brickshadows/shadows.hpp"

namespace py = pybind11;
using namespace brickshadows;

PYBIND11_MODULE(_brickshadows, m) {
  m.doc() = "Shallow-circuit classical shadows: brickwork measurement channels as tensor "
            "networks, heralded channel inversion, and shadow-norm driven estimation";

  m.attr("DEPTH_INFINITE") = kDepthInfinite;
  m.attr("MAX_TAU_DEPTH") = kMaxTauDepth;

  py::class_<PauliString>(m, "PauliString")
      .def(py::init<int>(), py::arg("n") = 0)
      .def_static("parse", &PauliString::parse, py::arg("text"))
      .def_static("from_label_key", &PauliString::from_label_key, py::arg("key"), py::arg("n"))
      .def("__str__", &PauliString::str)
      .def("__repr__", [](const PauliString& p) { return "PauliString('" + p.str() + "')"; })
      .def_property_readonly("n", &PauliString::num_qubits)
      .def("label", &PauliString::label, py::arg("q"))
      .def("set_label", &PauliString::set_label, py::arg("q"), py::arg("g"))
      .def("label_key", &PauliString::label_key)
      .def("weight", &PauliString::weight)
      .def("support_extent", &PauliString::support_extent)
      .def("sign", &PauliString::sign)
      .def("commutes_with", &PauliString::commutes_with, py::arg("other"))
      .def("times", &PauliString::times, py::arg("other"));

  py::class_<PeriodicMPS>(m, "PeriodicMPS")
      .def_property_readonly("num_sites", &PeriodicMPS::num_sites)
      .def("phys_dim", &PeriodicMPS::phys_dim, py::arg("site"))
      .def("max_bond", &PeriodicMPS::max_bond)
      .def("evaluate",
           [](const PeriodicMPS& mps, const std::vector<int>& idx) {
             return mps.evaluate(std::span<const int>(idx));
           },
           py::arg("index"))
      .def("sum_all", &PeriodicMPS::sum_all)
      .def("frobenius_sq", &PeriodicMPS::frobenius_sq)
      .def("to_json", &PeriodicMPS::to_json)
      .def_static("from_json", &PeriodicMPS::from_json, py::arg("text"));

  py::class_<EigenvalueMPS>(m, "EigenvalueMPS")
      .def_property_readonly("n", &EigenvalueMPS::num_qubits)
      .def_property_readonly("d", &EigenvalueMPS::depth)
      .def_property_readonly("inner", &EigenvalueMPS::inner)
      .def("value", &EigenvalueMPS::value, py::arg("pauli"))
      .def("value_on_signature", &EigenvalueMPS::value_on_signature, py::arg("signature"));

  py::class_<PairEigenvalueMPS>(m, "PairEigenvalueMPS")
      .def_property_readonly("n", &PairEigenvalueMPS::num_qubits)
      .def_property_readonly("d", &PairEigenvalueMPS::depth)
      .def("bond_dim", &PairEigenvalueMPS::bond_dim)
      .def("value", &PairEigenvalueMPS::value, py::arg("a"), py::arg("b"))
      .def("to_qubit_mps", &PairEigenvalueMPS::to_qubit_mps);

  m.def("build_t_mps", &build_t_mps, py::arg("n"), py::arg("d"));
  m.def("t_value", &t_value, py::arg("pauli"), py::arg("d"), py::arg("mps") = nullptr);
  m.def("build_tau_mps", &build_tau_mps, py::arg("n"), py::arg("d"));
  m.def("tau_value", &tau_value, py::arg("a"), py::arg("b"), py::arg("d"),
        py::arg("mps") = nullptr);
  m.def("lift_to_pauli_mps", &lift_to_pauli_mps, py::arg("signature_mps"), py::arg("n"));
  m.def("lift_depth0", &lift_depth0, py::arg("n"), py::arg("inverse"));
  m.def("lift_depth_infinite", &lift_depth_infinite, py::arg("n"), py::arg("inverse"));
  m.def("apply_channel", &apply_channel, py::arg("alpha"), py::arg("t"),
        py::arg("invert") = false, py::arg("inverse_sig") = nullptr);

  m.def("monte_carlo_t",
        [](const PauliString& p, int d, uint64_t seed, int shots, uint64_t shot_offset) {
          return monte_carlo_t(p, {p.num_qubits(), d, seed}, shots, shot_offset);
        },
        py::arg("pauli"), py::arg("d"), py::arg("seed"), py::arg("shots"),
        py::arg("shot_offset") = 0);

  m.def("dense_eigenvalues",
        [](int n, int d) {
          Eigen::VectorXd v = DenseMarkovOracle::all_eigenvalues(n, d);
          return std::vector<double>(v.data(), v.data() + v.size());
        },
        py::arg("n"), py::arg("d"));
  m.def("config_hash_of", &config_hash_of, py::arg("text"));

  py::class_<InversionStage>(m, "InversionStage")
      .def(py::init([](int chi, int sweeps) { return InversionStage{chi, sweeps}; }),
           py::arg("chi") = 2, py::arg("sweeps") = 200)
      .def_readwrite("chi", &InversionStage::chi)
      .def_readwrite("sweeps", &InversionStage::sweeps);

  py::enum_<Regularization>(m, "Regularization")
      .value("NONE", Regularization::kNone)
      .value("TRANSLATIONAL", Regularization::kTranslational)
      .value("NORM", Regularization::kNorm);

  py::class_<InversionConfig>(m, "InversionConfig")
      .def(py::init<>())
      .def_readwrite("stages", &InversionConfig::stages)
      .def_readwrite("stop_cost", &InversionConfig::stop_cost)
      .def_readwrite("reg", &InversionConfig::reg)
      .def_readwrite("alpha", &InversionConfig::alpha)
      .def_readwrite("seed", &InversionConfig::seed);

  py::class_<InversionResult>(m, "InversionResult")
      .def_readonly("inverse", &InversionResult::inverse)
      .def_readonly("n", &InversionResult::n)
      .def_readonly("d", &InversionResult::d)
      .def_readonly("chi", &InversionResult::chi)
      .def_readonly("final_cost", &InversionResult::final_cost)
      .def_readonly("herald_epsilon", &InversionResult::herald_epsilon)
      .def_readonly("converged", &InversionResult::converged)
      .def_readonly("sweeps_used", &InversionResult::sweeps_used)
      .def_readonly("cancellation_scale", &InversionResult::cancellation_scale)
      .def_readonly("cost_history", &InversionResult::cost_history)
      .def("to_json", &InversionResult::to_json)
      .def_static("from_json", &InversionResult::from_json, py::arg("text"));

  m.def("invert", py::overload_cast<const EigenvalueMPS&, const InversionConfig&>(&invert),
        py::arg("t"), py::arg("config") = InversionConfig{});
  m.def("invert_mps", py::overload_cast<const PeriodicMPS&, const InversionConfig&>(&invert),
        py::arg("m"), py::arg("config") = InversionConfig{});

  py::class_<StabilizerState>(m, "StabilizerState")
      .def_readonly("n", &StabilizerState::n)
      .def_readonly("generators", &StabilizerState::generators)
      .def_static("zero", &StabilizerState::zero, py::arg("n"))
      .def_static("ghz", &StabilizerState::ghz, py::arg("n"))
      .def_static("from_generators", &StabilizerState::from_generators, py::arg("generators"));

  py::class_<Snapshot>(m, "Snapshot")
      .def(py::init<>())
      .def_readwrite("seed", &Snapshot::seed)
      .def_readwrite("stream", &Snapshot::stream)
      .def_readwrite("n", &Snapshot::n)
      .def_readwrite("d", &Snapshot::d)
      .def_readwrite("bits", &Snapshot::bits)
      .def_readwrite("explicit_gates", &Snapshot::explicit_gates)
      .def("to_json_line", &Snapshot::to_json_line)
      .def_static("from_json_line", &Snapshot::from_json_line, py::arg("line"));

  m.def("acquire", &acquire, py::arg("state"), py::arg("d"), py::arg("seed"), py::arg("count"),
        py::arg("first_stream") = 0);
  m.def("snapshots_to_jsonl", [](const std::vector<Snapshot>& snaps) {
    std::ostringstream os;
    write_snapshots(os, snaps);
    return os.str();
  });
  m.def("snapshots_from_jsonl", [](const std::string& text) {
    std::istringstream is(text);
    return read_snapshots(is);
  });
  m.def("snapshot_pauli_value", &snapshot_pauli_value, py::arg("snapshot"), py::arg("pauli"));
  m.def("snapshot_to_pauli_mps", &snapshot_to_pauli_mps, py::arg("snapshot"));

  py::class_<SparseObservable>(m, "SparseObservable")
      .def(py::init<int>(), py::arg("n") = 0)
      .def_readonly("n", &SparseObservable::n)
      .def_readonly("paulis", &SparseObservable::paulis)
      .def_readonly("coeffs", &SparseObservable::coeffs)
      .def("add", &SparseObservable::add, py::arg("pauli"), py::arg("coeff"))
      .def("size", &SparseObservable::size)
      .def("infinity_norm_bound", &SparseObservable::infinity_norm_bound);

  m.def("ghz_projector_terms", &ghz_projector_terms, py::arg("n"));
  m.def("cluster_hamiltonian", &cluster_hamiltonian, py::arg("n"));
  m.def("ghz_projector_mps", &ghz_projector_mps, py::arg("n"));
  m.def("sparse_to_mps", &sparse_to_mps, py::arg("observable"));
  m.def("median_of_means", &median_of_means, py::arg("values"), py::arg("blocks"));

  py::class_<EstimationResult>(m, "EstimationResult")
      .def_readonly("estimate", &EstimationResult::estimate)
      .def_readonly("block_means", &EstimationResult::block_means)
      .def_readonly("herald_epsilon", &EstimationResult::herald_epsilon)
      .def_readwrite("variance_bound", &EstimationResult::variance_bound)
      .def_readonly("empirical_variance", &EstimationResult::empirical_variance)
      .def_readonly("config_hash", &EstimationResult::config_hash)
      .def("to_json", &EstimationResult::to_json);

  py::enum_<InverseSide>(m, "InverseSide")
      .value("AUTO", InverseSide::kAuto)
      .value("OBSERVABLE", InverseSide::kObservable)
      .value("SNAPSHOT", InverseSide::kSnapshot);

  m.def("estimate_sparse", &estimate_sparse, py::arg("observable"), py::arg("snapshots"),
        py::arg("t") = nullptr, py::arg("blocks") = 1);
  m.def("estimate_shallow", &estimate_shallow, py::arg("observable"), py::arg("snapshots"),
        py::arg("inverse_lifted"), py::arg("herald_epsilon"), py::arg("blocks") = 1,
        py::arg("side") = InverseSide::kAuto);

  m.def("pauli_norm_sq", &pauli_norm_sq, py::arg("pauli"), py::arg("d"), py::arg("t") = nullptr);
  m.def("ls_norm_sq",
        py::overload_cast<const SparseObservable&, int, const EigenvalueMPS*>(&ls_norm_sq),
        py::arg("observable"), py::arg("d"), py::arg("t") = nullptr);
  m.def("ls_norm_sq_mps",
        py::overload_cast<const PeriodicMPS&, const PeriodicMPS&>(&ls_norm_sq),
        py::arg("observable"), py::arg("inverse_lifted"));
  m.def("sparse_norm_bound_sq", &sparse_norm_bound_sq, py::arg("observable"), py::arg("d"),
        py::arg("t") = nullptr);
  m.def("stabilizer_expectation", &stabilizer_expectation, py::arg("state"), py::arg("pauli"));
  m.def("state_dep_norm_sq_exact", &state_dep_norm_sq_exact, py::arg("observable"),
        py::arg("sigma"), py::arg("d"));

  py::class_<MonteCarloNorm>(m, "MonteCarloNorm")
      .def_readonly("mean", &MonteCarloNorm::mean)
      .def_readonly("std_error", &MonteCarloNorm::std_error)
      .def_readonly("shots", &MonteCarloNorm::shots);
  m.def("mc_state_dep_norm_sq", &mc_state_dep_norm_sq, py::arg("observable"), py::arg("sigma"),
        py::arg("d"), py::arg("seed"), py::arg("shots"), py::arg("t") = nullptr);
  m.def("stabilizer_projector_norm_sq", &stabilizer_projector_norm_sq, py::arg("generators"),
        py::arg("d"), py::arg("t") = nullptr, py::arg("tau") = nullptr);

  py::class_<FrobeniusBound>(m, "FrobeniusBound")
      .def_readonly("ls_sq", &FrobeniusBound::ls_sq)
      .def_readonly("diag_sq", &FrobeniusBound::diag_sq)
      .def_readonly("cross_frob_sq", &FrobeniusBound::cross_frob_sq)
      .def_readonly("bound_sq", &FrobeniusBound::bound_sq);
  m.def("frobenius_norm_bound", &frobenius_norm_bound, py::arg("observable"),
        py::arg("inverse_lifted"), py::arg("d"));

  m.def("eigenvalue_lower_bound", &eigenvalue_lower_bound, py::arg("n"), py::arg("d"),
        py::arg("support_extent"), py::arg("alpha"), py::arg("c"));
  m.def("eigenvalue_bound_min_depth", &eigenvalue_bound_min_depth, py::arg("n"), py::arg("alpha"),
        py::arg("c"));
}
