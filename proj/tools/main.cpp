#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "brickshadows/channel.hpp"
#include "brickshadows/inverse.hpp"
#include "brickshadows/norms.hpp"
#include "brickshadows/shadows.hpp"

using namespace brickshadows;

namespace {

int parse_depth(const std::string& text) {
  if (text == "inf" || text == "infinite") return kDepthInfinite;
  size_t used = 0;
  int d = -1;
  try {
    d = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || d < 0) throw std::runtime_error("bad depth '" + text + "'");
  return d;
}

std::string depth_text(int d) { return d == kDepthInfinite ? "inf" : std::to_string(d); }

// "0,1,2" or "1:6" (inclusive range); entries may be inf
std::vector<int> parse_depth_list(const std::string& text) {
  std::vector<int> out;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const int lo = parse_depth(text.substr(0, colon));
    const int hi = parse_depth(text.substr(colon + 1));
    if (lo == kDepthInfinite || hi == kDepthInfinite || hi < lo)
      throw std::runtime_error("bad depth range '" + text + "'");
    for (int d = lo; d <= hi; ++d) out.push_back(d);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_depth(item));
  if (out.empty()) throw std::runtime_error("empty depth list");
  return out;
}

std::vector<InversionStage> parse_stages(const std::string& text) {
  std::vector<InversionStage> stages;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    InversionStage st;
    const auto colon = item.find(':');
    try {
      st.chi = std::stoi(item.substr(0, colon));
      if (colon != std::string::npos) st.sweeps = std::stoi(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw std::runtime_error("bad stage '" + item + "', want chi or chi:sweeps");
    }
    if (st.chi < 1 || st.sweeps < 1) throw std::runtime_error("bad stage '" + item + "'");
    stages.push_back(st);
  }
  if (stages.empty()) throw std::runtime_error("empty stage list");
  return stages;
}

std::filesystem::path cache_dir() {
  const char* env = std::getenv("BRICKSHADOWS_CACHE_DIR");
  if (env == nullptr || *env == '\0') return {};
  return std::filesystem::path(env);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

// empty path means stdout
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    write_text(path, text);
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// named observables or a JSON file {"n":..., "terms":[{"pauli":"XZIY","coeff":...}]}
SparseObservable load_observable(const std::string& spec, int n) {
  if (spec == "ghz-projector") return ghz_projector_terms(n);
  if (spec == "cluster-hamiltonian") return cluster_hamiltonian(n);
  const nlohmann::json j = nlohmann::json::parse(slurp(spec));
  const int jn = j.at("n").get<int>();
  if (n != 0 && jn != n) throw std::runtime_error("observable file is for n=" + std::to_string(jn));
  SparseObservable obs(jn);
  for (const auto& term : j.at("terms"))
    obs.add(PauliString::parse(term.at("pauli").get<std::string>()), term.at("coeff").get<double>());
  if (obs.size() == 0) throw std::runtime_error("observable file has no terms");
  return obs;
}

// "ghz", "zero", or a JSON file {"generators":["XXXX","-ZZII",...]}
StabilizerState load_state(const std::string& spec, int n) {
  if (spec == "ghz") return StabilizerState::ghz(n);
  if (spec == "zero") return StabilizerState::zero(n);
  const nlohmann::json j = nlohmann::json::parse(slurp(spec));
  std::vector<PauliString> gens;
  for (const auto& g : j.at("generators")) gens.push_back(PauliString::parse(g.get<std::string>()));
  return StabilizerState::from_generators(std::move(gens));
}

std::vector<PauliString> parse_generator_list(const std::string& text) {
  std::vector<PauliString> gens;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) gens.push_back(PauliString::parse(item));
  if (gens.empty()) throw std::runtime_error("empty generator list");
  return gens;
}

// variational inverse with on-disk reuse keyed by (n, d, final chi)
InversionResult obtain_inverse(int n, int d, const std::vector<InversionStage>& stages,
                               uint64_t seed, double stop_cost, bool refresh,
                               std::string* cache_file = nullptr) {
  const int chi = stages.back().chi;
  std::filesystem::path file;
  const auto dir = cache_dir();
  if (!dir.empty()) {
    file = dir / ("inverse-n" + std::to_string(n) + "-d" + std::to_string(d) + "-chi" +
                  std::to_string(chi) + ".json");
    if (cache_file) *cache_file = file.string();
    if (!refresh && std::filesystem::exists(file)) {
      const InversionResult r = InversionResult::from_json(slurp(file.string()));
      if (r.n == n && r.d == d && r.chi == chi) return r;
    }
  }
  InversionConfig cfg;
  cfg.stages = stages;
  cfg.seed = seed;
  if (stop_cost > 0) cfg.stop_cost = stop_cost;
  const InversionResult r = invert(build_t_mps(n, d), cfg);
  if (!file.empty()) {
    std::filesystem::create_directories(dir);
    write_text(file.string(), r.to_json());
  }
  return r;
}

// lifted inverse (physical dimension 4 per qubit) for the contraction routes
PeriodicMPS lifted_inverse_for(int n, int d, const std::vector<InversionStage>& stages,
                               uint64_t seed, double stop_cost, bool refresh,
                               double* herald) {
  if (d == kDepthInfinite)
    throw std::runtime_error("the contraction route needs a finite depth; use --route sparse");
  if (d == 0) {
    *herald = 0.0;
    return lift_depth0(n, true);
  }
  const InversionResult ir = obtain_inverse(n, d, stages, seed, stop_cost, refresh, nullptr);
  *herald = ir.herald_epsilon;
  return lift_to_pauli_mps(ir.inverse, n);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"depth-modulated classical shadows on a brickwork ring"};
  app.set_config("--config", "", "read options from an INI/TOML config file");
  app.add_option_function<std::string>(
      "--cache-dir",
      [](const std::string& v) { setenv("BRICKSHADOWS_CACHE_DIR", v.c_str(), 1); },
      "override BRICKSHADOWS_CACHE_DIR for this run");
  app.require_subcommand(1);
  int rc = 0;

  // channel: eigenvalues t of the measurement channel
  auto* ch = app.add_subcommand("channel", "evaluate channel eigenvalues t at a depth");
  struct {
    int n = 0;
    std::string d = "1";
    std::vector<std::string> paulis;
    std::string save, out;
  } chv;
  ch->add_option("--n", chv.n, "qubit count (even)")->required();
  ch->add_option("--d", chv.d, "circuit depth: 0, 1, ... or inf");
  ch->add_option("--pauli", chv.paulis, "Pauli string(s) to evaluate, e.g. ZIIZ");
  ch->add_option("--save", chv.save, "persist the eigenvalue MPS as JSON (depth >= 1)");
  ch->add_option("--out", chv.out, "write results here instead of stdout");
  ch->callback([&] {
    const int d = parse_depth(chv.d);
    std::unique_ptr<EigenvalueMPS> t;
    if (d >= 1) t = std::make_unique<EigenvalueMPS>(build_t_mps(chv.n, d));
    if (chv.paulis.empty() && chv.save.empty())
      throw std::runtime_error("channel: nothing to do, give --pauli or --save");
    std::string lines;
    for (const auto& ptxt : chv.paulis) {
      const PauliString p = PauliString::parse(ptxt);
      if (p.num_qubits() != chv.n) throw std::runtime_error("pauli '" + ptxt + "' is not n letters");
      nlohmann::json j;
      j["pauli"] = ptxt;
      j["n"] = chv.n;
      j["d"] = depth_text(d);
      j["t"] = t_value(p, d, t.get());
      lines += j.dump() + "\n";
    }
    if (!chv.save.empty()) {
      if (!t) throw std::runtime_error("only depths >= 1 have an MPS to save");
      nlohmann::json j;
      j["kind"] = "eigenvalue-mps";
      j["n"] = chv.n;
      j["d"] = d;
      j["mps"] = nlohmann::json::parse(t->inner().to_json());
      write_text(chv.save, j.dump());
    }
    if (!lines.empty()) emit(chv.out, lines);
  });

  // tau: joint pair probabilities
  auto* ta = app.add_subcommand("tau", "evaluate a pair probability tau for two Paulis");
  struct {
    int n = 0;
    std::string d = "1", a, b, out;
  } tav;
  ta->add_option("--n", tav.n, "qubit count (even)")->required();
  ta->add_option("--d", tav.d, "circuit depth: 0 or 1.." + std::to_string(kMaxTauDepth));
  ta->add_option("--a", tav.a, "first Pauli string")->required();
  ta->add_option("--b", tav.b, "second Pauli string")->required();
  ta->add_option("--out", tav.out, "write the result here instead of stdout");
  ta->callback([&] {
    const int d = parse_depth(tav.d);
    const PauliString a = PauliString::parse(tav.a);
    const PauliString b = PauliString::parse(tav.b);
    if (a.num_qubits() != tav.n || b.num_qubits() != tav.n)
      throw std::runtime_error("Pauli strings must have n letters");
    std::unique_ptr<PairEigenvalueMPS> mps;
    if (d >= 1) mps = std::make_unique<PairEigenvalueMPS>(build_tau_mps(tav.n, d));
    nlohmann::json j;
    j["a"] = tav.a;
    j["b"] = tav.b;
    j["n"] = tav.n;
    j["d"] = depth_text(d);
    j["tau"] = tau_value(a, b, d, mps.get());
    emit(tav.out, j.dump());
  });

  // invert: variational channel inverse, persisted under the cache directory
  auto* iv = app.add_subcommand("invert", "fit the heralded MPS inverse of the channel");
  struct {
    int n = 0;
    std::string d = "1", stages = "2:200", out;
    uint64_t seed = 1;
    double stop_cost = 0.0;
    bool refresh = false;
  } ivv;
  iv->add_option("--n", ivv.n, "qubit count (even)")->required();
  iv->add_option("--d", ivv.d, "circuit depth (>= 1; depth 0 inverts in closed form)");
  iv->add_option("--stages", ivv.stages, "bond growth schedule chi:sweeps[,chi:sweeps...]");
  iv->add_option("--seed", ivv.seed, "optimizer seed");
  iv->add_option("--stop-cost", ivv.stop_cost, "finish once the residual cost drops below this");
  iv->add_flag("--refresh", ivv.refresh, "ignore any cached result");
  iv->add_option("--out", ivv.out, "also write the full inversion result JSON here");
  iv->callback([&] {
    const int d = parse_depth(ivv.d);
    if (d < 1) throw std::runtime_error("invert needs a finite depth >= 1");
    std::string cache_file;
    const InversionResult r = obtain_inverse(ivv.n, d, parse_stages(ivv.stages), ivv.seed,
                                             ivv.stop_cost, ivv.refresh, &cache_file);
    if (!ivv.out.empty()) write_text(ivv.out, r.to_json());
    nlohmann::json j;
    j["n"] = r.n;
    j["d"] = r.d;
    j["chi"] = r.chi;
    j["converged"] = r.converged;
    j["herald_epsilon"] = r.herald_epsilon;
    j["final_cost"] = r.final_cost;
    j["sweeps_used"] = r.sweeps_used;
    if (!cache_file.empty()) j["cache_file"] = cache_file;
    std::cout << j.dump() << "\n";
    if (!r.converged) rc = 3;
  });

  // sample: draw measurement records
  auto* sa = app.add_subcommand("sample", "draw snapshot records from a stabilizer state");
  struct {
    int n = 0, count = 1000;
    std::string d = "1", state = "ghz", out;
    uint64_t seed = 1, first_stream = 0;
  } sav;
  sa->add_option("--n", sav.n, "qubit count (even)")->required();
  sa->add_option("--d", sav.d, "circuit depth: 0, 1, ... or inf");
  sa->add_option("--state", sav.state, "ghz | zero | JSON file with stabilizer generators");
  sa->add_option("--count", sav.count, "number of records")->check(CLI::PositiveNumber);
  sa->add_option("--seed", sav.seed, "ensemble seed");
  sa->add_option("--first-stream", sav.first_stream, "stream id of the first record");
  sa->add_option("--out", sav.out, "records file (JSON lines); stdout when omitted");
  sa->callback([&] {
    const int d = parse_depth(sav.d);
    const StabilizerState st = load_state(sav.state, sav.n);
    const std::vector<Snapshot> snaps = acquire(st, d, sav.seed, sav.count, sav.first_stream);
    if (sav.out.empty()) {
      write_snapshots(std::cout, snaps);
    } else {
      std::ofstream out(sav.out);
      if (!out) throw std::runtime_error("cannot open " + sav.out + " for writing");
      write_snapshots(out, snaps);
    }
  });

  // estimate: expectation values from a records file
  auto* es = app.add_subcommand("estimate", "estimate tr(O rho) from recorded snapshots");
  struct {
    std::string records, observable, route = "auto", side = "auto", stages = "2:200", out;
    int blocks = 1;
    uint64_t seed = 1;
    double stop_cost = 0.0;
    bool refresh = false;
  } esv;
  es->add_option("--records", esv.records, "JSON-lines snapshot file")->required();
  es->add_option("--observable", esv.observable,
                 "ghz-projector | cluster-hamiltonian | JSON term file")
      ->required();
  es->add_option("--blocks", esv.blocks, "median-of-means block count")
      ->check(CLI::PositiveNumber);
  es->add_option("--route", esv.route, "sparse | mps | auto")
      ->check(CLI::IsMember({"sparse", "mps", "auto"}));
  es->add_option("--side", esv.side, "which factor absorbs the inverse on the mps route")
      ->check(CLI::IsMember({"auto", "observable", "snapshot"}));
  es->add_option("--stages", esv.stages, "inversion schedule for the mps route");
  es->add_option("--seed", esv.seed, "inversion seed for the mps route");
  es->add_option("--stop-cost", esv.stop_cost, "inversion stop threshold");
  es->add_flag("--refresh", esv.refresh, "refit the inverse even when cached");
  es->add_option("--out", esv.out, "report file; stdout when omitted");
  es->callback([&] {
    std::ifstream in(esv.records);
    if (!in) throw std::runtime_error("cannot open " + esv.records);
    const std::vector<Snapshot> snaps = read_snapshots(in);
    if (snaps.empty()) throw std::runtime_error("no records in " + esv.records);
    const int n = snaps.front().n;
    const int d = snaps.front().d;
    const SparseObservable obs = load_observable(esv.observable, n);

    std::string route = esv.route;
    if (route == "auto")
      route = (esv.observable == "ghz-projector" && n > 12) ? "mps" : "sparse";

    EstimationResult r;
    if (route == "sparse") {
      std::unique_ptr<EigenvalueMPS> t;
      if (d >= 1) t = std::make_unique<EigenvalueMPS>(build_t_mps(n, d));
      r = estimate_sparse(obs, snaps, t.get(), esv.blocks);
      r.variance_bound = sparse_norm_bound_sq(obs, d, t.get());
    } else {
      const PeriodicMPS obs_mps =
          (esv.observable == "ghz-projector") ? ghz_projector_mps(n) : sparse_to_mps(obs);
      double herald = 0.0;
      const PeriodicMPS inv = lifted_inverse_for(n, d, parse_stages(esv.stages), esv.seed,
                                                 esv.stop_cost, esv.refresh, &herald);
      InverseSide side = InverseSide::kAuto;
      if (esv.side == "observable") side = InverseSide::kObservable;
      if (esv.side == "snapshot") side = InverseSide::kSnapshot;
      r = estimate_shallow(obs_mps, snaps, inv, herald, esv.blocks, side);
      try {
        r.variance_bound = frobenius_norm_bound(obs_mps, inv, d).bound_sq;
      } catch (const std::invalid_argument&) {
        // bound not contractible at this size; report stays without one
      }
    }
    emit(esv.out, r.to_json());
  });

  // norm: shadow norms and sample-complexity bounds, single value or depth sweep
  auto* no = app.add_subcommand("norm", "shadow norms and bounds; CSV over a depth sweep");
  struct {
    std::string kind, d = "1", pauli, observable, state = "ghz", generators, stages = "2:200", out;
    int n = 0, extent = -1;
    double alpha = 1.5, c = 1.0, stop_cost = 0.0;
    uint64_t seed = 1;
    bool refresh = false;
  } nov;
  no->add_option("--kind", nov.kind,
                 "pauli | ls | sparse-bound | state-dep | projector | frobenius | lower-bound")
      ->required()
      ->check(CLI::IsMember(
          {"pauli", "ls", "sparse-bound", "state-dep", "projector", "frobenius", "lower-bound"}));
  no->add_option("--n", nov.n, "qubit count (even)");
  no->add_option("--d", nov.d, "depth, list 0,1,2 or range 1:6 (sweep prints CSV)");
  no->add_option("--pauli", nov.pauli, "Pauli string for kind=pauli");
  no->add_option("--observable", nov.observable, "observable spec for ls/sparse-bound/state-dep/frobenius");
  no->add_option("--state", nov.state, "state spec for kind=state-dep");
  no->add_option("--generators", nov.generators, "comma-separated stabilizers for kind=projector");
  no->add_option("--extent", nov.extent, "support extent for kind=lower-bound");
  no->add_option("--alpha", nov.alpha, "decay exponent for kind=lower-bound");
  no->add_option("--c", nov.c, "decay constant for kind=lower-bound");
  no->add_option("--stages", nov.stages, "inversion schedule for kind=frobenius");
  no->add_option("--seed", nov.seed, "inversion seed for kind=frobenius");
  no->add_option("--stop-cost", nov.stop_cost, "inversion stop threshold");
  no->add_flag("--refresh", nov.refresh, "refit inverses even when cached");
  no->add_option("--out", nov.out, "output file; stdout when omitted");
  no->callback([&] {
    const std::vector<int> depths = parse_depth_list(nov.d);
    PauliString p;
    if (nov.kind == "pauli") {
      if (nov.pauli.empty()) throw std::runtime_error("kind=pauli needs --pauli");
      p = PauliString::parse(nov.pauli);
      if (nov.n == 0) nov.n = p.num_qubits();
    }
    if (nov.n == 0) throw std::runtime_error("norm: --n required");

    std::vector<NormReport> reports;
    for (const int d : depths) {
      NormReport rep;
      rep.kind = nov.kind;
      rep.n = nov.n;
      rep.d = d;
      if (nov.kind == "pauli") {
        std::unique_ptr<EigenvalueMPS> t;
        if (d >= 1) t = std::make_unique<EigenvalueMPS>(build_t_mps(nov.n, d));
        rep.value_sq = pauli_norm_sq(p, d, t.get());
      } else if (nov.kind == "ls" || nov.kind == "sparse-bound" || nov.kind == "state-dep") {
        if (nov.observable.empty()) throw std::runtime_error("this kind needs --observable");
        const SparseObservable obs = load_observable(nov.observable, nov.n);
        if (nov.kind == "ls")
          rep.value_sq = ls_norm_sq(obs, d);
        else if (nov.kind == "sparse-bound")
          rep.value_sq = sparse_norm_bound_sq(obs, d);
        else
          rep.value_sq = state_dep_norm_sq_exact(obs, load_state(nov.state, nov.n), d);
      } else if (nov.kind == "projector") {
        if (nov.generators.empty()) throw std::runtime_error("kind=projector needs --generators");
        rep.value_sq = stabilizer_projector_norm_sq(parse_generator_list(nov.generators), d);
      } else if (nov.kind == "frobenius") {
        if (nov.observable.empty()) throw std::runtime_error("kind=frobenius needs --observable");
        const PeriodicMPS obs_mps = (nov.observable == "ghz-projector")
                                        ? ghz_projector_mps(nov.n)
                                        : sparse_to_mps(load_observable(nov.observable, nov.n));
        double herald = 0.0;
        const PeriodicMPS inv = lifted_inverse_for(nov.n, d, parse_stages(nov.stages), nov.seed,
                                                   nov.stop_cost, nov.refresh, &herald);
        const FrobeniusBound fb = frobenius_norm_bound(obs_mps, inv, d);
        rep.value_sq = fb.bound_sq;
        if (depths.size() == 1) {
          nlohmann::json j = nlohmann::json::parse(rep.to_json());
          j["ls_sq"] = fb.ls_sq;
          j["diag_sq"] = fb.diag_sq;
          j["cross_frob_sq"] = fb.cross_frob_sq;
          j["herald_epsilon"] = herald;
          emit(nov.out, j.dump());
          return;
        }
      } else {  // lower-bound
        if (nov.extent < 0) throw std::runtime_error("kind=lower-bound needs --extent");
        rep.value_sq = eigenvalue_lower_bound(nov.n, d, nov.extent, nov.alpha, nov.c);
      }
      reports.push_back(std::move(rep));
    }
    if (reports.size() == 1) {
      emit(nov.out, reports.front().to_json());
    } else {
      std::string csv = "kind,n,d,value_sq\n";
      for (const NormReport& rep : reports) {
        std::ostringstream row;
        row << rep.kind << "," << rep.n << "," << depth_text(rep.d) << ","
            << std::setprecision(17) << rep.value_sq << "\n";
        csv += row.str();
      }
      emit(nov.out, csv);
    }
  });

  // reproduce: regenerate the reference experiments as CSV data files
  auto* rp = app.add_subcommand("reproduce", "regenerate the reference experiments");
  rp->require_subcommand(1);

  auto* rg = rp->add_subcommand("ghz-fidelity", "GHZ fidelity spread across depths");
  struct {
    int n = 8, reps = 100, shots = 1000;
    std::string depths = "0,1,2,3", out;
    uint64_t seed = 7;
  } rgv;
  rg->add_option("--n", rgv.n, "qubit count (even)");
  rg->add_option("--depths", rgv.depths, "depth list");
  rg->add_option("--reps", rgv.reps, "independent repetitions per depth");
  rg->add_option("--shots", rgv.shots, "snapshots per repetition");
  rg->add_option("--seed", rgv.seed, "sampling seed");
  rg->add_option("--out", rgv.out, "CSV file; stdout when omitted");
  rg->callback([&] {
    const std::vector<int> depths = parse_depth_list(rgv.depths);
    const StabilizerState ghz = StabilizerState::ghz(rgv.n);
    const SparseObservable proj = ghz_projector_terms(rgv.n);
    std::string csv = "n,d,rep,estimate,sme_bound\n";
    for (size_t di = 0; di < depths.size(); ++di) {
      const int d = depths[di];
      std::unique_ptr<EigenvalueMPS> t;
      if (d >= 1) t = std::make_unique<EigenvalueMPS>(build_t_mps(rgv.n, d));
      const double bound_sq = sparse_norm_bound_sq(proj, d, t.get());
      const double sme = std::sqrt(std::max(bound_sq - 1.0, 0.0) / rgv.shots);
      std::vector<double> estimates;
      for (int rep = 0; rep < rgv.reps; ++rep) {
        const uint64_t first = (di * rgv.reps + rep) * static_cast<uint64_t>(rgv.shots);
        const auto snaps = acquire(ghz, d, rgv.seed, rgv.shots, first);
        const double est = estimate_sparse(proj, snaps, t.get()).estimate;
        estimates.push_back(est);
        std::ostringstream row;
        row << rgv.n << "," << depth_text(d) << "," << rep << "," << std::setprecision(12) << est
            << "," << sme << "\n";
        csv += row.str();
      }
      std::cerr << "d=" << depth_text(d) << " mean=" << mean_of(estimates) << " sme_bound=" << sme
                << "\n";
    }
    emit(rgv.out, csv);
  });

  auto* rn = rp->add_subcommand("pauli-norms", "squared shadow norm of Z^k across depths");
  struct {
    int n = 20, dmax = 6;
    std::string out;
    bool deep = true;
  } rnv;
  rn->add_option("--n", rnv.n, "qubit count (even)");
  rn->add_option("--dmax", rnv.dmax, "largest finite depth");
  rn->add_flag("--deep,!--no-deep", rnv.deep, "include the uniform-Clifford rows");
  rn->add_option("--out", rnv.out, "CSV file; stdout when omitted");
  rn->callback([&] {
    std::string csv = "n,k,d,norm_sq\n";
    auto z_prefix = [&](int k) {
      PauliString p(rnv.n);
      for (int q = 0; q < k; ++q) p.set_label(q, kPauliZ);
      return p;
    };
    for (int d = 1; d <= rnv.dmax; ++d) {
      const EigenvalueMPS t = build_t_mps(rnv.n, d);
      for (int k = 1; k <= rnv.n; ++k) {
        std::ostringstream row;
        row << rnv.n << "," << k << "," << d << "," << std::setprecision(17)
            << pauli_norm_sq(z_prefix(k), d, &t) << "\n";
        csv += row.str();
      }
    }
    if (rnv.deep) {
      for (int k = 1; k <= rnv.n; ++k) {
        std::ostringstream row;
        row << rnv.n << "," << k << ",inf," << std::setprecision(17)
            << pauli_norm_sq(z_prefix(k), kDepthInfinite) << "\n";
        csv += row.str();
      }
    }
    emit(rnv.out, csv);
  });

  auto* rh = rp->add_subcommand("hamiltonian", "cluster-Hamiltonian estimates across depths");
  struct {
    int n = 8, reps = 50, shots = 2000;
    std::string depths = "0,1,2,inf", state = "ghz", out;
    uint64_t seed = 11;
  } rhv;
  rh->add_option("--n", rhv.n, "qubit count (even)");
  rh->add_option("--depths", rhv.depths, "depth list, entries may be inf");
  rh->add_option("--reps", rhv.reps, "independent repetitions per depth");
  rh->add_option("--shots", rhv.shots, "snapshots per repetition");
  rh->add_option("--state", rhv.state, "state spec");
  rh->add_option("--seed", rhv.seed, "sampling seed");
  rh->add_option("--out", rhv.out, "CSV file; stdout when omitted");
  rh->callback([&] {
    const std::vector<int> depths = parse_depth_list(rhv.depths);
    const StabilizerState st = load_state(rhv.state, rhv.n);
    const SparseObservable ham = cluster_hamiltonian(rhv.n);
    std::string csv = "n,d,rep,estimate\n";
    for (size_t di = 0; di < depths.size(); ++di) {
      const int d = depths[di];
      std::unique_ptr<EigenvalueMPS> t;
      if (d >= 1) t = std::make_unique<EigenvalueMPS>(build_t_mps(rhv.n, d));
      std::vector<double> estimates;
      for (int rep = 0; rep < rhv.reps; ++rep) {
        const uint64_t first = (di * rhv.reps + rep) * static_cast<uint64_t>(rhv.shots);
        const auto snaps = acquire(st, d, rhv.seed, rhv.shots, first);
        const double est = estimate_sparse(ham, snaps, t.get()).estimate;
        estimates.push_back(est);
        std::ostringstream row;
        row << rhv.n << "," << depth_text(d) << "," << rep << "," << std::setprecision(12) << est
            << "\n";
        csv += row.str();
      }
      double var = 0.0;
      const double m = mean_of(estimates);
      for (double e : estimates) var += (e - m) * (e - m);
      var /= std::max<size_t>(1, estimates.size() - 1);
      std::cerr << "d=" << depth_text(d) << " mean=" << m << " rep_variance=" << var << "\n";
    }
    emit(rhv.out, csv);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
