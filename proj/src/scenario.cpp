#include "costrain/scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "costrain/reduction.hpp"
#include "costrain/rng.hpp"

namespace costrain {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError("scenario field '" + where + "': " + what);
}

double get_num(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

double get_num_or(const json& parent, const char* key, double fallback,
                  const std::string& where) {
  if (!parent.contains(key)) return fallback;
  return get_num(parent.at(key), where + "." + key);
}

Eigen::VectorXd parse_vector(const json& j, int n, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of " + std::to_string(n) + " numbers");
  if (static_cast<int>(j.size()) != n)
    fail(where, "length " + std::to_string(j.size()) + " != n = " + std::to_string(n));
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = get_num(j[static_cast<std::size_t>(i)], where);
  return v;
}

Eigen::MatrixXd parse_matrix(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    fail(where, "expected " + std::to_string(n) + " rows");
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      fail(where + "[" + std::to_string(i) + "]", "expected " + std::to_string(n) + " numbers");
    for (int c = 0; c < n; ++c) m(i, c) = get_num(row[static_cast<std::size_t>(c)], where);
  }
  return m;
}

struct RandomSpec {
  std::string dist;
  double low = -1.0, high = 1.0;  // uniform
  double mean = 0.0, sd = 1.0;    // normal
  std::uint64_t seed = 0;
  bool zero_diagonal = false;
  bool symmetrize = false;
};

RandomSpec parse_random_spec(const json& j, const std::string& where,
                             std::optional<std::uint64_t> seed_override, int array_index) {
  RandomSpec spec;
  if (!j.contains("dist")) fail(where, "random spec needs 'dist'");
  spec.dist = j.at("dist").get<std::string>();
  if (spec.dist == "uniform") {
    spec.low = get_num_or(j, "low", -1.0, where);
    spec.high = get_num_or(j, "high", 1.0, where);
    if (!(spec.low < spec.high)) fail(where, "uniform needs low < high");
  } else if (spec.dist == "normal") {
    spec.mean = get_num_or(j, "mean", 0.0, where);
    spec.sd = get_num_or(j, "sd", 1.0, where);
    if (!(spec.sd > 0.0)) fail(where, "normal needs sd > 0");
  } else {
    fail(where, "unknown dist '" + spec.dist + "' (uniform | normal)");
  }
  if (!j.contains("seed")) fail(where, "random spec needs 'seed'");
  spec.seed = j.at("seed").get<std::uint64_t>();
  if (seed_override)
    spec.seed = *seed_override + static_cast<std::uint64_t>(array_index);
  spec.zero_diagonal = j.value("zero_diagonal", false);
  spec.symmetrize = j.value("symmetrize", false);
  return spec;
}

double draw(const RandomSpec& spec, Rng& rng) {
  return spec.dist == "uniform" ? rng.uniform(spec.low, spec.high)
                                : rng.normal(spec.mean, spec.sd);
}

Eigen::VectorXd materialize_vector(const json& j, int n, const std::string& where,
                                   std::optional<std::uint64_t> seed_override, int array_index) {
  if (j.is_array()) return parse_vector(j, n, where);
  if (j.is_object() && j.contains("random")) {
    const RandomSpec spec =
        parse_random_spec(j.at("random"), where + ".random", seed_override, array_index);
    Rng rng(spec.seed);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = draw(spec, rng);
    return v;
  }
  fail(where, "expected an array or a {\"random\": ...} spec");
}

Eigen::MatrixXd materialize_matrix(const json& j, int n, const std::string& where,
                                   std::optional<std::uint64_t> seed_override, int array_index) {
  if (j.is_array()) return parse_matrix(j, n, where);
  if (j.is_object() && j.contains("random")) {
    const RandomSpec spec =
        parse_random_spec(j.at("random"), where + ".random", seed_override, array_index);
    Rng rng(spec.seed);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < n; ++c) m(i, c) = draw(spec, rng);
    if (spec.symmetrize) m = 0.5 * (m + m.transpose()).eval();
    if (spec.zero_diagonal) m.diagonal().setZero();
    return m;
  }
  fail(where, "expected a matrix or a {\"random\": ...} spec");
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text,
                        std::optional<std::uint64_t> seed_override) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("scenario parse error: ") + e.what());
  }

  Scenario sc;
  sc.hash = fnv1a(j.dump());

  sc.schema_version = j.value("schema_version", 1);
  if (sc.schema_version != 1)
    fail("schema_version", "unsupported version " + std::to_string(sc.schema_version));
  sc.name = j.value("name", std::string("unnamed"));

  if (!j.contains("n")) fail("n", "missing strain count");
  const int n = j.at("n").get<int>();
  if (n < 1) fail("n", "must be >= 1");

  if (!j.contains("neutral")) fail("neutral", "missing");
  const json& nj = j.at("neutral");
  sc.neutral.beta = get_num_or(nj, "beta", 0.0, "neutral");
  sc.neutral.gamma = get_num_or(nj, "gamma", 0.0, "neutral");
  sc.neutral.r = get_num_or(nj, "r", 0.0, "neutral");
  sc.neutral.k = get_num_or(nj, "k", 0.0, "neutral");
  sc.neutral.validate();

  if (!j.contains("mask")) fail("mask", "missing (array of trait dimensions, possibly empty)");
  std::vector<int> dims;
  for (const auto& d : j.at("mask")) dims.push_back(d.get<int>());

  sc.perturbations = TraitPerturbations::zeros(n);
  sc.perturbations.mask = TraitMask::from_dims(dims);
  if (j.contains("perturbations")) {
    const json& pj = j.at("perturbations");
    if (pj.contains("b"))
      sc.perturbations.b = materialize_vector(pj.at("b"), n, "perturbations.b", seed_override, 0);
    if (pj.contains("nu"))
      sc.perturbations.nu =
          materialize_vector(pj.at("nu"), n, "perturbations.nu", seed_override, 1);
    if (pj.contains("u"))
      sc.perturbations.u = materialize_matrix(pj.at("u"), n, "perturbations.u", seed_override, 2);
    if (pj.contains("omega"))
      sc.perturbations.omega =
          materialize_matrix(pj.at("omega"), n, "perturbations.omega", seed_override, 3);
    if (pj.contains("alpha"))
      sc.perturbations.alpha =
          materialize_matrix(pj.at("alpha"), n, "perturbations.alpha", seed_override, 4);
  }
  sc.perturbations.validate();

  if (!j.contains("epsilon")) fail("epsilon", "missing");
  sc.epsilon = get_num(j.at("epsilon"), "epsilon");
  if (sc.epsilon < 0.0) fail("epsilon", "must be >= 0");

  if (j.contains("initial")) {
    const json& ij = j.at("initial");
    const bool has_freq = ij.contains("frequencies");
    const bool has_state = ij.contains("state");
    if (has_freq == has_state)
      fail("initial", "give exactly one of 'frequencies' or 'state'");
    if (has_freq) {
      Eigen::VectorXd z = parse_vector(ij.at("frequencies"), n, "initial.frequencies");
      if ((z.array() < 0.0).any()) fail("initial.frequencies", "must be nonnegative");
      const double total = z.sum();
      if (!(total > 0.0)) fail("initial.frequencies", "must have positive mass");
      if (std::abs(total - 1.0) > 1e-9)
        fail("initial.frequencies", "must sum to 1 within 1e-9");
      sc.initial_frequencies = z;
    } else {
      const json& stj = ij.at("state");
      FullState st = FullState::zero(n);
      if (!stj.contains("s")) fail("initial.state.s", "missing");
      st.s = get_num(stj.at("s"), "initial.state.s");
      if (!stj.contains("i_single")) fail("initial.state.i_single", "missing");
      st.i_single = parse_vector(stj.at("i_single"), n, "initial.state.i_single");
      if (!stj.contains("i_double")) fail("initial.state.i_double", "missing");
      st.i_double = parse_matrix(stj.at("i_double"), n, "initial.state.i_double");
      st.validate();
      sc.initial_state = st;
    }
  } else {
    sc.initial_frequencies = Eigen::VectorXd::Constant(n, 1.0 / n);
  }

  sc.tau_end = 500.0;
  sc.t_end = 0.0;
  if (j.contains("horizons")) {
    const json& hj = j.at("horizons");
    sc.tau_end = get_num_or(hj, "tau_end", 500.0, "horizons");
    sc.t_end = get_num_or(hj, "t_end", 0.0, "horizons");
  }
  if (!(sc.tau_end > 0.0)) fail("horizons.tau_end", "must be > 0");
  if (sc.t_end <= 0.0)
    sc.t_end = sc.epsilon > 0.0 ? sc.tau_end / sc.epsilon : sc.tau_end;

  if (j.contains("solver")) {
    const json& sj = j.at("solver");
    sc.solver.rtol = get_num_or(sj, "rtol", sc.solver.rtol, "solver");
    sc.solver.atol = get_num_or(sj, "atol", sc.solver.atol, "solver");
    sc.solver.max_step = get_num_or(sj, "max_step", sc.solver.max_step, "solver");
    sc.solver.samples = static_cast<int>(get_num_or(sj, "samples", sc.solver.samples, "solver"));
    sc.solver.validate();
  }

  if (j.contains("analysis")) {
    const json& aj = j.at("analysis");
    sc.analysis.threshold = get_num_or(aj, "threshold", sc.analysis.threshold, "analysis");
    sc.analysis.window_fraction =
        get_num_or(aj, "window_fraction", sc.analysis.window_fraction, "analysis");
    sc.analysis.amplitude_tol =
        get_num_or(aj, "amplitude_tol", sc.analysis.amplitude_tol, "analysis");
    sc.analysis.noise_floor = get_num_or(aj, "noise_floor", sc.analysis.noise_floor, "analysis");
    if (!(sc.analysis.threshold > 0.0)) fail("analysis.threshold", "must be > 0");
    if (!(sc.analysis.window_fraction > 0.0 && sc.analysis.window_fraction < 1.0))
      fail("analysis.window_fraction", "must be in (0,1)");
  }

  if (j.contains("scaling")) {
    const json& gj = j.at("scaling");
    if (gj.contains("epsilons")) {
      sc.scaling.epsilons.clear();
      for (const auto& e : gj.at("epsilons"))
        sc.scaling.epsilons.push_back(e.get<double>());
    }
    sc.scaling.tau0 = get_num_or(gj, "tau0", sc.scaling.tau0, "scaling");
    sc.scaling.tau_end = get_num_or(gj, "tau_end", sc.scaling.tau_end, "scaling");
    sc.scaling.grid_samples =
        static_cast<int>(get_num_or(gj, "grid_samples", sc.scaling.grid_samples, "scaling"));
  }

  // Realization must succeed for the scenario's own epsilon.
  realize_traits(sc.neutral, sc.perturbations, sc.epsilon);
  return sc;
}

Scenario load_scenario(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), seed_override);
}

FullState scenario_initial_state(const Scenario& sc, const NeutralEquilibrium& eq) {
  if (sc.initial_state) return *sc.initial_state;
  return slow_manifold_state(*sc.initial_frequencies, sc.neutral, eq);
}

Eigen::VectorXd scenario_initial_frequencies(const Scenario& sc, const NeutralEquilibrium& eq) {
  if (sc.initial_frequencies) return *sc.initial_frequencies;
  const StrainParameters sp = realize_traits(sc.neutral, sc.perturbations, sc.epsilon);
  return project_slow(*sc.initial_state, sp, eq).z;
}

}  // namespace costrain
