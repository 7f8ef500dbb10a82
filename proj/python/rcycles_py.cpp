#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rcycles/experiments.hpp"

namespace py = pybind11;
using namespace rcycles;

namespace {

py::list atoms_to_list(const WeightedPointMeasure& m) {
  py::list out;
  for (const Atom& a : m.atoms()) out.append(py::make_tuple(a.point, a.weight));
  return out;
}

py::tuple density_to_tuple(const PiecewiseConstantDensity& d) {
  const auto bp = d.breakpoints();
  const auto v = d.values();
  return py::make_tuple(std::vector<double>(bp.begin(), bp.end()), std::vector<double>(v.begin(), v.end()));
}

CodedSystem coded_from(RandomSystem s) { return build_alphabet_and_matrix(std::move(s)); }

}  // namespace

PYBIND11_MODULE(rcycles, m) {
  m.doc() = "Random cycles of i.i.d. Markov interval maps";
  m.attr("__version__") = RCYCLES_VERSION;

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<MarkovError>(m, "MarkovError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<SizeGuardError>(m, "SizeGuardError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<CodedSystem>(m, "System")
      .def_property_readonly("num_maps", [](const CodedSystem& cs) { return cs.system.size(); })
      .def_property_readonly("p", [](const CodedSystem& cs) {
        return std::vector<double>(cs.system.p().begin(), cs.system.p().end());
      })
      .def_property_readonly("ambient", [](const CodedSystem& cs) {
        return py::make_tuple(cs.system.ambient().lo(), cs.system.ambient().hi());
      })
      .def_property_readonly("alphabet_size", [](const CodedSystem& cs) { return cs.alphabet.size(); })
      .def("transition_matrix", [](const CodedSystem& cs) {
        std::vector<std::vector<int>> rows(cs.matrix.size(), std::vector<int>(cs.matrix.size()));
        for (std::size_t a = 0; a < cs.matrix.size(); ++a)
          for (std::size_t b = 0; b < cs.matrix.size(); ++b) rows[a][b] = cs.matrix(a, b);
        return rows;
      })
      .def("mixing_index", [](const CodedSystem& cs, int n_max) { return mixing_index(cs.matrix, n_max); },
           py::arg("n_max") = 64)
      .def("evaluate", [](const CodedSystem& cs, std::size_t map, double x) {
        const auto e = cs.system.map(map).evaluate(x);
        return py::make_tuple(e.value, e.derivative, e.label);
      }, py::arg("map"), py::arg("x"))
      .def("admissible_words", [](const CodedSystem& cs, const SampleWord& omega) { return admissible_words(cs, omega); })
      .def("cylinder", [](const CodedSystem& cs, const SymbolWord& word) {
        const Interval j = cylinder_interval(cs, word);
        return py::make_tuple(j.lo(), j.hi());
      })
      .def("pelikan_index", [](const CodedSystem& cs) { return pelikan_index(cs.system); })
      .def("with_p", [](const CodedSystem& cs, std::vector<double> p) { return coded_from(cs.system.with_p(std::move(p))); });

  m.def("doubling_system", [] { return coded_from(RandomSystem({doubling_map()}, {1.0}, true)); });
  m.def("beta_system", [](double beta, std::vector<double> p) { return build_beta_system(beta, std::move(p)).coded; },
        py::arg("beta"), py::arg("p") = std::vector<double>{0.5, 0.5});
  m.def("golden_system", [](double p1) { return build_beta_system(golden_ratio(), {p1, 1.0 - p1}).coded; },
        py::arg("p1") = 0.5);
  m.def("lsv_system", [](std::vector<double> alphas, std::vector<double> p) {
    return coded_from(build_lsv_system(alphas, std::move(p)));
  }, py::arg("alphas"), py::arg("p"));

  m.def("sample_word", [](std::vector<double> p, std::size_t n, std::uint64_t seed) { return sample_word(p, n, seed); },
        py::arg("p"), py::arg("n"), py::arg("seed"));

  py::class_<Cycle>(m, "Cycle")
      .def_readonly("word", &Cycle::word)
      .def_readonly("point", &Cycle::point)
      .def_readonly("log_weight", &Cycle::log_weight)
      .def_readonly("orbit", &Cycle::orbit);

  py::class_<CycleSet>(m, "CycleSet")
      .def_readonly("omega", &CycleSet::omega)
      .def_readonly("cycles", &CycleSet::cycles)
      .def_readonly("log_z", &CycleSet::log_z)
      .def_readonly("boundary_coincidences", &CycleSet::boundary_coincidences)
      .def_property_readonly("z", &CycleSet::z)
      .def("__len__", [](const CycleSet& s) { return s.cycles.size(); })
      .def("xi", [](const CycleSet& s) { return atoms_to_list(cycle_measure_xi(s)); })
      .def("point_measure", [](const CycleSet& s) { return atoms_to_list(cycle_point_measure(s)); });

  m.def("enumerate_cycles", [](const CodedSystem& cs, const SampleWord& omega, unsigned threads, bool dedupe) {
    CycleOptions o;
    o.threads = threads;
    o.dedupe = dedupe;
    py::gil_scoped_release release;
    return enumerate_cycles(cs, omega, o);
  }, py::arg("system"), py::arg("omega"), py::arg("threads") = 1, py::arg("dedupe") = true);

  m.def("annealed_log_z", [](const CodedSystem& cs, std::size_t n) {
    return py::make_tuple(enumerate_skew_fixed_points(cs, n).log_z, log_z_from_periodic_words(cs, n));
  }, py::arg("system"), py::arg("n"));

  m.def("preimages", [](const CodedSystem& cs, const SampleWord& omega, double x0) {
    const PreimageSet s = enumerate_preimages(cs, omega, x0);
    std::vector<double> pts;
    for (const Cycle& c : s.preimages) pts.push_back(c.point);
    return py::make_tuple(pts, atoms_to_list(s.measure));
  }, py::arg("system"), py::arg("omega"), py::arg("x0"));

  m.def("ulam_stationary", [](const CodedSystem& cs, std::size_t cells, double tol) {
    UlamOptions o;
    o.cells = cells;
    o.tol = tol;
    py::gil_scoped_release release;
    return ulam_stationary(cs.system, o).density;
  }, py::arg("system"), py::arg("cells") = 4096, py::arg("tol") = 1e-12);

  py::class_<PiecewiseConstantDensity>(m, "Density")
      .def("value_at", &PiecewiseConstantDensity::value_at)
      .def("cdf", &PiecewiseConstantDensity::cdf)
      .def("as_tuple", &density_to_tuple);

  m.def("golden_density", &golden_density, py::arg("p1"));
  m.def("kolmogorov_to_density", [](const std::vector<std::pair<double, double>>& atoms, const PiecewiseConstantDensity& d) {
    std::vector<Atom> a;
    for (const auto& [x, w] : atoms) a.push_back({x, w});
    return kolmogorov_distance(WeightedPointMeasure::from_weights(std::move(a)), d);
  }, py::arg("atoms"), py::arg("density"));

  m.def("q_closed_form_golden", &q_closed_form_golden, py::arg("p1"));
  m.def("q_from_golden_density", [](double p1, const PiecewiseConstantDensity& d) {
    const BetaSystem bs = build_beta_system(golden_ratio(), {p1, 1.0 - p1});
    return q_from_density(bs, bs.coded.system.p(), d);
  }, py::arg("p1"), py::arg("density"));
  m.def("digit_stats", [](const std::vector<int>& digits, int max_digit) {
    const DigitStats s = digit_stats(digits, max_digit);
    return py::make_tuple(s.freq, s.symmetric_mean, s.mean_distance);
  }, py::arg("digits"), py::arg("max_digit") = 1);

  m.def("return_time_tail", [](double alpha, std::size_t n_max) {
    const ReturnTimeTail t = return_time_tail(lsv_map(alpha), 0, n_max);
    return py::make_tuple(t.tail, t.exponent);
  }, py::arg("alpha"), py::arg("n_max") = 1000);
  m.def("classify_case", [](const std::vector<double>& alphas) { return std::string(to_string(classify_case(alphas))); });

  m.def("run_experiment", [](const std::string& config_json) {
    const ExperimentConfig cfg = parse_config(config_json);
    const RunResult r = run_experiment(cfg);
    return py::make_tuple(r.status, r.summary.dump(), r.files);
  }, py::arg("config_json"), "Runs an experiment from a JSON config string; returns (status, summary_json, files).");
}
