#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rmg/diagnostics.hpp"
#include "rmg/ensemble.hpp"
#include "rmg/format.hpp"
#include "rmg/limit_law.hpp"
#include "rmg/quaternionic.hpp"
#include "rmg/spectra.hpp"

namespace py = pybind11;
using namespace rmg;

namespace {

EntryLaw to_law(const py::dict& d) {
  std::map<std::string, std::string> desc;
  for (const auto& [k, v] : d) {
    const std::string key = py::str(k);
    if (py::isinstance<py::float_>(v)) {
      desc[key] = format_double(v.cast<double>());
    } else if (PyComplex_Check(v.ptr())) {
      desc[key] = format_complex(v.cast<cplx>());
    } else {
      desc[key] = py::str(v);
    }
  }
  return law_from_description(desc);
}

GaussianSpec to_spec(const std::tuple<double, double, double>& K) {
  return gaussian_spec({std::get<0>(K), std::get<1>(K), std::get<2>(K)});
}

}  // namespace

PYBIND11_MODULE(_rmgen, m) {
  m.doc() = "Random Markov generators and their limiting spectral laws";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("law_stats", [](const py::dict& law, std::uint64_t n) {
    const LawStats s = law_stats(to_law(law), n);
    return py::dict(py::arg("mean") = s.mean, py::arg("sigma2") = s.sigma2,
                    py::arg("K") = std::make_tuple(s.K.k11, s.K.k12, s.K.k22),
                    py::arg("degenerate") = s.degenerate);
  }, py::arg("law"), py::arg("n"));

  m.def("sample_generator", [](const py::dict& law, std::size_t n, double delta, std::uint64_t seed) {
    const GeneratorSample s = sample_generator(to_law(law), n, delta, seed);
    return py::dict(py::arg("X") = s.X, py::arg("D") = s.D, py::arg("L") = s.L);
  }, py::arg("law"), py::arg("n"), py::arg("delta") = 1.0, py::arg("seed") = 0);

  m.def("rescaled", [](const py::dict& law, std::size_t n, double delta, std::uint64_t seed) {
    const EntryLaw l = to_law(law);
    return rescale(sample_generator(l, n, delta, seed), law_stats(l, n));
  }, py::arg("law"), py::arg("n"), py::arg("delta") = 1.0, py::arg("seed") = 0,
     "M = (L + delta n m I) / (sigma sqrt n) for one sampled generator");

  m.def("eigenvalues", [](const CMatrix& A) { return eigenvalues(A); }, py::arg("A"));
  m.def("singular_values", [](const CMatrix& A, cplx z) { return singular_values(A, z); },
        py::arg("A"), py::arg("z") = cplx(0.0, 0.0));
  m.def("hermitization_stieltjes", &hermitization_stieltjes, py::arg("A"), py::arg("z"), py::arg("eta"));

  m.def("solve_h", [](cplx z, double t, const std::tuple<double, double, double>& K) {
    return solve_h(z, t, to_spec(K));
  }, py::arg("z"), py::arg("t"), py::arg("K"));
  m.def("stieltjes_fixed_point", [](cplx z, cplx eta, const std::tuple<double, double, double>& K) {
    return stieltjes_fixed_point(z, eta, to_spec(K));
  }, py::arg("z"), py::arg("eta"), py::arg("K"));
  m.def("nu_z_density", [](cplx z, const std::vector<double>& s, double eps, const std::tuple<double, double, double>& K) {
    return nu_z_density(z, s, eps, to_spec(K));
  }, py::arg("z"), py::arg("s"), py::arg("eps"), py::arg("K"));
  m.def("default_s_grid", [](cplx z, const std::tuple<double, double, double>& K, std::size_t points) {
    return default_s_grid(z, to_spec(K), points);
  }, py::arg("z"), py::arg("K"), py::arg("points") = 2001);
  m.def("support_indicator", [](cplx z, const std::tuple<double, double, double>& K) {
    return support_indicator(z, to_spec(K));
  }, py::arg("z"), py::arg("K"));
  m.def("solve_f", [](cplx z, const std::tuple<double, double, double>& K) {
    return solve_f(z, to_spec(K));
  }, py::arg("z"), py::arg("K"));
  m.def("brown_density", [](cplx z, const std::tuple<double, double, double>& K) {
    return brown_density(z, to_spec(K));
  }, py::arg("z"), py::arg("K"));
  m.def("log_potential", [](cplx z, const std::tuple<double, double, double>& K) {
    return log_potential(z, to_spec(K));
  }, py::arg("z"), py::arg("K"));

  m.def("gamma_matrix", [](const CMatrix& A, cplx z, cplx eta) {
    const Gamma g = gamma_matrix(A, {z, eta});
    return std::make_pair(g.alpha, g.beta);
  }, py::arg("A"), py::arg("z"), py::arg("eta"));
  m.def("gamma_limit", [](cplx z, cplx eta, const std::tuple<double, double, double>& K) {
    const Gamma g = gamma_limit(z, eta, to_spec(K));
    return std::make_pair(g.alpha, g.beta);
  }, py::arg("z"), py::arg("eta"), py::arg("K"));

  m.def("invariant_measure", &invariant_measure, py::arg("L"));
  m.def("tv_uniform", &tv_uniform, py::arg("pi"));
  m.def("is_irreducible", &is_irreducible, py::arg("L"));
  m.def("concentration_fn", [](const std::vector<cplx>& x, const py::dict& law, double t,
                               std::size_t trials, double resolution, std::uint64_t seed) {
    return concentration_fn(x, to_law(law), t, trials, resolution, seed).value;
  }, py::arg("x"), py::arg("law"), py::arg("t"), py::arg("trials") = 20000,
     py::arg("resolution") = 4.0, py::arg("seed") = 0);
}
