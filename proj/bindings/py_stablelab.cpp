#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "stablelab/cadlag.hpp"
#include "stablelab/gibbs_markov.hpp"
#include "stablelab/intermittent.hpp"
#include "stablelab/limit_lab.hpp"
#include "stablelab/stable.hpp"
#include "stablelab/stats.hpp"
#include "stablelab/zextension.hpp"

namespace py = pybind11;
using namespace stablelab;

PYBIND11_MODULE(pystablelab, m) {
    m.doc() =
        "Stable-law machinery, Skorohod J1 path metrics, Gibbs-Markov and "
        "intermittent map simulators, and the Monte Carlo experiment harness";

    py::class_<StableParams>(m, "StableParams")
        .def(py::init<double, double, double>(), py::arg("alpha"),
             py::arg("c_plus"), py::arg("c_minus"))
        .def_readonly("alpha", &StableParams::alpha)
        .def_readonly("c_plus", &StableParams::c_plus)
        .def_readonly("c_minus", &StableParams::c_minus)
        .def_property_readonly("beta", &StableParams::beta)
        .def_property_readonly("sigma", &StableParams::sigma)
        .def("symmetric", &StableParams::symmetric);

    m.def("char_fn", &char_fn, py::arg("params"), py::arg("t"));
    m.def(
        "sample_stable",
        [](const StableParams& p, std::size_t n, std::uint64_t seed) {
            Rng rng(seed);
            return sample_stable(p, n, rng);
        },
        py::arg("params"), py::arg("n"), py::arg("seed"));
    m.def(
        "canonical_bn",
        [](double alpha, double c_plus, double c_minus, std::size_t n) {
            return canonical_Bn(TailModel(alpha, c_plus, c_minus), n);
        },
        py::arg("alpha"), py::arg("c_plus"), py::arg("c_minus"), py::arg("n"));
    m.def(
        "arcsine_cdf",
        [](double rho, double t) { return arcsine_cdf(ArcsineParams(rho), t); },
        py::arg("rho"), py::arg("t"));
    m.def(
        "positivity_rho",
        [](const StableParams& p, std::size_t n, std::uint64_t seed) {
            Rng rng(seed);
            return positivity_rho(p, n, rng);
        },
        py::arg("params"), py::arg("n"), py::arg("seed"));
    m.def("positivity_rho_exact", &positivity_rho_exact);
    m.def("levy_half_cdf", &levy_half_cdf, py::arg("c_plus"), py::arg("x"));

    py::class_<CadlagPath>(m, "CadlagPath")
        .def_static("step", &CadlagPath::step, py::arg("horizon"),
                    py::arg("times"), py::arg("values"))
        .def_static("constant", &CadlagPath::constant, py::arg("dim"),
                    py::arg("horizon"), py::arg("value"))
        .def("eval", &CadlagPath::eval1, py::arg("t"), py::arg("component") = 0)
        .def_property_readonly("horizon", &CadlagPath::horizon)
        .def_property_readonly("dim", &CadlagPath::dim);

    m.def(
        "from_partial_sums",
        [](const std::vector<double>& sums, double B, double A) {
            std::vector<double> a{A};
            return from_partial_sums(sums, 1, B, a);
        },
        py::arg("sums"), py::arg("B"), py::arg("A") = 0.0);
    m.def("j1_distance",
          py::overload_cast<const CadlagPath&, const CadlagPath&, double>(
              &j1_distance),
          py::arg("x"), py::arg("y"), py::arg("s"));
    m.def(
        "j1_distance_infinite",
        [](const CadlagPath& x, const CadlagPath& y, double s_cut) {
            auto r = j1_distance_infinite(x, y, s_cut);
            return py::make_tuple(r.value, r.error_bound);
        },
        py::arg("x"), py::arg("y"), py::arg("s_cut") = 20.0);
    m.def("sup_distance", &sup_distance, py::arg("x"), py::arg("y"),
          py::arg("s"));
    m.def("modulus", &modulus, py::arg("x"), py::arg("delta"),
          py::arg("which"));
    m.def("occupation_fraction", &occupation_fraction, py::arg("x"),
          py::arg("component") = 0);

    m.def(
        "hill_estimate",
        [](std::vector<double> samples, double top_fraction) {
            auto h = hill_estimate(std::move(samples), top_fraction);
            return py::make_tuple(h.alpha_hat, h.ci_low, h.ci_high);
        },
        py::arg("samples"), py::arg("top_fraction") = 0.05);
    m.def(
        "ks_two_sample",
        [](const std::vector<double>& a, const std::vector<double>& b,
           std::size_t permutations, std::uint64_t seed) {
            Rng rng(seed);
            auto r = ks_two_sample(a, b, permutations, rng);
            return py::make_tuple(r.distance, r.p_value);
        },
        py::arg("a"), py::arg("b"), py::arg("permutations") = 0,
        py::arg("seed") = 1);
    m.def("distance_correlation",
          [](const std::vector<double>& x, const std::vector<double>& y) {
              return distance_correlation(x, y);
          });

    m.def(
        "dyadic_orbit",
        [](double x, std::size_t n) {
            DyadicRenewalMap map;
            return iterate(map, x, n);
        },
        py::arg("x"), py::arg("n"));
    m.def(
        "lsv2_find_y0",
        [](double p) { return find_Y(make_lsv2(p)).y0(); }, py::arg("p"));
    m.def(
        "lsv2_first_return",
        [](double p, double x, std::int64_t cap) {
            IntermittentMap map = make_lsv2(p);
            ReturnStructure rs = find_Y(map);
            FirstReturn r = first_return(map, rs, x, cap);
            return py::make_tuple(r.phi, r.side, r.point, r.censored);
        },
        py::arg("p"), py::arg("x"), py::arg("cap") = 1000000000);
    m.def(
        "measure_is_finite",
        [](double p) { return measure_finiteness(make_lsv2(p)).finite; },
        py::arg("p"));

    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            auto cfg = ExperimentConfig::from_json(
                nlohmann::json::parse(config_json));
            return run_experiment(cfg).to_json().dump(2);
        },
        py::arg("config_json"),
        "Runs one experiment from a JSON config string and returns the "
        "report as JSON");
}
