#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "frfid/harness.hpp"

namespace py = pybind11;
using namespace frfid;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<cplx> to_array(const std::vector<cplx>& v) {
    return py::array_t<cplx>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<int> to_array(const std::vector<BinFlag>& v) {
    std::vector<int> flags(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) flags[i] = static_cast<int>(v[i]);
    return py::array_t<int>(static_cast<py::ssize_t>(flags.size()), flags.data());
}

Spectrum to_spectrum(const std::vector<cplx>& values, Rate rate) {
    Spectrum s;
    s.values = values;
    s.rate = rate;
    return s;
}

py::dict lpm_result(const FrfEstimate& est) {
    py::dict d;
    d["frf"] = to_array(est.frf);
    d["transient"] = to_array(est.transient);
    d["variance"] = to_array(est.variance);
    d["variance_alt"] = to_array(est.variance_alt);
    d["noise_var"] = to_array(est.noise_var);
    d["condition"] = to_array(est.condition);
    d["flags"] = to_array(est.flags);
    return d;
}

}  // namespace

PYBIND11_MODULE(_frfid, m) {
    m.doc() = "FRF identification of slow-sampled systems beyond the Nyquist "
              "frequency of the output sensor";

    py::class_<FrequencyGrid>(m, "FrequencyGrid")
        .def(py::init(&FrequencyGrid::create), py::arg("fast_length"),
             py::arg("factor"), py::arg("fast_dt"))
        .def_readonly("fast_length", &FrequencyGrid::fast_length)
        .def_readonly("slow_length", &FrequencyGrid::slow_length)
        .def_readonly("factor", &FrequencyGrid::factor)
        .def_readonly("fast_dt", &FrequencyGrid::fast_dt)
        .def_readonly("slow_dt", &FrequencyGrid::slow_dt)
        .def("omega", &FrequencyGrid::omega, py::arg("bin"))
        .def("hz", &FrequencyGrid::hz, py::arg("bin"))
        .def("omega_values",
             [](const FrequencyGrid& g) { return to_array(g.omega_values()); })
        .def("hz_values",
             [](const FrequencyGrid& g) { return to_array(g.hz_values()); });

    py::class_<TransferFunction>(m, "TransferFunction")
        .def(py::init(&TransferFunction::create), py::arg("num"), py::arg("den"),
             py::arg("dt"))
        .def_readonly("num", &TransferFunction::num)
        .def_readonly("den", &TransferFunction::den)
        .def_readonly("dt", &TransferFunction::dt)
        .def("is_stable", &TransferFunction::is_stable)
        .def("response", &TransferFunction::response, py::arg("omega"))
        .def("simulate",
             [](const TransferFunction& tf, const std::vector<double>& u) {
                 return to_array(simulate_lti(tf, u));
             },
             py::arg("input"), "zero-state response to the input record")
        .def("simulate_steady_state",
             [](const TransferFunction& tf, const std::vector<double>& u) {
                 return to_array(simulate_steady_state(tf, u));
             },
             py::arg("input_period"),
             "periodic steady-state response to one input period");

    py::class_<LpmConfig>(m, "LpmConfig")
        .def(py::init([](std::size_t poly_order, std::size_t half_width,
                         std::size_t factor) {
                 LpmConfig c;
                 c.poly_order = poly_order;
                 c.half_width = half_width;
                 c.factor = factor;
                 return c;
             }),
             py::arg("poly_order") = 2, py::arg("half_width") = 150,
             py::arg("factor") = 4)
        .def_readwrite("poly_order", &LpmConfig::poly_order)
        .def_readwrite("half_width", &LpmConfig::half_width)
        .def_readwrite("factor", &LpmConfig::factor)
        .def_readwrite("rank_tol", &LpmConfig::rank_tol)
        .def_readwrite("normalize_basis", &LpmConfig::normalize_basis)
        .def("violations", &LpmConfig::violations, py::arg("slow_length"));

    m.def("resonant_plant", &resonant_plant, py::arg("dt"),
          py::arg("pole1_hz") = 8.0, py::arg("pole2_hz") = 45.0,
          py::arg("zero1_hz") = 12.0, py::arg("zero2_hz") = 30.0,
          py::arg("pole_damping") = 0.35, py::arg("zero_damping") = 0.45,
          "two-resonance reference plant with unit dc gain");

    m.def("full_spectrum_bins", &full_spectrum_bins, py::arg("grid"));
    m.def("sparse_multisine_bins", &sparse_multisine_bins, py::arg("grid"),
          "excited-bin set whose aliases never collide (requires even M)");

    m.def("multisine",
          [](const FrequencyGrid& grid, const std::vector<std::size_t>& bins,
             double rms, std::uint64_t seed) {
              ExcitationSpec spec;
              spec.grid = grid;
              spec.excited_bins = bins;
              spec.rms = rms;
              spec.seed = seed;
              const auto rec = random_phase_multisine(spec);
              return py::make_tuple(to_array(rec.samples),
                                    to_array(rec.spectrum.values));
          },
          py::arg("grid"), py::arg("bins"), py::arg("rms") = 1.0,
          py::arg("seed") = 0,
          "random-phase multisine; returns (samples, spectrum)");

    m.def("downsample",
          [](const std::vector<double>& x, std::size_t factor) {
              return to_array(downsample(x, factor));
          },
          py::arg("signal"), py::arg("factor"));

    m.def("estimate_frf_lpm",
          [](const std::vector<cplx>& u_fast, const std::vector<cplx>& y_slow,
             const FrequencyGrid& grid, const LpmConfig& cfg, unsigned threads) {
              return lpm_result(estimate_frf_lpm(to_spectrum(u_fast, Rate::fast),
                                                 to_spectrum(y_slow, Rate::slow),
                                                 grid, cfg, threads));
          },
          py::arg("u_fast"), py::arg("y_slow"), py::arg("grid"), py::arg("config"),
          py::arg("threads") = 1,
          "multiband local polynomial FRF estimate over the fast grid");

    m.def("estimate_sparse",
          [](const std::vector<cplx>& u_fast, const std::vector<cplx>& y_slow,
             const FrequencyGrid& grid, const std::vector<std::size_t>& bins) {
              const auto est =
                  estimate_sparse(to_spectrum(u_fast, Rate::fast),
                                  to_spectrum(y_slow, Rate::slow), grid, bins);
              py::dict d;
              d["bins"] = est.bins;
              d["frf"] = to_array(est.frf);
              d["flags"] = to_array(est.flags);
              return d;
          },
          py::arg("u_fast"), py::arg("y_slow"), py::arg("grid"), py::arg("bins"),
          "FRF at the sparse excited set");

    m.def("etfe_baseline",
          [](const std::vector<cplx>& u_fast, const std::vector<cplx>& y_slow,
             const FrequencyGrid& grid) {
              const auto est = etfe_baseline(to_spectrum(u_fast, Rate::fast),
                                             to_spectrum(y_slow, Rate::slow), grid);
              py::dict d;
              d["frf"] = to_array(est.frf);
              d["flags"] = to_array(est.flags);
              return d;
          },
          py::arg("u_fast"), py::arg("y_slow"), py::arg("grid"),
          "naive ratio estimate, aliasing deliberately ignored");

    m.def("identify",
          [](const std::string& config_path, const std::string& out_dir) {
              auto cfg = ExperimentConfig::from_ini(
                  io::IniFile::parse_file(config_path));
              if (!out_dir.empty()) cfg.out_dir = out_dir;
              const auto res = run_identify(cfg);
              py::dict d;
              d["out_dir"] = res.out_dir;
              d["input_fast"] = to_array(res.input_fast);
              d["output_slow"] = to_array(res.output_slow);
              d["oracle"] = to_array(res.oracle);
              if (res.lpm) d["lpm"] = lpm_result(*res.lpm);
              return d;
          },
          py::arg("config_path"), py::arg("out_dir") = std::string(),
          "full identification run from a config file; writes the bundle");

}