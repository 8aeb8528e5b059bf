#include "lapeig/dyadic.hpp"
#include "lapeig/errors.hpp"
#include "lapeig/graph.hpp"
#include "lapeig/harness.hpp"
#include "lapeig/interp.hpp"
#include "lapeig/io.hpp"
#include "lapeig/kernels.hpp"
#include "lapeig/manifolds.hpp"
#include "lapeig/sensitivity.hpp"
#include "lapeig/spectral.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pybind11::literals;
using namespace lapeig;

namespace {

py::dict row_dict(const ConvergenceRow& r) {
  return py::dict("n"_a = r.n, "trial"_a = r.trial, "k"_a = r.k, "eps"_a = r.eps, "raw"_a = r.raw,
                  "rescaled"_a = r.rescaled, "target"_a = r.target, "rel_error"_a = r.rel_error);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Graph Laplacian spectra on sampled manifolds";

  static py::exception<Error> error_type(m, "LapeigError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::handle(error_type.ptr())(e.what());
      err.attr("code") = to_string(e.code());
      PyErr_SetObject(error_type.ptr(), err.ptr());
    }
  });

  py::class_<KernelProfile>(m, "Kernel")
      .def_static("parse", &KernelProfile::parse, "spec"_a)
      .def_property_readonly("name", &KernelProfile::name)
      .def("eta", &KernelProfile::eval, "t"_a)
      .def("psi", &KernelProfile::psi, "t"_a)
      .def("moment", &KernelProfile::moment, "p"_a);
  m.def("sigma_eta", [](const std::string& k, int dim) { return sigma_eta(KernelProfile::parse(k), dim); }, "kernel"_a,
        "m"_a);
  m.def("sigma_tilde_eta", [](const std::string& k, int dim) { return sigma_tilde_eta(KernelProfile::parse(k), dim); },
        "kernel"_a, "m"_a);

  py::class_<ManifoldModel>(m, "Manifold")
      .def_static("parse", &ManifoldModel::parse, "manifold"_a, "density"_a = "const")
      .def_property_readonly("name", &ManifoldModel::name)
      .def_property_readonly("intrinsic_dim", &ManifoldModel::intrinsic_dim)
      .def_property_readonly("ambient_dim", &ManifoldModel::ambient_dim)
      .def_property_readonly("volume", &ManifoldModel::volume)
      .def_property_readonly("bilipschitz_constant", &ManifoldModel::bilipschitz_constant);

  py::class_<PointCloud>(m, "PointCloud")
      .def_readonly("seed", &PointCloud::seed)
      .def_readonly("params", &PointCloud::params)
      .def_readonly("ambient", &PointCloud::ambient)
      .def_property_readonly("manifold", [](const PointCloud& c) { return c.model; })
      .def("__len__", &PointCloud::size)
      .def("to_json", [](const PointCloud& c) { return cloud_to_json(c).dump(); });
  m.def("sample", [](const std::string& manifold, const std::string& density, std::size_t n, std::uint64_t seed) {
    return sample_iid(ManifoldModel::parse(manifold, density), n, seed);
  }, "manifold"_a, "density"_a = "const", "n"_a, "seed"_a);
  m.def("analytic_spectrum", [](const std::string& manifold, std::size_t k, bool normalized) {
    return analytic_spectrum(ManifoldModel::parse(manifold), normalized ? SpectrumKind::NormalizedRho : SpectrumKind::WeightedRho, k);
  }, "manifold"_a, "k"_a, "normalized"_a = false);
  m.def("oracle_spectrum", [](double beta, std::size_t grid, std::size_t k, bool normalized) {
    return oracle_spectrum_circle_weighted(DensitySpec::circle_cosine(beta), grid, k,
                                           normalized ? SpectrumKind::NormalizedRho : SpectrumKind::WeightedRho);
  }, "beta"_a, "grid"_a, "k"_a, "normalized"_a = false);

  py::class_<NeighborhoodGraph>(m, "Graph")
      .def_property_readonly("n", &NeighborhoodGraph::size)
      .def_property_readonly("eps", &NeighborhoodGraph::eps)
      .def_property_readonly("degrees", &NeighborhoodGraph::degrees)
      .def("kernel_matrix", &NeighborhoodGraph::kernel_matrix)
      .def("laplacian", &NeighborhoodGraph::laplacian)
      .def("to_json", [](const NeighborhoodGraph& g) { return graph_to_json(g).dump(); });
  m.def("build_graph", [](const PointCloud& cloud, const std::string& kernel, double eps) {
    return build_graph(cloud, KernelProfile::parse(kernel), eps);
  }, "cloud"_a, "kernel"_a = "indicator", "eps"_a);
  m.def("build_graph_points", [](const RowMatrix& points, const std::string& kernel, double eps, int dim) {
    return build_graph(points, KernelProfile::parse(kernel), eps, dim);
  }, "points"_a, "kernel"_a = "indicator", "eps"_a, "m"_a);
  m.def("epsilon_schedule", &epsilon_schedule, "n"_a, "m"_a, "c"_a = 1.0);

  m.def("spectrum", [](const NeighborhoodGraph& g, std::size_t k, bool normalized) {
    const Spectrum s = normalized ? normalized_spectrum(g, k) : unnormalized_spectrum(g, k);
    return py::make_tuple(s.values, s.vectors, s.weights);
  }, "graph"_a, "k"_a, "normalized"_a = false,
        "Returns (values, vectors, weights) with vectors orthonormal under sum weights_i u_i v_i.");
  m.def("rescale_unnormalized", &rescale_unnormalized, "lam"_a, "n"_a, "eps"_a, "sigma_eta"_a, "m"_a);
  m.def("rescale_normalized", &rescale_normalized, "lam"_a, "eps"_a, "sigma_eta"_a, "sigma_tilde_eta"_a);

  m.def("interpolate", [](const PointCloud& cloud, const Eigen::VectorXd& u, const std::string& kernel, double eps,
                          const std::vector<std::vector<double>>& queries) {
    const InterpolationContext ctx(cloud, KernelProfile::parse(kernel), eps);
    std::vector<double> out;
    out.reserve(queries.size());
    for (const auto& q : queries) out.push_back(lambda_eps_eval(ctx, u, q));
    return out;
  }, "cloud"_a, "u"_a, "kernel"_a, "eps"_a, "queries"_a);

  m.def("converge", [](const std::string& manifold, const std::string& density, const std::string& mode,
                       std::vector<std::size_t> n_grid, std::size_t trials, std::size_t k_max, std::uint64_t seed,
                       const std::string& eps) {
    ExperimentConfig c;
    c.manifold = manifold;
    c.density = density;
    c.mode = parse_mode(mode);
    c.n_grid = std::move(n_grid);
    c.trials = trials;
    c.k_max = k_max;
    c.master_seed = seed;
    c.eps_rule = EpsRule::parse(eps);
    ConvergenceReport report;
    {
      py::gil_scoped_release release;
      report = run_convergence(c);
    }
    py::list rows;
    for (const auto& r : report.rows) rows.append(row_dict(r));
    py::list medians;
    for (const auto& s : report.summaries) medians.append(py::make_tuple(s.n, s.median_error));
    return py::dict("targets"_a = report.targets, "rows"_a = rows, "median_error"_a = medians,
                    "csv"_a = report_csv(report));
  }, "manifold"_a = "circle", "density"_a = "const", "mode"_a = "unnormalized", "n_grid"_a, "trials"_a = 5,
        "k_max"_a = 4, "seed"_a = 1, "eps"_a = "auto");
  m.def("fit_rate", [](const std::vector<double>& n, const std::vector<double>& err) {
    const RateFit f = fit_rate(n, err);
    return py::dict("slope"_a = f.slope, "intercept"_a = f.intercept, "band"_a = py::make_tuple(f.band_lo, f.band_hi));
  }, "n"_a, "error"_a);

  m.def("sensitivity_sweep", [](double alpha, double r, std::vector<double> eps_grid, int quad) {
    SensitivityConfig c;
    c.alpha = alpha;
    c.m2_radius = r;
    c.eps_grid = std::move(eps_grid);
    c.quad_resolution = quad;
    py::list out;
    for (const auto& row : sensitivity_sweep(c)) {
      out.append(py::dict("eps"_a = row.eps, "l1_deviation"_a = row.l1_deviation, "limit_rhs"_a = row.limit_rhs,
                          "midpoint_deviation"_a = row.midpoint_deviation));
    }
    return out;
  }, "alpha"_a = 0.0, "r"_a = 1.0, "eps_grid"_a = std::vector<double>{0.2, 0.1, 0.05, 0.025}, "quad"_a = 256);

  m.def("dyadic_alpha", [](double ratio, int level) { return dyadic_alpha(ratio, level).alpha; }, "ratio"_a = 0.5,
        "level"_a);
  m.def("isometry_constant", [](const std::vector<double>& values) { return isometry_constant(values); }, "values"_a);

  m.attr("git_describe") = git_describe();
}
