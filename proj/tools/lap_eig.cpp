// lap-eig: command line front end for the graph Laplacian experiments.

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

#include "CLI11.hpp"
#include "json.hpp"

#include <charconv>
#include <cmath>
#include <iostream>
#include <sstream>

namespace {

using namespace lapeig;
using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

struct Globals {
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string out = "-";
  std::string format;
};

ReportFormat format_or(const Globals& g, ReportFormat fallback) {
  return g.format.empty() ? fallback : parse_format(g.format);
}

void emit(const Globals& g, const std::string& text) {
  if (g.out == "-") {
    std::cout << text;
  } else {
    write_text_file(g.out, text);
  }
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string line;
  for (const auto& c : cells) {
    if (!line.empty()) line += ',';
    line += c;
  }
  return line + '\n';
}

template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    T v{};
    auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
      throw Error(ErrorCode::InvalidArgument, "bad list entry: " + item);
    }
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty list");
  return out;
}

// theta(l) = r^l; the decimal r is converted exactly to num / 2^k.
std::pair<std::int64_t, std::int64_t> dyadic_fraction(double r) {
  std::int64_t den = 1;
  double scaled = r;
  for (int k = 0; k < 52 && scaled != std::floor(scaled); ++k) {
    scaled *= 2.0;
    den *= 2;
  }
  if (scaled != std::floor(scaled)) throw Error(ErrorCode::InvalidArgument, "theta ratio is not representable");
  return {static_cast<std::int64_t>(scaled), den};
}

double parse_geometric(const std::string& spec) {
  const std::string prefix = "geometric:";
  if (spec.rfind(prefix, 0) != 0) throw Error(ErrorCode::InvalidArgument, "theta must be geometric:<ratio>");
  const auto body = std::string_view(spec).substr(prefix.size());
  double r = 0.0;
  auto res = std::from_chars(body.data(), body.data() + body.size(), r);
  if (res.ec != std::errc{} || res.ptr != body.data() + body.size() || !(r > 0.0 && r < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "theta ratio must lie in (0, 1)");
  }
  return r;
}

Eigen::VectorXd read_vector(const std::string& path) {
  const json j = read_json_file(path);
  const json& arr = j.is_object() ? j.at("u") : j;
  std::vector<double> v;
  try {
    v = arr.get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("vector file: ") + e.what());
  }
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void run_sample(const Globals& g, const std::string& manifold, const std::string& density, std::size_t n) {
  const ManifoldModel model = ManifoldModel::parse(manifold, density);
  const PointCloud cloud = sample_iid(model, n, g.seed);
  if (format_or(g, ReportFormat::JSON) == ReportFormat::JSON) {
    emit(g, cloud_to_json(cloud).dump() + "\n");
    return;
  }
  std::string text;
  for (Eigen::Index c = 0; c < cloud.params.cols(); ++c) text += (c ? ",p" : "p") + std::to_string(c);
  for (Eigen::Index c = 0; c < cloud.ambient.cols(); ++c) text += ",x" + std::to_string(c);
  text += '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    std::string line;
    for (double v : cloud.param(i)) line += (line.empty() ? "" : ",") + format_double(v);
    for (double v : cloud.point(i)) line += "," + format_double(v);
    text += line + '\n';
  }
  emit(g, text);
}

void run_graph(const Globals& g, const std::string& in, const std::string& eps_text, const std::string& kernel,
               const std::string& metric) {
  const PointCloud cloud = cloud_from_json(read_json_file(in));
  const int m = cloud.model.intrinsic_dim();
  const double eps = EpsRule::parse(eps_text).eps_for(cloud.size(), m);
  if (metric != "ambient" && metric != "intrinsic") throw Error(ErrorCode::InvalidArgument, "metric must be ambient or intrinsic");
  const NeighborhoodGraph graph =
      build_graph(cloud, KernelProfile::parse(kernel), eps, metric == "intrinsic" ? MetricKind::Intrinsic : MetricKind::Ambient);
  if (format_or(g, ReportFormat::JSON) == ReportFormat::JSON) {
    emit(g, graph_to_json(graph).dump() + "\n");
    return;
  }
  std::string text = "i,j,k_ij\n";
  for (const auto& e : graph.entries()) text += csv_line({std::to_string(e.row), std::to_string(e.col), format_double(e.value)});
  emit(g, text);
}

void run_spectrum(const Globals& g, const std::string& in, std::size_t k, bool normalized, bool with_n) {
  const NeighborhoodGraph graph = graph_from_json(read_json_file(in));
  const Spectrum spec = normalized ? normalized_spectrum(graph, k) : unnormalized_spectrum(graph, k);
  const KernelConstants c = kernel_constants(graph.kernel(), graph.intrinsic_dim());
  const double n = static_cast<double>(graph.size());
  std::vector<double> values, rescaled;
  for (Eigen::Index i = 0; i < spec.values.size(); ++i) {
    const double v = spec.values[i];
    values.push_back(v);
    if (!normalized) {
      rescaled.push_back(rescale_unnormalized(v, n, graph.eps(), c.sigma_eta, graph.intrinsic_dim()));
    } else if (with_n) {
      rescaled.push_back(rescale_normalized_with_n(v, n, graph.eps(), c.sigma_eta, c.sigma_tilde_eta));
    } else {
      rescaled.push_back(rescale_normalized(v, graph.eps(), c.sigma_eta, c.sigma_tilde_eta));
    }
  }
  const char* mode = normalized ? "normalized" : "unnormalized";
  if (format_or(g, ReportFormat::JSON) == ReportFormat::JSON) {
    const json j{{"mode", mode}, {"k", k}, {"values", values}, {"rescaled", rescaled}, {"eps", graph.eps()}, {"n", graph.size()}};
    emit(g, j.dump(2) + "\n");
    return;
  }
  std::string text = "k,value,rescaled\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    text += csv_line({std::to_string(i), format_double(values[i]), format_double(rescaled[i])});
  }
  emit(g, text);
}

struct ExperimentArgs {
  std::string manifold = "circle";
  std::string density = "const";
  std::string kernel = "indicator";
  std::string mode = "unnormalized";
  std::string n_grid = "512,1024,2048,4096";
  std::string eps = "auto";
  std::size_t trials = 20;
  std::size_t k_max = 4;
  std::size_t oracle_grid = 4096;
  bool with_n = false;
};

ExperimentConfig make_config(const Globals& g, const ExperimentArgs& a) {
  ExperimentConfig c;
  c.manifold = a.manifold;
  c.density = a.density;
  c.kernel = a.kernel;
  c.mode = parse_mode(a.mode);
  c.n_grid = parse_list<std::size_t>(a.n_grid);
  c.trials = a.trials;
  c.k_max = a.k_max;
  c.eps_rule = EpsRule::parse(a.eps);
  c.oracle_grid = a.oracle_grid;
  c.rescale_with_n = a.with_n;
  c.master_seed = g.seed;
  c.threads = std::max<std::size_t>(1, g.threads);
  c.validate();
  return c;
}

void run_converge(const Globals& g, const ExperimentArgs& a) {
  const ConvergenceReport report = run_convergence(make_config(g, a));
  const ReportFormat f = format_or(g, ReportFormat::CSV);
  emit(g, f == ReportFormat::CSV ? report_csv(report) : report_to_json(report).dump(2) + "\n");
  for (const auto& s : report.summaries) {
    std::cerr << "n=" << s.n << " eps=" << format_double(s.eps) << " median_error=" << format_double(s.median_error) << '\n';
  }
  if (report.summaries.size() >= 3) {
    try {
      const RateFit fit = fit_rate(report);
      std::cerr << "slope=" << format_double(fit.slope) << " band=[" << format_double(fit.band_lo) << ", "
                << format_double(fit.band_hi) << "]\n";
    } catch (const Error& e) {
      std::cerr << "rate fit skipped: " << e.what() << '\n';
    }
  }
  for (const auto& f2 : report.failures) std::cerr << "failed n=" << f2.n << " trial=" << f2.trial << ": " << f2.message << '\n';
}

void run_align(const Globals& g, const ExperimentArgs& a, std::size_t k, std::size_t l, double threshold) {
  const AlignmentSummary s = run_eigvec_alignment(make_config(g, a), k, l);
  if (format_or(g, ReportFormat::CSV) == ReportFormat::JSON) {
    json trials = json::array();
    for (const auto& t : s.trials) {
      trials.push_back({{"n", t.n},
                        {"trial", t.trial},
                        {"max_residual", t.max_residual},
                        {"principal_angles", t.principal_angles},
                        {"mass_discrepancy", t.mass_discrepancy},
                        {"failed", t.failed},
                        {"message", t.message}});
    }
    emit(g, json{{"k", s.k}, {"l", s.l}, {"gap", s.gap}, {"trials", trials}}.dump(2) + "\n");
  } else {
    std::string text = "n,trial,max_residual,mass_discrepancy,failed\n";
    for (const auto& t : s.trials) {
      text += csv_line({std::to_string(t.n), std::to_string(t.trial), format_double(t.max_residual),
                        format_double(t.mass_discrepancy), t.failed ? "1" : "0"});
    }
    emit(g, text);
  }
  for (std::size_t n : parse_list<std::size_t>(a.n_grid)) {
    std::cerr << "n=" << n << " fraction(residual<=" << format_double(threshold) << ")=" << format_double(s.fraction_within(n, threshold)) << '\n';
  }
}

void run_sensitivity(const Globals& g, double alpha, double r, int m, const std::string& eps_grid, int quad) {
  if (m != 2) throw Error(ErrorCode::UnsupportedDimension, "the sensitivity experiment is implemented for m = 2");
  SensitivityConfig c;
  c.alpha = alpha;
  c.m2_radius = r;
  c.eps_grid = parse_list<double>(eps_grid);
  c.quad_resolution = quad;
  const auto rows = sensitivity_sweep(c);
  if (format_or(g, ReportFormat::CSV) == ReportFormat::JSON) {
    json arr = json::array();
    for (const auto& row : rows) {
      arr.push_back({{"eps", row.eps}, {"l1_deviation", row.l1_deviation}, {"limit_rhs", row.limit_rhs},
                     {"midpoint_deviation", row.midpoint_deviation}});
    }
    emit(g, arr.dump(2) + "\n");
    return;
  }
  std::string text = "eps,l1_deviation,limit_rhs\n";
  for (const auto& row : rows) text += csv_line({format_double(row.eps), format_double(row.l1_deviation), format_double(row.limit_rhs)});
  emit(g, text);
}

void run_dyadic(const Globals& g, const std::string& theta, int level) {
  const double ratio = parse_geometric(theta);
  const auto [num, den] = dyadic_fraction(ratio);
  // Exact arithmetic keeps the tiny jumps e_n from rounding to zero.
  const ExactDyadicProfile p = dyadic_alpha_exact(num, den, level);
  const DyadicSlopes<Rational> s = dyadic_slopes(p);
  const std::size_t cells = p.intervals();
  if (format_or(g, ReportFormat::CSV) == ReportFormat::JSON) {
    std::vector<double> alpha, d, e;
    for (std::size_t k = 0; k < cells; ++k) {
      alpha.push_back(static_cast<double>(p.alpha[k]));
      d.push_back(static_cast<double>(s.d[k]));
      e.push_back(static_cast<double>(s.e[k]));
    }
    emit(g, json{{"level", level}, {"ratio", ratio}, {"alpha", alpha}, {"d_n", d}, {"e_n", e},
                 {"E_n", static_cast<double>(s.total)}}.dump(2) + "\n");
    return;
  }
  std::string text = "x,alpha,d_n,e_n\n";
  for (std::size_t k = 0; k < cells; ++k) {
    text += csv_line({format_double(static_cast<double>(k) / static_cast<double>(cells)),
                      format_double(static_cast<double>(p.alpha[k])), format_double(static_cast<double>(s.d[k])),
                      format_double(static_cast<double>(s.e[k]))});
  }
  emit(g, text);
}

void run_kernel_info(const Globals& g, const std::string& kernel, int m) {
  const KernelProfile k = KernelProfile::parse(kernel);
  const KernelConstants c = kernel_constants(k, m);
  if (format_or(g, ReportFormat::JSON) == ReportFormat::JSON) {
    emit(g, json{{"kernel", k.name()}, {"m", m}, {"sigma_eta", c.sigma_eta}, {"sigma_tilde_eta", c.sigma_tilde_eta},
                 {"psi0", k.psi(0.0)}}.dump(2) + "\n");
    return;
  }
  emit(g, "kernel,m,sigma_eta,sigma_tilde_eta,psi0\n" +
              csv_line({k.name(), std::to_string(m), format_double(c.sigma_eta), format_double(c.sigma_tilde_eta),
                        format_double(k.psi(0.0))}));
}

void run_interp(const Globals& g, const std::string& cloud_path, const std::string& u_path, const std::string& query,
                double eps, const std::string& kernel) {
  const PointCloud cloud = cloud_from_json(read_json_file(cloud_path));
  const Eigen::VectorXd u = read_vector(u_path);
  const InterpolationContext ctx(cloud, KernelProfile::parse(kernel), eps);
  if (query.rfind("grid:", 0) != 0) throw Error(ErrorCode::InvalidArgument, "query must be grid:<N>");
  const auto counts = parse_list<std::size_t>(query.substr(5));
  const std::size_t per_axis = counts.front();
  if (per_axis < 1) throw Error(ErrorCode::InvalidArgument, "grid size must be positive");
  const auto box = cloud.model.chart_box();

  std::string text;
  for (std::size_t c = 0; c < box.size(); ++c) text += "p" + std::to_string(c) + ",";
  text += "value\n";
  std::size_t total = 1;
  for (std::size_t c = 0; c < box.size(); ++c) total *= per_axis;
  std::vector<double> p(box.size());
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    std::string line;
    for (std::size_t c = box.size(); c-- > 0;) {
      const std::size_t i = rest % per_axis;
      rest /= per_axis;
      const double h = (box[c].second - box[c].first) / static_cast<double>(per_axis);
      p[c] = box[c].first + (static_cast<double>(i) + 0.5) * h;
    }
    for (double v : p) line += format_double(v) + ",";
    text += line + format_double(lambda_eps_eval(ctx, u, p)) + "\n";
  }
  emit(g, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph Laplacian eigenvalue experiments on sampled manifolds"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--threads", g.threads, "Worker threads for trial loops");
  app.add_option("--out", g.out, "Output path, - for stdout");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::string manifold = "circle", density = "const";
  std::size_t n = 1000;
  auto* sample = app.add_subcommand("sample", "Draw an i.i.d. point cloud");
  sample->add_option("--manifold", manifold)->check(CLI::IsMember({"circle", "torus", "sphere", "square", "singular"}));
  sample->add_option("--density", density);
  sample->add_option("--n", n)->required();

  std::string in, eps_text = "auto", kernel = "indicator", metric = "ambient";
  auto* graph = app.add_subcommand("graph", "Build the eps-neighbourhood graph of a cloud");
  graph->add_option("--in", in)->required();
  graph->add_option("--eps", eps_text);
  graph->add_option("--kernel", kernel);
  graph->add_option("--metric", metric);

  std::size_t k = 4;
  bool normalized = false, with_n = false;
  auto* spectrum = app.add_subcommand("spectrum", "Smallest eigenvalues of a stored graph");
  spectrum->add_option("--in", in)->required();
  spectrum->add_option("--k", k);
  spectrum->add_flag("--normalized", normalized);
  spectrum->add_flag("--rescale-with-n", with_n, "Normalized mode: keep the extra 1/n");

  ExperimentArgs ea;
  auto add_experiment = [&](CLI::App* sub) {
    sub->add_option("--manifold", ea.manifold);
    sub->add_option("--density", ea.density);
    sub->add_option("--kernel", ea.kernel);
    sub->add_option("--mode", ea.mode)->check(CLI::IsMember({"unnormalized", "normalized"}));
    sub->add_option("--n-grid", ea.n_grid);
    sub->add_option("--trials", ea.trials);
    sub->add_option("--eps", ea.eps);
  };
  auto* converge = app.add_subcommand("converge", "Eigenvalue convergence sweep over n");
  add_experiment(converge);
  converge->add_option("--k-max", ea.k_max);
  converge->add_option("--oracle-grid", ea.oracle_grid);
  converge->add_flag("--rescale-with-n", ea.with_n);

  std::size_t k_lo = 1, l_hi = 2;
  double threshold = 0.1;
  auto* align = app.add_subcommand("align", "Eigenvector subspace alignment");
  add_experiment(align);
  align->add_option("--k", k_lo);
  align->add_option("--l", l_hi);
  align->add_option("--threshold", threshold);

  double alpha = 0.0, radius = 1.0;
  int m = 2, quad = 256;
  std::string eps_grid = "0.2,0.1,0.05,0.025";
  auto* sens = app.add_subcommand("sensitivity", "Pointwise and L1 failure of L_eps at corners");
  sens->add_option("--alpha", alpha);
  sens->add_option("--r", radius);
  sens->add_option("--m", m);
  sens->add_option("--eps-grid", eps_grid);
  sens->add_option("--quad", quad);

  std::string theta = "geometric:0.5";
  int level = 12;
  auto* dyadic = app.add_subcommand("dyadic", "Dyadic profile values, slopes and jumps");
  dyadic->add_option("--theta", theta);
  dyadic->add_option("--level", level);

  int kernel_m = 1;
  auto* info = app.add_subcommand("kernel-info", "Kernel normalization constants");
  info->add_option("--kernel", kernel);
  info->add_option("--m", kernel_m);

  std::string cloud_path, u_path, query = "grid:100";
  double interp_eps = 0.1;
  auto* interp = app.add_subcommand("interp", "Evaluate the interpolation operator on a chart grid");
  interp->add_option("--cloud", cloud_path)->required();
  interp->add_option("--u", u_path)->required();
  interp->add_option("--query", query);
  interp->add_option("--eps", interp_eps)->required();
  interp->add_option("--kernel", kernel);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*sample) run_sample(g, manifold, density, n);
    else if (*graph) run_graph(g, in, eps_text, kernel, metric);
    else if (*spectrum) run_spectrum(g, in, k, normalized, with_n);
    else if (*converge) run_converge(g, ea);
    else if (*align) run_align(g, ea, k_lo, l_hi, threshold);
    else if (*sens) run_sensitivity(g, alpha, radius, m, eps_grid, quad);
    else if (*dyadic) run_dyadic(g, theta, level);
    else if (*info) run_kernel_info(g, kernel, kernel_m);
    else if (*interp) run_interp(g, cloud_path, u_path, query, interp_eps, kernel);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::SolverFailure ? kExitSolver : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
