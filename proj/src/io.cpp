#include "lapeig/io.hpp"

#include "lapeig/errors.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#ifndef LAPEIG_GIT_DESCRIBE
#define LAPEIG_GIT_DESCRIBE "unknown"
#endif

namespace lapeig {

using nlohmann::json;

namespace {

json matrix_rows(const RowMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

RowMatrix rows_matrix(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidArgument, "expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j[0].size());
  RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::DimensionMismatch, "ragged point array");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <class F>
auto wrap_json(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed JSON input: ") + e.what());
  }
}

}  // namespace

ReportFormat parse_format(std::string_view text) {
  if (text == "csv") return ReportFormat::CSV;
  if (text == "json") return ReportFormat::JSON;
  throw Error(ErrorCode::InvalidArgument, "format must be csv or json");
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json cloud_to_json(const PointCloud& cloud) {
  return {{"manifold", cloud.model.name()},
          {"density", cloud.model.density().name()},
          {"seed", cloud.seed},
          {"n", cloud.size()},
          {"points_ambient", matrix_rows(cloud.ambient)},
          {"params_intrinsic", matrix_rows(cloud.params)}};
}

PointCloud cloud_from_json(const json& j) {
  return wrap_json([&] {
    const ManifoldModel model =
        ManifoldModel::parse(j.at("manifold").get<std::string>(), j.value("density", std::string("const")));
    RowMatrix params = rows_matrix(j.at("params_intrinsic"));
    if (params.cols() != model.intrinsic_dim()) {
      throw Error(ErrorCode::DimensionMismatch, "chart coordinates do not match the manifold dimension");
    }
    if (j.contains("n") && j.at("n").get<std::size_t>() != static_cast<std::size_t>(params.rows())) {
      throw Error(ErrorCode::DimensionMismatch, "n differs from the number of points");
    }
    return make_cloud(model, std::move(params), j.value("seed", std::uint64_t{0}));
  });
}

json graph_to_json(const NeighborhoodGraph& graph) {
  json triplets = json::array();
  for (const auto& e : graph.entries()) triplets.push_back(json::array({e.row, e.col, e.value}));
  return {{"n", graph.size()},
          {"eps", graph.eps()},
          {"kernel", graph.kernel().name()},
          {"m", graph.intrinsic_dim()},
          {"metric", graph.metric() == MetricKind::Ambient ? "ambient" : "intrinsic"},
          {"triplets", std::move(triplets)}};
}

NeighborhoodGraph graph_from_json(const json& j) {
  return wrap_json([&] {
    const auto n = j.at("n").get<std::size_t>();
    const double eps = j.at("eps").get<double>();
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    std::vector<Eigen::Triplet<double>> trips;
    for (const auto& t : j.at("triplets")) {
      const auto r = t.at(0).get<std::size_t>();
      const auto c = t.at(1).get<std::size_t>();
      if (r >= n || c >= n) throw Error(ErrorCode::DimensionMismatch, "triplet index out of range");
      trips.emplace_back(static_cast<int>(r), static_cast<int>(c), t.at(2).get<double>());
    }
    SparseMatrix k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    k.setFromTriplets(trips.begin(), trips.end());
    const MetricKind metric = j.value("metric", std::string("ambient")) == "intrinsic" ? MetricKind::Intrinsic
                                                                                       : MetricKind::Ambient;
    return NeighborhoodGraph(std::move(k), eps, KernelProfile::parse(j.value("kernel", std::string("indicator"))),
                             j.value("m", 1), metric);
  });
}

json config_to_json(const ExperimentConfig& c) {
  return {{"manifold", c.manifold},
          {"density", c.density},
          {"kernel", c.kernel},
          {"mode", to_string(c.mode)},
          {"k_max", c.k_max},
          {"n_grid", c.n_grid},
          {"trials", c.trials},
          {"master_seed", c.master_seed},
          {"eps", c.eps_rule.name()},
          {"oracle_grid", c.oracle_grid},
          {"rescale_with_n", c.rescale_with_n},
          {"threads", c.threads}};
}

ExperimentConfig config_from_json(const json& j) {
  return wrap_json([&] {
    ExperimentConfig c;
    c.manifold = j.value("manifold", c.manifold);
    c.density = j.value("density", c.density);
    c.kernel = j.value("kernel", c.kernel);
    c.mode = parse_mode(j.value("mode", std::string(to_string(c.mode))));
    c.k_max = j.value("k_max", c.k_max);
    c.n_grid = j.value("n_grid", c.n_grid);
    c.trials = j.value("trials", c.trials);
    c.master_seed = j.value("master_seed", c.master_seed);
    c.eps_rule = EpsRule::parse(j.value("eps", c.eps_rule.name()));
    c.oracle_grid = j.value("oracle_grid", c.oracle_grid);
    c.rescale_with_n = j.value("rescale_with_n", c.rescale_with_n);
    c.threads = j.value("threads", c.threads);
    return c;
  });
}

std::string report_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "n,trial,k,eps,raw,rescaled,target,rel_error\n";
  for (const auto& r : report.rows) {
    os << r.n << ',' << r.trial << ',' << r.k << ',' << format_double(r.eps) << ',' << format_double(r.raw) << ','
       << format_double(r.rescaled) << ',' << format_double(r.target) << ',' << format_double(r.rel_error) << '\n';
  }
  return os.str();
}

json report_to_json(const ConvergenceReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"n", r.n},
                    {"trial", r.trial},
                    {"k", r.k},
                    {"eps", r.eps},
                    {"raw", r.raw},
                    {"rescaled", r.rescaled},
                    {"target", r.target},
                    {"rel_error", r.rel_error}});
  }
  json failures = json::array();
  for (const auto& f : report.failures) failures.push_back({{"n", f.n}, {"trial", f.trial}, {"message", f.message}});
  json summaries = json::array();
  for (const auto& s : report.summaries) {
    summaries.push_back(
        {{"n", s.n}, {"eps", s.eps}, {"median", s.median}, {"iqr", s.iqr}, {"median_error", s.median_error}});
  }
  return {{"metadata", {{"config", config_to_json(report.config)}, {"git_describe", git_describe()}, {"timestamp", utc_timestamp()}}},
          {"targets", report.targets},
          {"rows", std::move(rows)},
          {"failures", std::move(failures)},
          {"summaries", std::move(summaries)}};
}

ConvergenceReport report_from_json(const json& j) {
  return wrap_json([&] {
    ConvergenceReport r;
    r.config = config_from_json(j.at("metadata").at("config"));
    r.targets = j.at("targets").get<std::vector<double>>();
    for (const auto& row : j.at("rows")) {
      ConvergenceRow c;
      c.n = row.at("n").get<std::size_t>();
      c.trial = row.at("trial").get<std::size_t>();
      c.k = row.at("k").get<std::size_t>();
      c.eps = row.at("eps").get<double>();
      c.raw = row.at("raw").get<double>();
      c.rescaled = row.at("rescaled").get<double>();
      c.target = row.at("target").get<double>();
      c.rel_error = row.at("rel_error").get<double>();
      r.rows.push_back(c);
    }
    for (const auto& f : j.value("failures", json::array())) {
      r.failures.push_back({f.at("n").get<std::size_t>(), f.at("trial").get<std::size_t>(),
                            f.at("message").get<std::string>()});
    }
    r.summaries = summarize(r.rows, r.config.k_max);
    return r;
  });
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoFailure, "cannot open for writing: " + path);
  os << text;
  if (!os) throw Error(ErrorCode::IoFailure, "write failed: " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::IoFailure, "cannot open: " + path);
  return wrap_json([&] { return json::parse(is); });
}

void emit_report(const ConvergenceReport& report, const std::string& path, ReportFormat format) {
  write_text_file(path, format == ReportFormat::CSV ? report_csv(report) : report_to_json(report).dump(2) + "\n");
}

ConvergenceReport read_report_json(const std::string& path) { return report_from_json(read_json_file(path)); }

const char* git_describe() noexcept { return LAPEIG_GIT_DESCRIBE; }

}  // namespace lapeig
