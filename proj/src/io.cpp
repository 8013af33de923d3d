#include "liplab/io.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace liplab::io {
namespace {

using nlohmann::json;

std::string quote(const std::string& s) { return json(s).dump(); }

std::string json_number(double x) { return std::isfinite(x) ? format_double(x) : "null"; }

std::string json_bool(bool b) { return b ? "true" : "false"; }

template <typename Range, typename Fn>
std::string join(const Range& range, Fn&& fn, const char* sep = ", ") {
  std::string out;
  bool first = true;
  for (const auto& item : range) {
    if (!first) out += sep;
    out += fn(item);
    first = false;
  }
  return out;
}

std::string json_array(const VectorX<double>& v) {
  std::string out = "[";
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += json_number(v(i));
  }
  return out + "]";
}

double as_double(const json& value, const char* what) {
  if (value.is_null()) return std::numeric_limits<double>::infinity();
  if (!value.is_number()) throw FormatError(std::string(what) + " must be a number");
  return value.get<double>();
}

Index as_index(const json& value, const char* what) {
  if (!value.is_number_integer()) throw FormatError(std::string(what) + " must be an integer");
  return static_cast<Index>(value.get<std::int64_t>());
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && errno != ERANGE;
}

MatrixX<double> hop_metric(Index n, const std::vector<Edge>& edges) {
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(n));
  for (const Edge& e : edges) {
    adj[static_cast<std::size_t>(e.u)].push_back(e.v);
    adj[static_cast<std::size_t>(e.v)].push_back(e.u);
  }
  MatrixX<double> d = MatrixX<double>::Constant(n, n, std::numeric_limits<double>::infinity());
  for (Index s = 0; s < n; ++s) {
    std::deque<Index> queue{s};
    d(s, s) = 0;
    while (!queue.empty()) {
      const Index u = queue.front();
      queue.pop_front();
      for (Index v : adj[static_cast<std::size_t>(u)]) {
        if (std::isinf(d(s, v))) {
          d(s, v) = d(s, u) + 1;
          queue.push_back(v);
        }
      }
    }
  }
  return d;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

MetricSpace<double> read_space(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("space file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("points") || !doc["points"].is_array())
    throw FormatError("space file needs a \"points\" array");

  const auto& points = doc["points"];
  const auto n = static_cast<Index>(points.size());
  if (n < 1) throw FormatError("space file has no points");

  VectorX<double> mass(n);
  std::vector<std::optional<std::string>> labels(static_cast<std::size_t>(n));
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  bool any_label = false;
  for (const auto& p : points) {
    if (!p.is_object() || !p.contains("id") || !p.contains("mass"))
      throw FormatError("each point needs \"id\" and \"mass\"");
    const Index id = as_index(p["id"], "point id");
    if (id < 0 || id >= n || seen[static_cast<std::size_t>(id)])
      throw FormatError("point ids must cover [0, n) exactly once");
    seen[static_cast<std::size_t>(id)] = true;
    mass(id) = as_double(p["mass"], "point mass");
    if (p.contains("label") && !p["label"].is_null()) {
      if (!p["label"].is_string()) throw FormatError("point label must be a string");
      labels[static_cast<std::size_t>(id)] = p["label"].get<std::string>();
      any_label = true;
    }
  }
  if (!any_label) labels.clear();

  std::vector<Edge> edges;
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw FormatError("\"edges\" must be an array");
    for (const auto& e : doc["edges"]) {
      if (!e.is_object() || !e.contains("u") || !e.contains("v")) throw FormatError("each edge needs \"u\" and \"v\"");
      edges.push_back({as_index(e["u"], "edge u"), as_index(e["v"], "edge v")});
    }
  }
  for (const Edge& e : edges)
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) throw FormatError("edge endpoint out of range");

  const std::string kind = doc.value("metric", std::string("explicit"));
  MatrixX<double> dist;
  if (kind == "graph") {
    dist = hop_metric(n, edges);
  } else if (kind == "explicit") {
    if (!doc.contains("dist") || !doc["dist"].is_array())
      throw FormatError("explicit metric needs a \"dist\" array");
    const auto& d = doc["dist"];
    dist.resize(n, n);
    if (!d.empty() && !d[0].is_array()) {
      if (static_cast<Index>(d.size()) != n * n) throw FormatError("flat dist must have n*n entries");
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) dist(i, j) = as_double(d[static_cast<std::size_t>(i * n + j)], "dist entry");
    } else {
      if (static_cast<Index>(d.size()) != n) throw FormatError("dist must have n rows");
      for (Index i = 0; i < n; ++i) {
        const auto& row = d[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != n) throw FormatError("dist rows must have n entries");
        for (Index j = 0; j < n; ++j) dist(i, j) = as_double(row[static_cast<std::size_t>(j)], "dist entry");
      }
    }
  } else {
    throw FormatError("metric must be \"graph\" or \"explicit\"");
  }

  try {
    return {std::move(dist), std::move(edges), std::move(mass), std::move(labels)};
  } catch (const InvalidSpace& e) {
    throw FormatError(e.what());
  }
}

MetricSpace<double> read_space_file(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  return read_space(in);
}

void write_space(std::ostream& out, const MetricSpace<double>& space) {
  const Index n = space.size();
  out << "{\n  \"metric\": \"explicit\",\n  \"points\": [\n";
  for (Index i = 0; i < n; ++i) {
    out << "    {\"id\": " << i << ", \"mass\": " << format_double(space.mass()(i));
    if (!space.labels().empty() && space.labels()[static_cast<std::size_t>(i)])
      out << ", \"label\": " << quote(*space.labels()[static_cast<std::size_t>(i)]);
    out << (i + 1 < n ? "},\n" : "}\n");
  }
  out << "  ],\n  \"edges\": [";
  const auto& edges = space.edges();
  for (std::size_t e = 0; e < edges.size(); ++e)
    out << (e ? ",\n" : "\n") << "    {\"u\": " << edges[e].u << ", \"v\": " << edges[e].v << "}";
  out << (edges.empty() ? "],\n" : "\n  ],\n") << "  \"dist\": [\n";
  for (Index i = 0; i < n; ++i) {
    out << "    [";
    for (Index j = 0; j < n; ++j) out << (j ? ", " : "") << json_number(space.dist(i, j));
    out << (i + 1 < n ? "],\n" : "]\n");
  }
  out << "  ]\n}\n";
}

ScalarField<double> read_field(std::istream& in, Index n) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "point_id,value")
    throw FormatError("field file must start with header \"point_id,value\"");
  ScalarField<double> values(n);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  Index rows = 0;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError("field row needs two columns: " + line);
    const std::string id_text = trim(line.substr(0, comma));
    const std::string value_text = trim(line.substr(comma + 1));
    char* end = nullptr;
    const long long id = std::strtoll(id_text.c_str(), &end, 10);
    if (id_text.empty() || end != id_text.c_str() + id_text.size()) throw FormatError("bad point id: " + id_text);
    double value = 0;
    if (!parse_double(value_text, value) || !std::isfinite(value))
      throw FormatError("field value must be a finite number: " + value_text);
    if (id < 0 || id >= n) throw IdMismatch("field id " + id_text + " is not a point of the space");
    if (seen[static_cast<std::size_t>(id)]) throw IdMismatch("field id " + id_text + " appears twice");
    seen[static_cast<std::size_t>(id)] = true;
    values(static_cast<Index>(id)) = value;
    ++rows;
  }
  if (rows != n) throw IdMismatch("field has " + std::to_string(rows) + " rows, space has " + std::to_string(n) + " points");
  return values;
}

ScalarField<double> read_field_file(const std::filesystem::path& path, Index n) {
  std::istringstream in(read_file(path));
  return read_field(in, n);
}

void write_field(std::ostream& out, const ScalarField<double>& field) {
  out << "point_id,value\n";
  for (Index i = 0; i < field.size(); ++i) out << i << ',' << format_double(field(i)) << '\n';
}

void write_matrix_csv(std::ostream& out, const MatrixX<double>& matrix) {
  for (Index j = 0; j < matrix.cols(); ++j) out << (j ? "," : "") << j;
  out << '\n';
  for (Index i = 0; i < matrix.rows(); ++i) {
    for (Index j = 0; j < matrix.cols(); ++j) out << (j ? "," : "") << format_double(matrix(i, j));
    out << '\n';
  }
}

void write_lip_profile(std::ostream& out, const LipProfile<double>& profile) {
  out << "{\n  \"h\": " << json_number(profile.h) << ",\n  \"lip\": " << json_array(profile.lip)
      << ",\n  \"h_used\": " << json_array(profile.h_used) << ",\n  \"max\": " << json_number(profile.max())
      << "\n}\n";
}

void write_space_report(std::ostream& out, const SpaceReport<double>& report) {
  auto kind_name = [](ViolationKind k) {
    switch (k) {
      case ViolationKind::Identity: return "identity";
      case ViolationKind::Symmetry: return "symmetry";
      case ViolationKind::Positivity: return "positivity";
      case ViolationKind::Triangle: return "triangle";
    }
    return "unknown";
  };
  const auto& qc = report.quasi_convexity;
  out << "{\n  \"metric_ok\": " << json_bool(report.metric.metric_ok)
      << ",\n  \"violation_count\": " << report.metric.violation_count << ",\n  \"violations\": ["
      << join(report.metric.violations,
              [&](const Violation& v) {
                std::string s = std::string("{\"kind\": \"") + kind_name(v.kind) + "\", \"i\": " +
                                std::to_string(v.i) + ", \"j\": " + std::to_string(v.j);
                if (v.k >= 0) s += ", \"k\": " + std::to_string(v.k);
                return s + "}";
              })
      << "],\n  \"connected\": " << json_bool(qc.connected) << ",\n  \"C\": "
      << (qc.connected ? format_double(qc.C) : std::string("\"inf\"")) << ",\n  \"worst_pair\": ";
  if (qc.worst_pair)
    out << "[" << qc.worst_pair->first << ", " << qc.worst_pair->second << "]";
  else
    out << "null";
  out << "\n}\n";
}

void write_perturb_report(std::ostream& out, const PerturbParams<double>& params, const PerturbResult<double>& result) {
  const auto& v = result.verification;
  out << "{\n"
      << "  \"epsilon\": " << json_number(result.epsilon) << ",\n"
      << "  \"lambda\": " << json_number(result.lambda) << ",\n"
      << "  \"M\": " << json_number(result.M) << ",\n"
      << "  \"C\": " << json_number(result.C) << ",\n"
      << "  \"tau\": " << json_number(params.tau) << ",\n"
      << "  \"h\": " << json_number(params.h.h) << ",\n"
      << "  \"delta\": " << json_number(params.delta) << ",\n"
      << "  \"r\": " << json_number(params.r) << ",\n"
      << "  \"dinf_distance\": " << json_number(v.dinf_distance) << ",\n"
      << "  \"singular_measure_before\": " << json_number(v.singular_measure_before) << ",\n"
      << "  \"singular_measure_after\": " << json_number(v.singular_measure_after) << ",\n"
      << "  \"flags\": {\n"
      << "    \"norm_ok\": " << json_bool(v.norm_ok) << ",\n"
      << "    \"measure_ok\": " << json_bool(v.measure_ok) << ",\n"
      << "    \"inclusion_ok\": " << json_bool(v.inclusion_ok) << ",\n"
      << "    \"atom_free\": " << json_bool(v.atom_free) << ",\n"
      << "    \"empty_k_fallback\": " << json_bool(result.empty_k_fallback) << ",\n"
      << "    \"epsilon_warning\": " << json_bool(result.epsilon_warning) << "\n"
      << "  }\n}\n";
}

void write_verify_report(std::ostream& out, const PerturbParams<double>& params, double epsilon,
                         const VerifyReport<double>& v) {
  out << "{\n"
      << "  \"epsilon\": " << json_number(epsilon) << ",\n"
      << "  \"tau\": " << json_number(params.tau) << ",\n"
      << "  \"h\": " << json_number(params.h.h) << ",\n"
      << "  \"delta\": " << json_number(params.delta) << ",\n"
      << "  \"r\": " << json_number(params.r) << ",\n"
      << "  \"dinf_distance\": " << json_number(v.dinf_distance) << ",\n"
      << "  \"singular_measure_before\": " << json_number(v.singular_measure_before) << ",\n"
      << "  \"singular_measure_after\": " << json_number(v.singular_measure_after) << ",\n"
      << "  \"flags\": {\n"
      << "    \"norm_ok\": " << json_bool(v.norm_ok) << ",\n"
      << "    \"measure_ok\": " << json_bool(v.measure_ok) << ",\n"
      << "    \"inclusion_ok\": " << json_bool(v.inclusion_ok) << ",\n"
      << "    \"atom_free\": " << json_bool(v.atom_free) << "\n"
      << "  }\n}\n";
}

double read_report_epsilon(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("report is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("epsilon")) throw FormatError("report has no \"epsilon\"");
  return as_double(doc["epsilon"], "epsilon");
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return buf.str();
}

}  // namespace liplab::io
