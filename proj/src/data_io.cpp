#include "dcclust/data_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <limits>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

namespace dcclust {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

}  // namespace

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

// ---------------------------------------------------------------- TSPLIB

Dataset parse_tsplib(std::istream& in, const std::string& source) {
  std::optional<std::int64_t> dimension;
  std::string line;
  std::size_t lineno = 0;
  bool in_section = false;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (upper(t) == "EOF") throw ParseError(source, lineno, "EOF before NODE_COORD_SECTION");
    if (upper(t).rfind("NODE_COORD_SECTION", 0) == 0) {
      in_section = true;
      break;
    }
    const auto colon = t.find(':');
    if (colon == std::string::npos) throw ParseError(source, lineno, "expected 'KEY : VALUE' header, got '" + t + "'");
    const std::string key = upper(trim(std::string_view(t).substr(0, colon)));
    const std::string value = trim(std::string_view(t).substr(colon + 1));
    if (key == "DIMENSION") {
      double v = 0.0;
      if (!parse_double(value, v) || v < 1 || v != std::floor(v))
        throw ParseError(source, lineno, "invalid DIMENSION '" + value + "'");
      dimension = static_cast<std::int64_t>(v);
    } else if (key == "EDGE_WEIGHT_TYPE" || key == "NODE_COORD_TYPE") {
      const std::string v = upper(value);
      if (v.find("3D") != std::string::npos)
        throw ParseError(source, lineno, "only two-dimensional coordinates are supported (" + key + " " + value + ")");
    }
  }
  if (!in_section) throw ParseError(source, lineno, "missing NODE_COORD_SECTION");
  if (!dimension) throw ParseError(source, lineno, "missing DIMENSION header");

  const auto m = static_cast<Eigen::Index>(*dimension);
  Dataset data;
  data.points.resize(m, 2);
  data.source = source;
  std::vector<bool> seen(static_cast<std::size_t>(m), false);
  Eigen::Index filled = 0;
  while (filled < m && std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (upper(t) == "EOF") break;
    const std::vector<std::string> tok = tokens(t);
    double idx = 0.0, x = 0.0, y = 0.0;
    if (tok.size() != 3 || !parse_double(tok[0], idx) || !parse_double(tok[1], x) || !parse_double(tok[2], y))
      throw ParseError(source, lineno, "malformed coordinate line '" + t + "'");
    if (idx != std::floor(idx) || idx < 1 || idx > static_cast<double>(m))
      throw ParseError(source, lineno, "node index out of range 1.." + std::to_string(m));
    const auto row = static_cast<Eigen::Index>(idx) - 1;
    if (seen[static_cast<std::size_t>(row)]) throw ParseError(source, lineno, "duplicate node index");
    seen[static_cast<std::size_t>(row)] = true;
    data.points(row, 0) = x;
    data.points(row, 1) = y;
    data.labels.push_back(tok[0]);
    ++filled;
  }
  if (filled < m) {
    throw ParseError(source, lineno,
                     "end of input after " + std::to_string(filled) + " of " + std::to_string(m) + " nodes");
  }
  // Labels follow row order, not file order.
  for (Eigen::Index i = 0; i < m; ++i) data.labels[static_cast<std::size_t>(i)] = std::to_string(i + 1);
  return data;
}

Dataset load_tsplib(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return parse_tsplib(in, path.string());
}

// ---------------------------------------------------------------- cities

Dataset parse_cities_csv(std::istream& in, const std::string& source, double radius_scale) {
  if (!(radius_scale > 0.0)) throw InputError("cities: radius scale must be positive");
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw ParseError(source, lineno, "missing header");

  std::map<std::string, std::size_t> col;
  for (std::size_t j = 0; j < header.size(); ++j) {
    std::string name = trim(header[j]);
    if (j == 0 && name.rfind("\xEF\xBB\xBF", 0) == 0) name = name.substr(3);
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    col[name] = j;
  }
  for (const char* required : {"name", "longitude", "latitude", "area_sq_miles"}) {
    if (!col.contains(required)) throw ParseError(source, lineno, std::string("missing column '") + required + "'");
  }
  const std::size_t c_name = col["name"], c_lon = col["longitude"], c_lat = col["latitude"],
                    c_area = col["area_sq_miles"];
  const std::size_t needed = std::max({c_name, c_lon, c_lat, c_area}) + 1;

  std::vector<std::array<double, 2>> centers;
  Dataset data;
  data.source = source;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() < needed) throw ParseError(source, lineno, "expected at least " + std::to_string(needed) + " fields");
    double lon = 0.0, lat = 0.0, area = 0.0;
    if (!parse_double(f[c_lon], lon)) throw ParseError(source, lineno, "non-numeric longitude '" + f[c_lon] + "'");
    if (!parse_double(f[c_lat], lat)) throw ParseError(source, lineno, "non-numeric latitude '" + f[c_lat] + "'");
    if (!parse_double(f[c_area], area)) throw ParseError(source, lineno, "non-numeric area '" + f[c_area] + "'");
    if (!(area > 0.0)) throw ParseError(source, lineno, "area must be positive");
    const double radius = radius_scale * std::sqrt(area / std::numbers::pi);
    Vector c(2);
    c << lon, lat;
    data.sets.push_back(ConvexSet::ball(c, radius));
    data.labels.push_back(trim(f[c_name]));
    centers.push_back({lon, lat});
  }
  if (centers.empty()) throw ParseError(source, lineno, "no data rows");
  data.points.resize(static_cast<Eigen::Index>(centers.size()), 2);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    data.points(static_cast<Eigen::Index>(i), 0) = centers[i][0];
    data.points(static_cast<Eigen::Index>(i), 1) = centers[i][1];
  }
  return data;
}

Dataset load_cities_csv(const std::filesystem::path& path, double radius_scale) {
  std::ifstream in = open_input(path);
  return parse_cities_csv(in, path.string(), radius_scale);
}

// ---------------------------------------------------------------- points

Dataset load_points_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  const std::string source = path.string();
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) {
      width = split_csv_line(line).size();
      break;
    }
  }
  if (width == 0) throw ParseError(source, lineno, "missing header");
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != width)
      throw ParseError(source, lineno, "expected " + std::to_string(width) + " fields, got " + std::to_string(f.size()));
    for (const std::string& s : f) {
      double v = 0.0;
      if (!parse_double(s, v)) throw ParseError(source, lineno, "non-numeric field '" + s + "'");
      values.push_back(v);
    }
  }
  if (values.empty()) throw ParseError(source, lineno, "no data rows");
  Dataset data;
  data.source = source;
  const auto rows = static_cast<Eigen::Index>(values.size() / width);
  data.points = Eigen::Map<Matrix>(values.data(), rows, static_cast<Eigen::Index>(width));
  return data;
}

void write_points_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  for (Eigen::Index j = 0; j < data.dim(); ++j) out << (j ? "," : "") << "x" << j;
  out << "\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) out << (j ? "," : "") << format_double(data.points(i, j));
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void RandomSpec::validate() const {
  if (n < 1) throw InputError("random data: n must be at least 1");
  if (dim < 1) throw InputError("random data: dimension must be at least 1");
  if (!std::isfinite(low) || !std::isfinite(high) || !(low < high))
    throw InputError("random data: need finite bounds with low < high");
}

Dataset generate_uniform(const RandomSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Dataset data;
  data.points.resize(spec.n, spec.dim);
  for (Eigen::Index i = 0; i < data.points.rows(); ++i)
    for (Eigen::Index j = 0; j < data.points.cols(); ++j) data.points(i, j) = rng.uniform(spec.low, spec.high);
  std::ostringstream os;
  os << "uniform(n=" << spec.n << ", dim=" << spec.dim << ", [" << spec.low << ", " << spec.high
     << "), seed=" << spec.seed << ")";
  data.source = os.str();
  return data;
}

// ---------------------------------------------------------------- reports

namespace {
constexpr const char* kBenchHeader = "run_id,seed,algorithm,iterations_total,wall_time_s,final_cost,stages,status";

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}
}  // namespace

void write_bench_csv(const std::vector<BenchRecord>& rows, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << kBenchHeader << "\n";
  for (const BenchRecord& r : rows) {
    out << csv_field(r.run_id) << ',' << r.seed << ',' << csv_field(r.algorithm) << ',' << r.iterations_total << ','
        << format_double(r.wall_time_s) << ',' << format_double(r.final_cost) << ',' << r.stages << ','
        << csv_field(r.status) << "\n";
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<BenchRecord> read_bench_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  const std::string source = path.string();
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || trim(line) != kBenchHeader) throw ParseError(source, 1, "unexpected benchmark header");
  std::vector<BenchRecord> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 8) throw ParseError(source, lineno, "expected 8 fields");
    BenchRecord r;
    r.run_id = f[0];
    r.algorithm = f[2];
    r.status = f[7];
    double iters = 0, stages = 0;
    const auto parse_u64 = [&](const std::string& s, std::uint64_t& v) {
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      return res.ec == std::errc() && res.ptr == s.data() + s.size();
    };
    if (!parse_u64(f[1], r.seed)) throw ParseError(source, lineno, "bad seed");
    if (!parse_double(f[3], iters) || !parse_double(f[6], stages)) throw ParseError(source, lineno, "bad count");
    r.iterations_total = static_cast<std::int64_t>(iters);
    r.stages = static_cast<std::int64_t>(stages);
    // final_cost may be "nan" for failed rows.
    const auto parse_any = [&](const std::string& s, double& v) {
      if (trim(s) == "nan") {
        v = std::numeric_limits<double>::quiet_NaN();
        return true;
      }
      return parse_double(s, v);
    };
    if (!parse_any(f[4], r.wall_time_s) || !parse_any(f[5], r.final_cost)) throw ParseError(source, lineno, "bad value");
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_report_json(const SolveReport& report, const std::filesystem::path& path, const std::string& algorithm) {
  using nlohmann::json;
  const auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  if (!algorithm.empty()) j["algorithm"] = algorithm;
  json X = json::array();
  for (Eigen::Index l = 0; l < report.final_X.rows(); ++l) {
    json row = json::array();
    for (Eigen::Index c = 0; c < report.final_X.cols(); ++c) row.push_back(report.final_X(l, c));
    X.push_back(row);
  }
  j["final_X"] = X;
  j["cost"] = num(report.cost);
  j["iterations_total"] = report.iterations_total;
  j["iterations_per_stage"] = report.iterations_per_stage;
  j["stage_taus"] = report.stage_taus;
  json terms = json::array();
  for (Termination t : report.stage_terminations) terms.push_back(to_string(t));
  j["stage_terminations"] = terms;
  j["wall_time_s"] = report.wall_time;
  j["termination"] = to_string(report.termination);
  json trace = json::array();
  for (const TraceEntry& e : report.objective_trace) {
    trace.push_back({{"stage", e.stage},
                     {"iteration", e.iteration},
                     {"tau", e.tau},
                     {"f", num(e.f)},
                     {"lambda", num(e.lambda)},
                     {"lambda_bar", num(e.lambda_bar)},
                     {"backtracks", e.backtracks}});
  }
  j["objective_trace"] = trace;
  std::ofstream out = open_output(path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_trace_csv(const SolveReport& report, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << "stage,iteration,tau,f,f_dca,lambda,lambda_bar,d_norm_sq,backtracks\n";
  for (const TraceEntry& e : report.objective_trace) {
    out << e.stage << ',' << e.iteration << ',' << format_double(e.tau) << ',' << format_double(e.f) << ','
        << format_double(e.f_dca) << ',' << format_double(e.lambda) << ',' << format_double(e.lambda_bar) << ','
        << format_double(e.d_norm_sq) << ',' << e.backtracks << "\n";
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace dcclust
