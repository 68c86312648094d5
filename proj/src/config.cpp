#include "dcclust/config.hpp"

#include "dcclust/clustering_model.hpp"
#include "dcclust/set_clustering_model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace dcclust {

using nlohmann::json;

namespace {

/// Typed access to one JSON object that remembers which keys were read,
/// so finish() can reject typos.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    return as_number(*v, field(key));
  }

  double number(const std::string& key) {
    if (!has(key)) throw ConfigError(field(key), "is required");
    return number(key, 0.0);
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    return as_integer(*v, field(key));
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = raw(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(field(key), "expected a string");
    return v->get<std::string>();
  }

  std::string text(const std::string& key) {
    if (!has(key)) throw ConfigError(field(key), "is required");
    return text(key, {});
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }
  }

  static double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw ConfigError(field, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
    return x;
  }

  static std::int64_t as_integer(const json& v, const std::string& field) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9.0e15) return static_cast<std::int64_t>(x);
    }
    throw ConfigError(field, "expected an integer");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Vector as_vector(const json& v, const std::string& field, Eigen::Index dim = -1) {
  if (!v.is_array() || v.empty()) throw ConfigError(field, "expected a nonempty array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = Section::as_number(v[i], field + "[" + std::to_string(i) + "]");
  if (dim >= 0 && out.size() != dim)
    throw ConfigError(field, "has " + std::to_string(out.size()) + " entries, expected " + std::to_string(dim));
  return out;
}

Matrix as_matrix(const json& v, const std::string& field, Eigen::Index cols = -1) {
  if (!v.is_array() || v.empty()) throw ConfigError(field, "expected a nonempty array of rows");
  std::vector<Vector> rows;
  for (std::size_t i = 0; i < v.size(); ++i) {
    rows.push_back(as_vector(v[i], field + "[" + std::to_string(i) + "]", cols));
    cols = rows.back().size();
  }
  Matrix M(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) M.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return M;
}

std::vector<int> as_int_list(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw ConfigError(field, "expected a nonempty array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    const std::int64_t x = Section::as_integer(v[i], f);
    if (x < 1 || x > std::numeric_limits<int>::max()) throw ConfigError(f, "must be a positive integer");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

std::vector<Algorithm> as_algorithms(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw ConfigError(field, "expected a nonempty array of algorithm names");
  std::vector<Algorithm> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    if (!v[i].is_string()) throw ConfigError(f, "expected a string");
    try {
      out.push_back(parse_algorithm(v[i].get<std::string>()));
    } catch (const InputError& e) {
      throw ConfigError(f, e.what());
    }
  }
  return out;
}

std::uint64_t as_seed(Section& s, const std::string& key, std::uint64_t fallback) {
  const json* v = s.raw(key);
  if (!v) return fallback;
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  const std::int64_t x = Section::as_integer(*v, s.field(key));
  if (x < 0) throw ConfigError(s.field(key), "must be nonnegative");
  return static_cast<std::uint64_t>(x);
}

int positive_int(Section& s, const std::string& key, int fallback, int min = 1) {
  const std::int64_t x = s.integer(key, fallback);
  if (x < min || x > std::numeric_limits<int>::max())
    throw ConfigError(s.field(key), "must be an integer >= " + std::to_string(min));
  return static_cast<int>(x);
}

Eigen::Index infer_dim(const json& j) {
  for (const char* key : {"center", "lower", "normal"}) {
    if (j.is_object() && j.contains(key) && j[key].is_array()) return static_cast<Eigen::Index>(j[key].size());
  }
  return -1;
}

DatasetConfig parse_dataset(const json& j, const std::filesystem::path& base_dir) {
  Section s(j, "dataset");
  DatasetConfig cfg;
  const std::string kind = s.text("kind");
  auto path = [&] {
    const std::filesystem::path p = s.text("path");
    return p.is_absolute() ? p : base_dir / p;
  };
  if (kind == "tsplib") {
    cfg.kind = DatasetKind::Tsplib;
    cfg.path = path();
  } else if (kind == "cities_csv") {
    cfg.kind = DatasetKind::CitiesCsv;
    cfg.path = path();
    cfg.radius_scale = s.number("radius_scale", 1.0);
    if (!(cfg.radius_scale > 0.0)) throw ConfigError(s.field("radius_scale"), "must be positive");
  } else if (kind == "points_csv") {
    cfg.kind = DatasetKind::PointsCsv;
    cfg.path = path();
  } else if (kind == "random") {
    cfg.kind = DatasetKind::Random;
    cfg.random.n = s.integer("n", 0);
    cfg.random.dim = s.integer("dim", 2);
    cfg.random.low = s.number("low", 0.0);
    cfg.random.high = s.number("high", 10.0);
    cfg.random.seed = as_seed(s, "seed", 1);
    try {
      cfg.random.validate();
    } catch (const InputError& e) {
      throw ConfigError("dataset", e.what());
    }
  } else if (kind == "inline") {
    cfg.kind = DatasetKind::Inline;
    const json* points = s.raw("points");
    const json* sets = s.raw("sets");
    if ((points == nullptr) == (sets == nullptr))
      throw ConfigError("dataset", "inline data needs exactly one of 'points' or 'sets'");
    cfg.inline_data.source = "inline";
    if (points) {
      cfg.inline_data.points = as_matrix(*points, "dataset.points");
    } else {
      if (!sets->is_array() || sets->empty()) throw ConfigError("dataset.sets", "expected a nonempty array");
      const Eigen::Index dim = infer_dim((*sets)[0]);
      if (dim < 1) throw ConfigError("dataset.sets[0]", "cannot infer the dimension (use a ball, box or halfspace)");
      Matrix pts(static_cast<Eigen::Index>(sets->size()), dim);
      for (std::size_t i = 0; i < sets->size(); ++i) {
        ConvexSet set = parse_set((*sets)[i], dim, "dataset.sets[" + std::to_string(i) + "]");
        pts.row(static_cast<Eigen::Index>(i)) = set.project(Vector::Zero(dim)).transpose();
        if (const Ball* b = std::get_if<Ball>(&set.shape())) pts.row(static_cast<Eigen::Index>(i)) = b->center.transpose();
        if (const Box* b = std::get_if<Box>(&set.shape()))
          pts.row(static_cast<Eigen::Index>(i)) = (0.5 * (b->lower + b->upper)).transpose();
        cfg.inline_data.sets.push_back(std::move(set));
      }
      cfg.inline_data.points = std::move(pts);
    }
  } else {
    throw ConfigError("dataset.kind", "unknown dataset kind '" + kind +
                                          "' (expected tsplib, cities_csv, points_csv, random or inline)");
  }
  s.finish();
  return cfg;
}

ProblemConfig parse_problem(const json& j) {
  Section s(j, "problem");
  ProblemConfig cfg;
  const std::string kind = s.text("kind", "clustering");
  if (kind == "clustering") {
    cfg.kind = ProblemKind::Clustering;
  } else if (kind == "set_clustering") {
    cfg.kind = ProblemKind::SetClustering;
  } else {
    throw ConfigError("problem.kind", "unknown problem kind '" + kind + "' (expected clustering or set_clustering)");
  }
  cfg.k = positive_int(s, "k", 0);
  if (const json* c = s.raw("constraints")) {
    if (!c->is_array()) throw ConfigError("problem.constraints", "expected an array with one entry per center");
    if (static_cast<int>(c->size()) != cfg.k)
      throw ConfigError("problem.constraints",
                        "has " + std::to_string(c->size()) + " entries but k = " + std::to_string(cfg.k));
    cfg.constraints = *c;
  } else {
    cfg.constraints = json::array();
    for (int l = 0; l < cfg.k; ++l) cfg.constraints.push_back(json::array());
  }
  if (const json* x0 = s.raw("initial_centers")) cfg.initial_centers = *x0;
  cfg.target_radius = s.number("target_radius", 0.0);
  if (!(cfg.target_radius >= 0.0)) throw ConfigError("problem.target_radius", "must be nonnegative");
  s.finish();
  return cfg;
}

void parse_solver(const json& j, Config& cfg) {
  Section s(j, "solver");
  SolverSettings& st = cfg.solver;
  const std::string algorithm = s.text("algorithm", "bdca");
  try {
    cfg.algorithm = parse_algorithm(algorithm);
  } catch (const InputError& e) {
    throw ConfigError("solver.algorithm", e.what());
  }
  st.alpha = s.number("alpha", st.alpha);
  st.beta = s.number("beta", st.beta);
  st.lambda_bar = s.number("lambda_bar", st.lambda_bar);
  st.gamma = s.number("gamma", st.gamma);
  st.lambda_bar_1 = s.number("lambda_bar_1", st.lambda_bar_1);
  st.schedule.tau0 = s.number("tau0", st.schedule.tau0);
  st.schedule.sigma = s.number("sigma", st.schedule.sigma);
  st.schedule.tau_f = s.number("tau_f", st.schedule.tau_f);
  st.stop.tol = s.number("tol", st.stop.tol);
  st.stop.max_inner_iters = s.integer("max_inner_iters", st.stop.max_inner_iters);
  st.stop.max_total_iters = s.integer("max_total_iters", st.stop.max_total_iters);
  cfg.seed = as_seed(s, "seed", cfg.seed);
  s.finish();
  auto need = [](bool ok, const char* key, const char* rule) {
    if (!ok) throw ConfigError(std::string("solver.") + key, rule);
  };
  need(st.alpha > 0.0, "alpha", "must be positive");
  need(st.beta > 0.0 && st.beta < 1.0, "beta", "must lie in (0, 1)");
  need(st.lambda_bar >= 0.0, "lambda_bar", "must be nonnegative");
  need(st.gamma > 1.0, "gamma", "must exceed 1");
  need(st.lambda_bar_1 > 0.0, "lambda_bar_1", "must be positive");
  need(st.schedule.tau0 > 0.0, "tau0", "must be positive");
  need(st.schedule.sigma > 1.0, "sigma", "must exceed 1");
  need(st.schedule.tau_f >= st.schedule.tau0, "tau_f", "must be at least tau0");
  need(st.stop.tol > 0.0, "tol", "must be positive");
  need(st.stop.max_inner_iters > 0, "max_inner_iters", "must be positive");
  need(st.stop.max_total_iters > 0, "max_total_iters", "must be positive");
  try {
    st.validate();
  } catch (const InputError& e) {
    throw ConfigError("solver", e.what());
  }
}

void parse_bench(const json& j, BenchConfig& cfg) {
  Section s(j, "bench");
  if (const json* a = s.raw("algorithms")) cfg.algorithms = as_algorithms(*a, "bench.algorithms");
  cfg.restarts = positive_int(s, "restarts", cfg.restarts);
  cfg.base_seed = as_seed(s, "base_seed", cfg.base_seed);
  cfg.warmup = positive_int(s, "warmup", cfg.warmup, 0);
  s.finish();
}

ScalingSpec parse_scaling(const json& j) {
  Section s(j, "scaling");
  ScalingSpec spec;
  const std::string tmpl = s.text("template", "clustering");
  if (tmpl == "clustering") {
    spec.problem = ScalingTemplate::Clustering;
  } else if (tmpl == "set_clustering") {
    spec.problem = ScalingTemplate::SetClustering;
  } else {
    throw ConfigError("scaling.template", "unknown template '" + tmpl + "' (expected clustering or set_clustering)");
  }
  if (const json* d = s.raw("dims")) spec.dims = as_int_list(*d, "scaling.dims");
  if (const json* c = s.raw("counts")) spec.counts = as_int_list(*c, "scaling.counts");
  if (const json* a = s.raw("algorithms")) spec.algorithms = as_algorithms(*a, "scaling.algorithms");
  if (std::find(spec.algorithms.begin(), spec.algorithms.end(), Algorithm::Dca) == spec.algorithms.end())
    throw ConfigError("scaling.algorithms", "must include dca as the ratio reference");
  spec.restarts = positive_int(s, "restarts", spec.restarts);
  spec.base_seed = as_seed(s, "base_seed", spec.base_seed);
  spec.low = s.number("low", spec.low);
  spec.high = s.number("high", spec.high);
  if (!(spec.low < spec.high)) throw ConfigError("scaling", "low must be below high");
  spec.target_radius = s.number("target_radius", spec.target_radius);
  if (!(spec.target_radius > 0.0)) throw ConfigError("scaling.target_radius", "must be positive");
  spec.warmup = positive_int(s, "warmup", spec.warmup, 0);
  if (spec.problem == ScalingTemplate::SetClustering) {
    for (int d : spec.dims)
      if (d > 10) throw ConfigError("scaling.dims", "the set clustering template supports dimensions up to 10");
  }
  s.finish();
  return spec;
}

void parse_output(const json& j, OutputConfig& out, const std::filesystem::path& base_dir) {
  Section s(j, "output");
  if (s.has("dir")) {
    const std::filesystem::path p = s.text("dir");
    out.dir = p.is_absolute() ? p : base_dir / p;
  }
  out.report_json = s.text("report_json", out.report_json);
  out.trace_csv = s.text("trace_csv", out.trace_csv);
  out.bench_csv = s.text("bench_csv", out.bench_csv);
  out.summary_json = s.text("summary_json", out.summary_json);
  out.scaling_csv = s.text("scaling_csv", out.scaling_csv);
  out.dataset_csv = s.text("dataset_csv", out.dataset_csv);
  s.finish();
}

}  // namespace

ConvexSet parse_set(const json& j, Eigen::Index dim, const std::string& field) {
  Section s(j, field);
  const std::string kind = s.text("kind");
  try {
    ConvexSet set = [&] {
      if (kind == "ball") {
        const json* c = s.raw("center");
        if (!c) throw ConfigError(s.field("center"), "is required");
        const double r = s.number("radius");
        if (!(r > 0.0)) throw ConfigError(s.field("radius"), "must be positive");
        return ConvexSet::ball(as_vector(*c, s.field("center"), dim), r);
      }
      if (kind == "box") {
        if (!s.has("lower") || !s.has("upper")) throw ConfigError(field, "a box needs 'lower' and 'upper'");
        Vector lo = as_vector(*s.raw("lower"), s.field("lower"), dim);
        Vector hi = as_vector(*s.raw("upper"), s.field("upper"), dim);
        return ConvexSet::box(std::move(lo), std::move(hi));
      }
      if (kind == "halfspace") {
        if (!s.has("normal")) throw ConfigError(s.field("normal"), "is required");
        Vector n = as_vector(*s.raw("normal"), s.field("normal"), dim);
        return ConvexSet::halfspace(std::move(n), s.number("offset"));
      }
      if (kind == "whole_space") {
        if (dim < 1) throw ConfigError(field, "whole_space needs a known dimension");
        return ConvexSet::whole_space(dim);
      }
      throw ConfigError(s.field("kind"),
                        "unknown set kind '" + kind + "' (expected ball, box, halfspace or whole_space)");
    }();
    s.finish();
    return set;
  } catch (const ConfigError&) {
    throw;
  } catch (const InputError& e) {
    throw ConfigError(field, e.what());
  }
}

Config parse_config(const json& doc, const std::filesystem::path& base_dir) {
  Section s(doc, "");
  Config cfg;
  cfg.name = s.text("name", cfg.name);
  if (cfg.name.empty() || cfg.name.find_first_of("/\\,\"") != std::string::npos)
    throw ConfigError("name", "must be nonempty without path separators, commas or quotes");
  if (const json* d = s.raw("dataset")) cfg.dataset = parse_dataset(*d, base_dir);
  if (const json* p = s.raw("problem")) cfg.problem = parse_problem(*p);
  if (const json* v = s.raw("solver")) parse_solver(*v, cfg);
  if (const json* b = s.raw("bench")) parse_bench(*b, cfg.bench);
  if (const json* c = s.raw("scaling")) {
    cfg.scaling = parse_scaling(*c);
    cfg.scaling->solver = cfg.solver;
  }
  cfg.output.dir = std::filesystem::path("out") / cfg.name;
  if (const json* o = s.raw("output")) parse_output(*o, cfg.output, base_dir);
  s.finish();
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc, path.parent_path());
}

Dataset load_dataset(const DatasetConfig& cfg) {
  switch (cfg.kind) {
    case DatasetKind::Tsplib: return load_tsplib(cfg.path);
    case DatasetKind::CitiesCsv: return load_cities_csv(cfg.path, cfg.radius_scale);
    case DatasetKind::PointsCsv: return load_points_csv(cfg.path);
    case DatasetKind::Random: return generate_uniform(cfg.random);
    case DatasetKind::Inline: return cfg.inline_data;
  }
  throw ConfigError("dataset.kind", "unhandled dataset kind");
}

BuiltProblem build_problem(const Config& cfg) {
  if (!cfg.dataset) throw ConfigError("dataset", "is required");
  if (!cfg.problem) throw ConfigError("problem", "is required");
  const ProblemConfig& pc = *cfg.problem;
  BuiltProblem out;
  out.data = load_dataset(*cfg.dataset);
  const Eigen::Index dim = out.data.dim();
  if (out.data.size() < 1 || dim < 1) throw ConfigError("dataset", "contains no data");

  std::vector<std::vector<ConvexSet>> per_center;
  for (std::size_t l = 0; l < pc.constraints.size(); ++l) {
    const std::string f = "problem.constraints[" + std::to_string(l) + "]";
    const json& entry = pc.constraints[l];
    std::vector<ConvexSet> sets;
    if (entry.is_object()) {
      sets.push_back(parse_set(entry, dim, f));
    } else if (entry.is_array()) {
      for (std::size_t j = 0; j < entry.size(); ++j)
        sets.push_back(parse_set(entry[j], dim, f + "[" + std::to_string(j) + "]"));
    } else {
      throw ConfigError(f, "expected a set descriptor or an array of them");
    }
    per_center.push_back(std::move(sets));
  }
  try {
    out.constraints = std::make_shared<const ConstraintSystem>(std::move(per_center), dim);
  } catch (const InputError& e) {
    throw ConfigError("problem.constraints", e.what());
  }

  if (!pc.initial_centers.is_null()) {
    Matrix X0 = as_matrix(pc.initial_centers, "problem.initial_centers", dim);
    if (X0.rows() != pc.k) throw ConfigError("problem.initial_centers", "needs exactly k rows");
    out.initial_centers = std::move(X0);
  }

  if (pc.kind == ProblemKind::Clustering) {
    out.problem = std::make_shared<const ClusteringProblem>(out.data.points, *out.constraints);
  } else {
    std::vector<ConvexSet> targets = out.data.sets;
    if (targets.empty()) {
      if (!(pc.target_radius > 0.0))
        throw ConfigError("problem.target_radius", "set clustering over point data needs a positive radius");
      for (Eigen::Index i = 0; i < out.data.size(); ++i)
        targets.push_back(ConvexSet::ball(out.data.points.row(i).transpose(), pc.target_radius));
    }
    out.problem = std::make_shared<const SetClusteringProblem>(std::move(targets), *out.constraints);
  }
  return out;
}

}  // namespace dcclust
