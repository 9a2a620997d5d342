#include "ellinc/run_config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ellinc/matrix_market.hpp"
#include "ellinc/operators.hpp"
#include "ellinc/oracle.hpp"

namespace ellinc {

using nlohmann::json;

namespace {

// Walks the JSON document and reports schema problems with their location.
class Schema {
 public:
  Schema(const std::string& text, std::filesystem::path base_dir)
      : text_(text), base_dir_(std::move(base_dir)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& message,
                         const std::string& code = "config_error") const {
    throw ConfigError(field + ": " + message, field, line_of(field), code);
  }

  const json& at(const json& obj, const std::string& field, const std::string& key) const {
    const std::string path = join(field, key);
    if (!obj.contains(key)) fail(path, "missing required field");
    return obj.at(key);
  }

  const json* find(const json& obj, const std::string& key) const {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

  void require_object(const json& j, const std::string& field) const {
    if (!j.is_object()) fail(field, "expected an object");
  }

  void allow_keys(const json& obj, const std::string& field,
                  std::initializer_list<const char*> keys) const {
    for (const auto& [k, v] : obj.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
        fail(join(field, k), "unknown field");
    }
  }

  double number(const json& j, const std::string& field) const {
    if (!j.is_number()) fail(field, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) fail(field, "expected a finite number");
    return x;
  }

  double positive(const json& j, const std::string& field) const {
    const double x = number(j, field);
    if (!(x > 0.0)) fail(field, "expected a positive number");
    return x;
  }

  std::uint64_t count(const json& j, const std::string& field) const {
    if (!j.is_number_integer() || j.get<long long>() < 0)
      fail(field, "expected a nonnegative integer");
    return j.get<std::uint64_t>();
  }

  bool boolean(const json& j, const std::string& field) const {
    if (!j.is_boolean()) fail(field, "expected true or false");
    return j.get<bool>();
  }

  std::string string(const json& j, const std::string& field) const {
    if (!j.is_string()) fail(field, "expected a string");
    return j.get<std::string>();
  }

  std::filesystem::path path(const json& j, const std::string& field) const {
    std::filesystem::path p = string(j, field);
    if (p.is_relative()) p = base_dir_ / p;
    if (!std::filesystem::exists(p)) fail(field, "file not found: " + p.string(), "io_error");
    return p;
  }

  // Inline array or {"file": path} with one number per line.
  Vector vector(const json& j, const std::string& field) const {
    if (j.is_array()) {
      Vector v(static_cast<Index>(j.size()));
      for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Index>(i)) = number(j[i], field + "[" + std::to_string(i) + "]");
      return v;
    }
    if (j.is_object()) {
      allow_keys(j, field, {"file"});
      const auto p = path(at(j, field, "file"), join(field, "file"));
      std::ifstream in(p);
      std::vector<double> values;
      std::string line;
      int lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        double x;
        std::string rest;
        if (!(ls >> x) || (ls >> rest) || !std::isfinite(x))
          fail(join(field, "file"), p.string() + ":" + std::to_string(lineno) + ": expected one number");
        values.push_back(x);
      }
      return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
    }
    fail(field, "expected an array of numbers or {\"file\": path}");
  }

  Matrix matrix(const json& j, const std::string& field) const {
    if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
      fail(field, "expected a nonempty array of rows");
    Matrix m(static_cast<Index>(j.size()), static_cast<Index>(j[0].size()));
    for (std::size_t r = 0; r < j.size(); ++r) {
      const std::string rf = field + "[" + std::to_string(r) + "]";
      if (!j[r].is_array() || j[r].size() != j[0].size()) fail(rf, "rows must have equal length");
      for (std::size_t c = 0; c < j[r].size(); ++c)
        m(static_cast<Index>(r), static_cast<Index>(c)) =
            number(j[r][c], rf + "[" + std::to_string(c) + "]");
    }
    return m;
  }

  static std::string join(const std::string& field, const std::string& key) {
    return field.empty() ? key : field + "." + key;
  }

 private:
  // Locates the keys of a dotted path in order; falls back to the deepest
  // key found. Array subscripts are ignored.
  int line_of(const std::string& field) const {
    std::size_t pos = 0, found = std::string::npos;
    std::istringstream parts(field);
    std::string part;
    while (std::getline(parts, part, '.')) {
      const auto bracket = part.find('[');
      if (bracket != std::string::npos) part.resize(bracket);
      const auto hit = text_.find("\"" + part + "\"", pos);
      if (hit == std::string::npos) break;
      found = pos = hit;
    }
    if (found == std::string::npos) return 0;
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<long>(found), '\n'));
  }

  const std::string& text_;
  std::filesystem::path base_dir_;
};

ScalarGraph parse_graph(const Schema& s, const json& j, const std::string& field) {
  s.require_object(j, field);
  const std::string type = s.string(s.at(j, field, "type"), Schema::join(field, "type"));
  auto param = [&](const char* key) { return s.number(s.at(j, field, key), Schema::join(field, key)); };
  ScalarGraph g;
  if (type == "linear") {
    s.allow_keys(j, field, {"type", "slope"});
    g = LinearGraph{param("slope")};
  } else if (type == "sign") {
    s.allow_keys(j, field, {"type"});
    g = SignGraph{};
  } else if (type == "power") {
    s.allow_keys(j, field, {"type", "p"});
    g = PowerGraph{param("p")};
  } else if (type == "clamp") {
    s.allow_keys(j, field, {"type", "lo", "hi"});
    g = ClampGraph{param("lo"), param("hi")};
  } else if (type == "relay") {
    s.allow_keys(j, field, {"type", "height"});
    g = RelayGraph{param("height")};
  } else {
    s.fail(Schema::join(field, "type"), "unknown graph type '" + type + "'");
  }
  try {
    validate(g);
  } catch (const ConstructionError& e) {
    s.fail(field, e.what());
  }
  return g;
}

Relation parse_relation(const Schema& s, const json& j, const std::string& field, Index dim) {
  s.require_object(j, field);
  const std::string type = s.string(s.at(j, field, "type"), Schema::join(field, "type"));
  if (type == "identity") {
    s.allow_keys(j, field, {"type"});
    return make_scaled_identity(dim, 1.0);
  }
  if (type == "scaled_identity") {
    s.allow_keys(j, field, {"type", "c"});
    return make_scaled_identity(dim, s.positive(s.at(j, field, "c"), Schema::join(field, "c")));
  }
  if (type == "linear") {
    s.allow_keys(j, field, {"type", "matrix"});
    const std::string mf = Schema::join(field, "matrix");
    const Matrix m = s.matrix(s.at(j, field, "matrix"), mf);
    if (m.rows() != dim || m.cols() != dim)
      s.fail(mf, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
    try {
      return make_linear(m);
    } catch (const ConstructionError& e) {
      s.fail(mf, e.what());
    }
  }
  if (type == "diagonal") {
    s.allow_keys(j, field, {"type", "c", "graph", "graphs"});
    const double c = s.positive(s.at(j, field, "c"), Schema::join(field, "c"));
    std::vector<ScalarGraph> graphs;
    if (const json* one = s.find(j, "graph")) {
      if (s.find(j, "graphs")) s.fail(Schema::join(field, "graphs"), "give either graph or graphs");
      graphs.assign(static_cast<std::size_t>(dim), parse_graph(s, *one, Schema::join(field, "graph")));
    } else {
      const std::string gf = Schema::join(field, "graphs");
      const json& list = s.at(j, field, "graphs");
      if (!list.is_array() || static_cast<Index>(list.size()) != dim)
        s.fail(gf, "expected an array of " + std::to_string(dim) + " graphs");
      for (std::size_t i = 0; i < list.size(); ++i)
        graphs.push_back(parse_graph(s, list[i], gf + "[" + std::to_string(i) + "]"));
    }
    return make_diagonal(c, std::move(graphs));
  }
  s.fail(Schema::join(field, "type"), "unknown relation type '" + type + "'");
}

OperatorFamily parse_family(const Schema& s, const json& j, const std::string& field) {
  const std::string name = s.string(j, field);
  for (auto f : {OperatorFamily::Grad1D, OperatorFamily::Grad2D, OperatorFamily::Grad3D,
                 OperatorFamily::SymGrad2D, OperatorFamily::Curl3D, OperatorFamily::Custom}) {
    if (name == to_string(f)) return f;
  }
  s.fail(field, "unknown operator family '" + name + "'");
}

struct Operators {
  LinearMap a;
  std::optional<LinearMap> c;
  std::optional<Subspace> inclusion;
};

Subspace parse_inclusion(const Schema& s, const json& j, const std::string& field, Index n) {
  if (!j.is_array()) s.fail(field, "expected an array of indices");
  std::vector<Index> idx;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto k = static_cast<Index>(s.count(j[i], field + "[" + std::to_string(i) + "]"));
    if (k >= n) s.fail(field + "[" + std::to_string(i) + "]", "index out of range");
    idx.push_back(k);
  }
  return Subspace::coordinate_span(n, idx);
}

Operators parse_operators(const Schema& s, const json& j, const std::string& field,
                          ProblemKind kind) {
  s.require_object(j, field);
  s.allow_keys(j, field, {"family", "shape", "spacing", "boundary", "path", "inclusion"});
  OperatorSpec spec;
  spec.family = parse_family(s, s.at(j, field, "family"), Schema::join(field, "family"));
  if (const json* h = s.find(j, "spacing")) spec.spacing = s.positive(*h, Schema::join(field, "spacing"));
  if (const json* b = s.find(j, "boundary")) {
    const std::string name = s.string(*b, Schema::join(field, "boundary"));
    if (name == "zero") spec.boundary = Boundary::ZeroBoundary;
    else if (name == "free") spec.boundary = Boundary::Free;
    else s.fail(Schema::join(field, "boundary"), "expected \"zero\" or \"free\"");
  }
  const json* inclusion = s.find(j, "inclusion");

  if (spec.family == OperatorFamily::Custom) {
    spec.path = s.path(s.at(j, field, "path"), Schema::join(field, "path"));
    LinearMap m = read_matrix_market(spec.path);
    const std::string inc = Schema::join(field, "inclusion");
    switch (kind) {
      case ProblemKind::Homogeneous:
        if (inclusion) s.fail(inc, "only used by dirichlet and neumann problems");
        return {std::move(m), std::nullopt, std::nullopt};
      case ProblemKind::Dirichlet: {
        if (!inclusion) s.fail(inc, "missing required field");
        Subspace e = parse_inclusion(s, *inclusion, inc, m.cols());
        if (e.dim() == 0) s.fail(inc, "needs at least one index");
        LinearMap a(m.dense() * e.basis());
        return {std::move(a), std::move(m), std::move(e)};
      }
      case ProblemKind::Neumann: {
        Subspace e = inclusion ? parse_inclusion(s, *inclusion, inc, m.cols()) : Subspace::whole(m.cols());
        return {std::move(m), std::nullopt, std::move(e)};
      }
    }
    throw InputError("unknown problem kind");
  }

  const std::string sf = Schema::join(field, "shape");
  const json& shape = s.at(j, field, "shape");
  if (!shape.is_array() || shape.empty()) s.fail(sf, "expected an array of extents");
  for (std::size_t i = 0; i < shape.size(); ++i)
    spec.shape.push_back(static_cast<Index>(s.count(shape[i], sf + "[" + std::to_string(i) + "]")));
  if (inclusion) s.fail(Schema::join(field, "inclusion"), "only used by custom operators");

  if (kind == ProblemKind::Homogeneous) return {build_operator(spec).matrix, std::nullopt, std::nullopt};
  OperatorPair pair = operator_pair(spec);
  if (kind == ProblemKind::Dirichlet)
    return {std::move(pair.zero_boundary.matrix), std::move(pair.free.matrix), std::move(pair.inclusion)};
  return {std::move(pair.free.matrix), std::nullopt, std::move(pair.inclusion)};
}

ProblemKind parse_kind(const Schema& s, const json& j, const std::string& field) {
  const std::string name = s.string(j, field);
  for (auto k : {ProblemKind::Homogeneous, ProblemKind::Dirichlet, ProblemKind::Neumann})
    if (name == to_string(k)) return k;
  s.fail(field, "expected homogeneous, dirichlet or neumann");
}

CheckKind parse_check(const Schema& s, const json& j, const std::string& field) {
  const std::string name = s.string(j, field);
  for (auto k : {CheckKind::Certificate, CheckKind::Oracle, CheckKind::Lipschitz,
                 CheckKind::DirichletEstimate, CheckKind::NeumannEstimate, CheckKind::Monotonicity})
    if (name == to_string(k)) return k;
  s.fail(field, "unknown check '" + name + "'");
}

void check_length(const Schema& s, const Vector& v, Index n, const std::string& field) {
  if (v.size() != n)
    s.fail(field, "expected length " + std::to_string(n) + ", got " + std::to_string(v.size()));
}

// ---- checks --------------------------------------------------------------

double relative_delta(const Vector& u, const Vector& ref) {
  return (u - ref).norm() / std::max(1.0, ref.norm());
}

bool piecewise(const std::vector<ScalarGraph>& graphs) {
  return std::none_of(graphs.begin(), graphs.end(),
                      [](const ScalarGraph& g) { return std::holds_alternative<PowerGraph>(g); });
}

bool potential_type(const std::vector<ScalarGraph>& graphs) {
  return std::none_of(graphs.begin(), graphs.end(), [](const ScalarGraph& g) {
    return std::holds_alternative<ClampGraph>(g) || std::holds_alternative<RelayGraph>(g);
  });
}

CheckResult oracle_check(const Problem& p, const Solution& s) {
  CheckResult r{"oracle", false, {}, {}};
  if (p.options.range_coordinates)
    throw CapabilityError("oracle check needs a relation on the full codomain");
  if (p.kind == ProblemKind::Neumann)
    throw CapabilityError("oracle check covers homogeneous and dirichlet problems");

  // Dirichlet: A = C E, unknown x with u = E x + u0 and s = A x + C u0.
  std::optional<Vector> offset;
  Vector u_part = s.u;
  if (p.kind == ProblemKind::Dirichlet) {
    offset = p.c->apply(*p.u0);
    u_part = p.inclusion->coordinates(s.u - *p.u0);
  }
  auto lift = [&](const Vector& x) {
    return p.kind == ProblemKind::Dirichlet ? Vector(p.inclusion->lift(x) + *p.u0) : x;
  };

  double primary = -1.0, tolerance = 1e-8;
  const auto& desc = p.relation.descriptor();
  if (const auto* lin = std::get_if<LinearPD>(&desc)) {
    Vector rhs = p.f;
    if (offset) rhs -= p.a.apply_adjoint(lin->matrix * *offset);
    const Vector x = oracle::linear_direct_solve(p.a, lin->matrix, rhs);
    primary = r.values["linear_direct_delta"] = relative_delta(s.u, lift(x));
  } else if (const auto* diag = std::get_if<DiagonalGraph>(&desc)) {
    const double c = p.relation.c();
    if (piecewise(diag->graphs)) {
      const auto res = oracle::active_set_solve(p.a, c, diag->graphs, p.f, offset);
      primary = r.values["active_set_delta"] = relative_delta(s.u, lift(res.u));
      r.values["consistent_assignments"] = static_cast<double>(res.consistent_assignments);
    }
    if (potential_type(diag->graphs) && !offset) {
      const Vector x = oracle::convex_min_solve(p.a, c, diag->graphs, p.f);
      const double d = r.values["convex_min_delta"] = relative_delta(u_part, x);
      if (primary < 0.0) {
        primary = d;
        tolerance = 1e-6;
      }
    }
    if (primary < 0.0) throw CapabilityError("no oracle covers this graph and boundary data mix");
  } else {
    throw CapabilityError("custom relations have no independent oracle");
  }
  r.values["oracle_delta"] = primary;
  r.values["tolerance"] = tolerance;
  r.pass = primary <= tolerance;
  return r;
}

CheckResult estimate_check(const RunConfig& cfg, const Solution& s, bool dirichlet) {
  CheckResult r{dirichlet ? "dirichlet_estimate" : "neumann_estimate", false, {}, {}};
  const ProblemKind need = dirichlet ? ProblemKind::Dirichlet : ProblemKind::Neumann;
  if (cfg.problem.kind != need)
    throw CapabilityError(std::string(r.name) + " needs a " + to_string(need) + " problem");
  if (!cfg.compare) throw InputError("estimate check needs problem.compare data");
  const Solution s2 = solve(*cfg.compare);
  const EstimateReport e = dirichlet ? verify_dirichlet_estimate(cfg.problem, *cfg.compare, s, s2)
                                     : verify_neumann_estimate(cfg.problem, *cfg.compare, s, s2);
  r.values = e.constants;
  r.values["lhs"] = e.lhs;
  r.values["rhs"] = e.rhs;
  r.pass = e.pass;
  return r;
}

CheckResult run_check(CheckKind kind, const RunConfig& cfg, const Solution& s) {
  const Problem& p = cfg.problem;
  switch (kind) {
    case CheckKind::Certificate: {
      CheckResult r{"certificate", certificate_ok(p, s), {}, {}};
      for (const char* key : {"graph_residual", "adjoint_residual", "shifted_graph_residual",
                              "inclusion_residual", "weak_equation_residual",
                              "boundary_condition_residual"}) {
        if (const auto it = s.diagnostics.find(key); it != s.diagnostics.end())
          r.values[key] = it->second;
      }
      r.values["bound"] = 10.0 * p.options.tol;
      return r;
    }
    case CheckKind::Oracle: return oracle_check(p, s);
    case CheckKind::Lipschitz: {
      if (p.kind != ProblemKind::Homogeneous)
        throw CapabilityError("lipschitz check needs a homogeneous problem");
      const LipschitzReport l = lipschitz_probe(p, cfg.lipschitz_pairs, cfg.seed);
      const double bound = 1.0 / p.relation.c();
      CheckResult r{"lipschitz", l.max_ratio <= bound + 1e-8, {}, {}};
      r.values = {{"pairs", static_cast<double>(l.pairs)}, {"max_ratio", l.max_ratio},
                  {"min_ratio", l.min_ratio}, {"bound", bound}};
      return r;
    }
    case CheckKind::DirichletEstimate: return estimate_check(cfg, s, true);
    case CheckKind::NeumannEstimate: return estimate_check(cfg, s, false);
    case CheckKind::Monotonicity: {
      const MonotonicityReport m = monotonicity_probe(p.relation, cfg.monotonicity_trials, cfg.seed);
      CheckResult r{"monotonicity", m.pass, {}, {}};
      r.values = {{"trials", static_cast<double>(m.trials)}, {"min_quotient", m.min_quotient},
                  {"violations", static_cast<double>(m.violations)}, {"c", p.relation.c()}};
      return r;
    }
  }
  throw InputError("unknown check");
}

ErrorRecord error_record(const Error& e) {
  ErrorRecord r{e.code(), to_string(e.kind()), e.what(), "", 0};
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) {
    r.field = ce->field();
    r.line = ce->line();
  }
  return r;
}

}  // namespace

const char* to_string(CheckKind kind) noexcept {
  switch (kind) {
    case CheckKind::Certificate: return "certificate";
    case CheckKind::Oracle: return "oracle";
    case CheckKind::Lipschitz: return "lipschitz";
    case CheckKind::DirichletEstimate: return "dirichlet_estimate";
    case CheckKind::NeumannEstimate: return "neumann_estimate";
    case CheckKind::Monotonicity: return "monotonicity";
  }
  return "unknown";
}

const char* to_string(RunMode mode) noexcept {
  switch (mode) {
    case RunMode::Solve: return "solve";
    case RunMode::Verify: return "verify";
    case RunMode::OracleCheck: return "oracle-check";
  }
  return "unknown";
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                           const RunOverrides& overrides) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw ConfigError(std::string("not valid JSON: ") + e.what(), "", line, "config_syntax");
  }
  const Schema s(text, base_dir);
  s.require_object(doc, "(root)");
  s.allow_keys(doc, "", {"schema_version", "problem", "solver", "checks"});
  const auto version = s.count(s.at(doc, "", "schema_version"), "schema_version");
  if (version != static_cast<std::uint64_t>(kSchemaVersion))
    s.fail("schema_version", "unsupported version " + std::to_string(version));

  // solver knobs
  SolverOptions opt;
  std::uint64_t seed = 0;
  std::size_t lipschitz_pairs = 20, monotonicity_trials = 200;
  if (const json* sv = s.find(doc, "solver")) {
    s.require_object(*sv, "solver");
    s.allow_keys(*sv, "solver", {"tol", "lambda", "max_iter", "seed", "lipschitz_pairs", "monotonicity_trials"});
    if (const json* x = s.find(*sv, "tol")) opt.tol = s.positive(*x, "solver.tol");
    if (const json* x = s.find(*sv, "lambda")) opt.lambda = s.positive(*x, "solver.lambda");
    if (const json* x = s.find(*sv, "max_iter")) opt.max_iter = s.count(*x, "solver.max_iter");
    if (const json* x = s.find(*sv, "seed")) seed = s.count(*x, "solver.seed");
    if (const json* x = s.find(*sv, "lipschitz_pairs")) lipschitz_pairs = s.count(*x, "solver.lipschitz_pairs");
    if (const json* x = s.find(*sv, "monotonicity_trials"))
      monotonicity_trials = s.count(*x, "solver.monotonicity_trials");
  }
  if (overrides.tol) {
    if (!(*overrides.tol > 0.0)) throw ConfigError("--tol must be positive", "solver.tol", 0);
    opt.tol = *overrides.tol;
    doc["solver"]["tol"] = opt.tol;
  }
  if (overrides.seed) {
    seed = *overrides.seed;
    doc["solver"]["seed"] = seed;
  }

  std::vector<CheckKind> checks;
  if (const json* cl = s.find(doc, "checks")) {
    if (!cl->is_array()) s.fail("checks", "expected an array of check names");
    for (std::size_t i = 0; i < cl->size(); ++i) {
      const CheckKind k = parse_check(s, (*cl)[i], "checks[" + std::to_string(i) + "]");
      if (std::find(checks.begin(), checks.end(), k) == checks.end()) checks.push_back(k);
    }
  }

  // problem
  const json& pj = s.at(doc, "", "problem");
  s.require_object(pj, "problem");
  s.allow_keys(pj, "problem", {"kind", "operator", "relation", "f", "u0", "compare",
                               "range_coordinates", "accept_kernel_rhs"});
  const ProblemKind kind = parse_kind(s, s.at(pj, "problem", "kind"), "problem.kind");
  if (const json* x = s.find(pj, "range_coordinates"))
    opt.range_coordinates = s.boolean(*x, "problem.range_coordinates");
  if (const json* x = s.find(pj, "accept_kernel_rhs"))
    opt.accept_kernel_rhs = s.boolean(*x, "problem.accept_kernel_rhs");

  Operators ops = [&] {
    try {
      return parse_operators(s, s.at(pj, "problem", "operator"), "problem.operator", kind);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      s.fail("problem.operator", e.what(), e.code());
    }
  }();

  Index rel_dim = ops.a.rows();
  if (opt.range_coordinates) rel_dim = RestrictedOperator(ops.a).rank();
  if (rel_dim == 0) s.fail("problem.relation", "the operator has rank 0; no relation dimension");
  Relation relation = parse_relation(s, s.at(pj, "problem", "relation"), "problem.relation", rel_dim);

  const Vector f = s.vector(s.at(pj, "problem", "f"), "problem.f");
  check_length(s, f, ops.a.cols(), "problem.f");

  const Index u0_len = kind == ProblemKind::Dirichlet ? ops.c->cols() : ops.a.rows();
  std::optional<Vector> u0;
  if (const json* x = s.find(pj, "u0")) {
    if (kind == ProblemKind::Homogeneous) s.fail("problem.u0", "homogeneous problems take no u0");
    u0 = s.vector(*x, "problem.u0");
    check_length(s, *u0, u0_len, "problem.u0");
  } else if (kind == ProblemKind::Dirichlet) {
    s.fail("problem.u0", "missing required field");
  }

  auto make = [&](const Vector& rhs, const std::optional<Vector>& bd) {
    switch (kind) {
      case ProblemKind::Homogeneous: return Problem::homogeneous(ops.a, relation, rhs, opt);
      case ProblemKind::Dirichlet:
        return Problem::dirichlet(ops.a, *ops.c, *ops.inclusion, relation, rhs, *bd, opt);
      case ProblemKind::Neumann: return Problem::neumann(ops.a, *ops.inclusion, relation, rhs, bd, opt);
    }
    throw InputError("unknown problem kind");
  };

  std::optional<Problem> compare;
  if (const json* cj = s.find(pj, "compare")) {
    s.require_object(*cj, "problem.compare");
    s.allow_keys(*cj, "problem.compare", {"f", "u0"});
    Vector f2 = f;
    std::optional<Vector> u02 = u0;
    if (const json* x = s.find(*cj, "f")) {
      f2 = s.vector(*x, "problem.compare.f");
      check_length(s, f2, ops.a.cols(), "problem.compare.f");
    }
    if (const json* x = s.find(*cj, "u0")) {
      if (kind == ProblemKind::Homogeneous) s.fail("problem.compare.u0", "homogeneous problems take no u0");
      u02 = s.vector(*x, "problem.compare.u0");
      check_length(s, *u02, u0_len, "problem.compare.u0");
    }
    compare = make(f2, u02);
  }

  return RunConfig{std::move(doc), make(f, u0), std::move(compare), std::move(checks),
                   seed, lipschitz_pairs, monotonicity_trials};
}

RunConfig load_run_config(const std::filesystem::path& path, const RunOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string(), "", 0, "io_error");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), path.parent_path(), overrides);
}

RunReport execute(const RunConfig& cfg, RunMode mode) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.command = to_string(mode);
  report.config = cfg.document;

  std::vector<CheckKind> checks;
  switch (mode) {
    case RunMode::Solve: checks = cfg.checks; break;
    case RunMode::Verify:
      checks = cfg.checks;
      if (std::find(checks.begin(), checks.end(), CheckKind::Certificate) == checks.end())
        checks.insert(checks.begin(), CheckKind::Certificate);
      break;
    case RunMode::OracleCheck: checks = {CheckKind::Oracle}; break;
  }

  try {
    const Solution s = solve(cfg.problem);
    SolutionRecord rec;
    rec.u.assign(s.u.begin(), s.u.end());
    rec.w.assign(s.w.begin(), s.w.end());
    rec.certificate_x.assign(s.certificate.x.begin(), s.certificate.x.end());
    rec.certificate_y.assign(s.certificate.y.begin(), s.certificate.y.end());
    rec.certificate_residual = s.certificate.residual;
    rec.iterations = s.iterations;
    rec.diagnostics = s.diagnostics;
    report.solution = std::move(rec);

    bool ok = certificate_ok(cfg.problem, s);
    for (CheckKind k : checks) {
      CheckResult r;
      try {
        r = run_check(k, cfg, s);
      } catch (const Error& e) {
        r = CheckResult{to_string(k), false, {}, e.code() + ": " + e.what()};
      }
      for (auto& [key, value] : r.values)
        if (!std::isfinite(value)) value = value > 0 ? 1e308 : -1e308;
      ok = ok && r.pass;
      report.checks.push_back(std::move(r));
    }
    report.status = ok ? "ok" : "failed";
  } catch (const Error& e) {
    report.status = "error";
    report.error = error_record(e);
  }
  report.timing_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

RunReport run_config(const std::filesystem::path& path, RunMode mode, const RunOverrides& overrides) {
  try {
    return execute(load_run_config(path, overrides), mode);
  } catch (const Error& e) {
    RunReport report;
    report.command = to_string(mode);
    report.config = json::object();
    report.status = "error";
    report.error = error_record(e);
    return report;
  }
}

}  // namespace ellinc
