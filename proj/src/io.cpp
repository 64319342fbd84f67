#include "cm/io.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace cm::io {

namespace {

const json& field(const json& j, const char* key, const char* who) {
  require(j.is_object(), std::string(who) + ": expected a JSON object");
  auto it = j.find(key);
  require(it != j.end(), std::string(who) + ": missing field '" + key + "'");
  return *it;
}

void check_version(const json& j, const char* expected, const char* who) {
  if (auto it = j.find("version"); it != j.end())
    require(it->is_string() && it->get<std::string>() == expected,
            std::string(who) + ": version must be \"" + expected + "\"");
}

int to_int(const json& j, const std::string& what) {
  require(j.is_number_integer(), what + ": expected an integer");
  const auto v = j.get<long long>();
  require(v >= std::numeric_limits<int>::min() && v <= std::numeric_limits<int>::max(), what + ": out of range");
  return static_cast<int>(v);
}

// JSON pointer tokens need '~' and '/' escaped.
std::string pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  const bool container = j.is_object() || j.is_array();
  if (!container || j.empty()) {
    rows.emplace_back(prefix, j.dump());
    return;
  }
  auto join = [&](const std::string& k) { return prefix.empty() ? k : prefix + "." + k; };
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      require(k.find('.') == std::string::npos && k.find('\t') == std::string::npos && !k.empty(),
              "format_report: key '" + k + "' cannot be flattened");
      flatten(v, join(k), rows);
    }
  } else {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], join(std::to_string(i)), rows);
  }
}

}  // namespace

// ------------------------------------------------------------------ scalars

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double to_double(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw PreconditionError("expected a number, got " + j.dump());
}

json big(const oracle::BigInt& x) {
  if (x >= 0 && x <= std::numeric_limits<std::uint64_t>::max()) return x.convert_to<std::uint64_t>();
  return x.str();
}

json complex(cplx z) { return json::array({number(z.real()), number(z.imag())}); }

cplx to_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  require(j.is_array() && j.size() == 2, "expected a complex number [re, im], got " + j.dump());
  return {to_double(j[0]), to_double(j[1])};
}

json vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

json matrix(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector(m.row(i).transpose()));
  return out;
}

Eigen::VectorXd to_vector(const json& j) {
  require(j.is_array(), "expected an array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = to_double(j[i]);
  return v;
}

Eigen::MatrixXd to_matrix(const json& j) {
  require(j.is_array(), "expected a matrix as an array of rows");
  const std::size_t rows = j.size(), cols = rows ? j[0].size() : 0;
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    require(j[i].is_array() && j[i].size() == cols, "matrix rows must have equal length");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = to_double(j[i][k]);
  }
  return m;
}

json edges(const std::vector<graphs::Edge>& es) {
  json out = json::array();
  for (auto [a, b] : es) out.push_back(json::array({a, b}));
  return out;
}

std::vector<graphs::Edge> to_edges(const json& j) {
  require(j.is_array(), "expected a list of vertex pairs");
  std::vector<graphs::Edge> out;
  for (const auto& e : j) {
    require(e.is_array() && e.size() == 2, "vertex pair must be [j, k], got " + e.dump());
    out.push_back(graphs::make_edge(to_int(e[0], "vertex"), to_int(e[1], "vertex")));
  }
  return out;
}

// ---------------------------------------------------------------- documents

DegreeDocument parse_degree_document(const json& j) {
  check_version(j, kDegSchema, kDegSchema);
  DegreeDocument doc;
  const json& d = field(j, "d", kDegSchema);
  require(d.is_array(), "cm-deg/1: 'd' must be an array of integers");
  for (const auto& x : d) doc.d.d.push_back(to_int(x, "cm-deg/1: d"));
  if (auto it = j.find("bipartition"); it != j.end() && !it->is_null()) {
    require(it->is_array() && it->size() == 2, "cm-deg/1: 'bipartition' must be [n1, n2]");
    doc.d.bipartition = std::make_pair(to_int((*it)[0], "n1"), to_int((*it)[1], "n2"));
  }
  if (auto it = j.find("H_plus"); it != j.end()) doc.H.plus = to_edges(*it);
  if (auto it = j.find("H_minus"); it != j.end()) doc.H.minus = to_edges(*it);
  doc.d.validate();
  doc.H.validate(doc.d);
  return doc;
}

json degree_document(const graphs::DegreeSequence& d, const graphs::ConstraintPair& H) {
  json j;
  j["version"] = kDegSchema;
  j["d"] = d.d;
  if (d.bipartition) j["bipartition"] = json::array({d.bipartition->first, d.bipartition->second});
  j["H_plus"] = edges(H.plus);
  j["H_minus"] = edges(H.minus);
  return j;
}

gauss::SparsePolynomial parse_polynomial(const json& j) {
  check_version(j, kPolySchema, kPolySchema);
  const json& terms = field(j, "terms", kPolySchema);
  require(terms.is_array(), "cm-poly/1: 'terms' must be an array");
  long n = -1;
  if (auto it = j.find("n"); it != j.end()) n = to_int(*it, "cm-poly/1: n");
  for (const auto& t : terms) {
    require(t.is_array() && t.size() == 2 && t[0].is_array(), "cm-poly/1: each term is [[e1,...,en], [re,im]]");
    if (n < 0) n = static_cast<long>(t[0].size());
    require(static_cast<long>(t[0].size()) == n, "cm-poly/1: exponent vectors must all have length n");
  }
  require(n >= 0, "cm-poly/1: dimension unknown; give 'n' or at least one term");
  gauss::SparsePolynomial p(static_cast<std::size_t>(n));
  for (const auto& t : terms) {
    gauss::Exponent e;
    for (const auto& x : t[0]) {
      e.push_back(to_int(x, "cm-poly/1: exponent"));
      require(e.back() >= 0, "cm-poly/1: exponents must be nonnegative");
    }
    p.add_term(e, to_complex(t[1]));
  }
  return p;
}

json polynomial(const gauss::SparsePolynomial& p) {
  json j;
  j["version"] = kPolySchema;
  j["n"] = p.dimension();
  j["terms"] = json::array();
  for (const auto& [e, c] : p.terms()) j["terms"].push_back(json::array({e, complex(c)}));
  return j;
}

RvDocument parse_rv_document(const json& j) {
  check_version(j, kRvSchema, kRvSchema);
  const json& coords = field(j, "coords", kRvSchema);
  require(coords.is_array() && !coords.empty(), "cm-rv/1: 'coords' must be a nonempty array");
  std::vector<rv::DiscreteRV> rvs;
  for (const auto& c : coords) {
    require(c.is_array() && !c.empty(), "cm-rv/1: each coordinate is a list of [[re,im], prob]");
    std::vector<rv::Atom> atoms;
    for (const auto& a : c) {
      require(a.is_array() && a.size() == 2, "cm-rv/1: atom must be [[re,im], prob]");
      atoms.push_back({to_complex(a[0]), to_double(a[1])});
    }
    rvs.emplace_back(std::move(atoms));
  }
  rv::DiscreteProductSpace space(std::move(rvs));
  space.require_within(rv::kDefaultExhaustiveCap);
  const json& table = field(j, "table", kRvSchema);
  require(table.is_array(), "cm-rv/1: 'table' must be an array");
  std::vector<cplx> values(space.joint_size());
  std::vector<bool> seen(space.joint_size(), false);
  for (const auto& row : table) {
    require(row.is_array() && row.size() == 2 && row[0].is_array() && row[0].size() == space.dimension(),
            "cm-rv/1: table row must be [[i1,...,in], [re,im]]");
    std::size_t index = 0;
    for (std::size_t k = 0; k < space.dimension(); ++k) {
      const int i = to_int(row[0][k], "cm-rv/1: point index");
      require(i >= 0 && static_cast<std::size_t>(i) < space.coord(k).size(), "cm-rv/1: point index out of range");
      index += static_cast<std::size_t>(i) * space.stride(k);
    }
    require(!seen[index], "cm-rv/1: duplicate table row " + row[0].dump());
    seen[index] = true;
    values[index] = to_complex(row[1]);
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i]) continue;
    json idx = space.decode(i);
    throw PreconditionError("cm-rv/1: table has no row for point " + idx.dump());
  }
  rv::TabulatedFunction f(space, std::move(values));
  return {std::move(space), std::move(f)};
}

json rv_document(const rv::DiscreteProductSpace& space, const rv::TabulatedFunction& f) {
  json j;
  j["version"] = kRvSchema;
  j["coords"] = json::array();
  for (const auto& c : space.coords()) {
    json atoms = json::array();
    for (const auto& a : c.atoms()) atoms.push_back(json::array({complex(a.value), number(a.prob)}));
    j["coords"].push_back(atoms);
  }
  j["table"] = json::array();
  for (std::size_t i = 0; i < f.size(); ++i) j["table"].push_back(json::array({space.decode(i), complex(f[i])}));
  return j;
}

// ------------------------------------------------------------------ results

json to_json(const graphs::SaddleSolution& s) {
  json j;
  j["mode"] = s.mode == graphs::Mode::General ? "general" : "bipartite";
  j["beta"] = vector(s.beta);
  j["lambda"] = matrix(s.lambda);
  j["residual"] = number(s.residual);
  j["delta_tame"] = number(s.delta_tame);
  j["iterations"] = s.iterations;
  return j;
}

graphs::SaddleSolution saddle_from_json(const json& j) {
  graphs::SaddleSolution s;
  const auto mode = field(j, "mode", "saddle").get<std::string>();
  require(mode == "general" || mode == "bipartite", "saddle: mode must be general or bipartite");
  s.mode = mode == "general" ? graphs::Mode::General : graphs::Mode::Bipartite;
  s.beta = to_vector(field(j, "beta", "saddle"));
  s.lambda = to_matrix(field(j, "lambda", "saddle"));
  s.residual = to_double(field(j, "residual", "saddle"));
  s.delta_tame = to_double(field(j, "delta_tame", "saddle"));
  s.iterations = to_int(field(j, "iterations", "saddle"), "saddle: iterations");
  return s;
}

json to_json(const graphs::TamenessReport& t) {
  json j;
  j["delta"] = number(t.delta);
  j["sufficient_general"] = t.sufficient_general ? json(*t.sufficient_general) : json(nullptr);
  j["sufficient_bipartite"] = t.sufficient_bipartite ? json(*t.sufficient_bipartite) : json(nullptr);
  return j;
}

namespace {
json stats_json(const graphs::HStats& s) {
  json j;
  j["s_max"] = s.s_max;
  j["S"] = number(s.S);
  j["S2"] = number(s.S2);
  return j;
}
}  // namespace

json to_json(const graphs::EnumEstimate& e) {
  json j;
  j["mode"] = e.mode == graphs::Mode::General ? "general" : "bipartite";
  j["log_count"] = number(e.log_count);
  j["count"] = number(std::exp(e.log_count));
  j["error_radius"] = number(e.error_radius);
  j["hypotheses_hold"] = e.hypotheses_hold;
  json c = json::object();
  for (const auto& [k, v] : e.components) c[k] = number(v);
  j["components"] = c;
  j["saddle"] = to_json(e.saddle);
  return j;
}

json to_json(const graphs::ProbEstimate& p) {
  json j;
  j["mode"] = p.mode == graphs::ProbMode::TwoSided ? "two-sided" : "upper-bound";
  j["prob"] = number(p.prob);
  j["error_radius"] = number(p.error_radius);
  j["upper_bound"] = number(p.upper_bound);
  j["hypotheses_hold"] = p.hypotheses_hold;
  j["caveat"] = p.caveat;
  j["stats"] = stats_json(p.stats);
  return j;
}

json to_json(const tour::TournamentCount& t) {
  json j;
  j["n"] = t.n;
  j["asymptotic"] = number(t.asymptotic);
  j["exact"] = t.exact ? big(*t.exact) : json(nullptr);
  j["ratio"] = t.ratio ? number(*t.ratio) : json(nullptr);
  return j;
}

json to_json(const oracle::ConcentrationReport& r) {
  json j;
  j["population"] = big(r.population);
  j["mean_hat"] = number(r.mean_hat);
  j["mean_x"] = number(r.mean_x);
  j["delta"] = number(r.delta);
  j["rows"] = json::array();
  for (const auto& row : r.rows) {
    json g;
    g["gamma"] = number(row.gamma);
    g["empirical"] = number(row.empirical);
    g["tail_form"] = number(row.tail_form);
    g["implied_constant"] = number(row.implied_constant);
    j["rows"].push_back(g);
  }
  j["histogram"] = r.histogram;
  j["hat_pmf"] = json::array();
  for (double p : r.hat_pmf) j["hat_pmf"].push_back(number(p));
  j["moment_ratio"] = json::array();
  for (double m : r.moment_ratio) j["moment_ratio"].push_back(number(m));
  j["lemma_moment_range"] = number(r.lemma_moment_range);
  j["bv_fraction"] = number(r.bv_fraction);
  return j;
}

json to_json(const linalg::WhiteningResult& w) {
  json j;
  j["n_perp"] = w.n_perp;
  j["r"] = number(w.r);
  j["gamma"] = number(w.gamma);
  j["whitening_residual"] = number(w.whitening_residual);
  j["all_pass"] = w.all_pass();
  j["certificate"] = json::array();
  for (const auto& c : w.certificate) {
    json line;
    line["part"] = c.part;
    line["name"] = c.name;
    line["bound"] = number(c.bound);
    line["measured"] = number(c.measured);
    line["pass"] = c.pass;
    j["certificate"].push_back(line);
  }
  j["A_D"] = matrix(w.A_D);
  j["T"] = matrix(w.T);
  return j;
}

json to_json(const rv::BoundReport& b) {
  json j;
  j["order"] = b.order == rv::Order::First ? "first" : "second";
  j["estimate"] = complex(b.estimate);
  j["error_radius"] = number(b.error_radius);
  json aux = json::object();
  for (const auto& [k, v] : b.auxiliary) aux[k] = number(v);
  j["auxiliary"] = aux;
  return j;
}

json to_json(const gauss::PolyStats& s) {
  json j;
  j["mean"] = complex(s.mean);
  j["var_re"] = number(s.var_re);
  j["var_im"] = number(s.var_im);
  j["cov_re_im"] = number(s.cov_re_im);
  j["variance"] = number(s.variance());
  j["pseudovariance"] = complex(s.pseudovariance);
  return j;
}

json to_json(const validate::SuiteResult& r) {
  json j;
  j["suite"] = r.suite;
  j["pass"] = r.pass();
  j["checks"] = json::array();
  for (const auto& c : r.checks) {
    json x;
    x["name"] = c.name;
    x["pass"] = c.pass;
    x["detail"] = c.detail;
    j["checks"].push_back(x);
  }
  return j;
}

// --------------------------------------------------------------------- text

std::string format_report(const json& report, Format format) {
  if (format == Format::Json) return report.dump(2) + "\n";
  std::vector<std::pair<std::string, std::string>> rows;
  if (!(report.is_object() && report.empty())) flatten(report, "", rows);
  std::string out = "key\tvalue\n";
  for (const auto& [k, v] : rows) out += k + "\t" + v + "\n";
  return out;
}

json parse_tsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line == "key\tvalue", "parse_tsv: missing header");
  json out = json::object();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    require(tab != std::string::npos, "parse_tsv: row without a tab");
    const std::string key = line.substr(0, tab);
    json value = json::parse(line.substr(tab + 1));
    if (key.empty()) return value;  // the whole report was a scalar
    std::string ptr;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      ptr += "/" + pointer_token(key.substr(start, dot - start));
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    out[json::json_pointer(ptr)] = std::move(value);
  }
  return out;
}

}  // namespace cm::io
