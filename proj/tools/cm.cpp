// Command-line front end. Every run prints one report (JSON or TSV) on
// stdout that echoes the resolved configuration; diagnostics and progress
// go to stderr. Exit codes: 0 ok, 1 internal error, 2 precondition,
// 3 budget exhausted.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "cm/io.hpp"

using cm::io::json;

namespace {

struct Common {
  std::string format = "json";
  std::uint64_t seed = 1;
  int threads = 0;  // 0: CM_THREADS or 1
  cm::graphs::EnumConstants k;
};

struct DegreeFlags {
  std::string input, d, bipartition, h_plus, h_minus;
};

json parse_inline_or_file(const std::string& what, const std::string& text) {
  std::size_t i = text.find_first_not_of(" \t\r\n");
  std::string body;
  if (i != std::string::npos && (text[i] == '{' || text[i] == '[')) {
    body = text;
  } else if (text == "-") {
    body.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream f(text);
    cm::require(f.good(), what + ": cannot open '" + text + "'");
    body.assign(std::istreambuf_iterator<char>(f), {});
  }
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw cm::PreconditionError(what + ": invalid JSON (" + e.what() + ")");
  }
}

void add_degree_flags(CLI::App* sub, DegreeFlags& f) {
  sub->add_option("--input", f.input, "cm-deg/1 document: path, '-' for stdin, or inline JSON");
  sub->add_option("--d", f.d, "degree sequence as a JSON array, e.g. [4,4,4,4]");
  sub->add_option("--bipartition", f.bipartition, "part sizes as [n1,n2]");
  sub->add_option("--H-plus", f.h_plus, "required edges as [[j,k],...]");
  sub->add_option("--H-minus", f.h_minus, "forbidden edges as [[j,k],...]");
}

// Document fields first, then individual flags on top.
json degree_json(const DegreeFlags& f) {
  json doc = f.input.empty() ? json::object() : parse_inline_or_file("--input", f.input);
  cm::require(doc.is_object(), "--input: expected a JSON object");
  if (!f.d.empty()) doc["d"] = parse_inline_or_file("--d", f.d);
  if (!f.bipartition.empty()) doc["bipartition"] = parse_inline_or_file("--bipartition", f.bipartition);
  if (!f.h_plus.empty()) doc["H_plus"] = parse_inline_or_file("--H-plus", f.h_plus);
  if (!f.h_minus.empty()) doc["H_minus"] = parse_inline_or_file("--H-minus", f.h_minus);
  return doc;
}

json constants_json(const cm::graphs::EnumConstants& k) {
  json j;
  j["c"] = k.c;
  j["c_prime"] = k.c_prime;
  j["c1"] = k.c1;
  j["c2"] = k.c2;
  j["b1"] = k.b1;
  j["b2"] = k.b2;
  j["eps"] = k.eps;
  return j;
}

json report(const std::string& command, json config) {
  json r;
  r["command"] = command;
  r["config"] = std::move(config);
  return r;
}

void merge(json& into, const json& from) {
  for (const auto& [k, v] : from.items()) into[k] = v;
}

json edge_sets(const std::vector<cm::oracle::EdgeSet>& gs) {
  json out = json::array();
  for (const auto& g : gs) out.push_back(cm::io::edges(g));
  return out;
}

int emit_error(const std::string& kind, const std::string& message, int code) {
  json e;
  e["error"]["kind"] = kind;
  e["error"]["message"] = message;
  e["error"]["exit_code"] = code;
  std::cerr << e.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic and exact counts of graphs, bipartite graphs and regular tournaments"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--format", common.format, "output format")->check(CLI::IsMember({"json", "tsv"}));
  app.add_option("--seed", common.seed, "seed for every random substream");
  app.add_option("--threads", common.threads, "worker threads (default: CM_THREADS, else 1)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--eps", common.k.eps, "epsilon in the error exponents")->check(CLI::PositiveNumber);
  app.add_option("--c", common.k.c, "constant c in the error radii")->check(CLI::NonNegativeNumber);
  app.add_option("--c-prime", common.k.c_prime, "constant c' of the upper-bound mode")->check(CLI::NonNegativeNumber);
  app.add_option("--c1", common.k.c1, "hypothesis constant c1 (s_max <= c1 n^{1/6})")->check(CLI::NonNegativeNumber);
  app.add_option("--c2", common.k.c2, "hypothesis constant c2 (S2 <= c2 n)")->check(CLI::NonNegativeNumber);
  app.add_option("--b1", common.k.b1, "upper-bound hypothesis constant b1")->check(CLI::NonNegativeNumber);
  app.add_option("--b2", common.k.b2, "upper-bound hypothesis constant b2")->check(CLI::NonNegativeNumber);

  DegreeFlags deg;
  std::string alpha_beta, p_q, prob_mode = "two-sided", sample_method = "uniform", y_text, whiten_input,
                                                        rv_order = "both", rv_input, poly_input, sigma_text, form_text;
  int tour_n = 0, sample_count = 10, trials = 10'000, max_moment = 6;
  bool tour_exact = false, full = false;
  std::uint64_t budget = cm::oracle::CountBudget{}.max_expansions;
  std::vector<double> gammas;
  std::vector<std::string> suite_names;

  auto* saddle = app.add_subcommand("saddle", "solve the saddle-point equations and report tameness");
  add_degree_flags(saddle, deg);
  saddle->add_option("--alpha-beta", alpha_beta, "general tameness window [alpha,beta]");
  saddle->add_option("--p-q", p_q, "bipartite tameness window [p,q]");

  auto* count = app.add_subcommand("count", "asymptotic count of graphs with given degrees");
  add_degree_flags(count, deg);
  auto* count_bip = app.add_subcommand("count-bipartite", "asymptotic count of bipartite graphs");
  add_degree_flags(count_bip, deg);

  auto* prob = app.add_subcommand("prob", "probability that a uniform graph contains H+ and avoids H-");
  add_degree_flags(prob, deg);
  prob->add_option("--mode", prob_mode)->check(CLI::IsMember({"two-sided", "upper-bound"}));

  auto* tournament = app.add_subcommand("tournament", "regular tournaments on n vertices");
  tournament->add_option("--n", tour_n, "odd number of vertices")->required();
  tournament->add_flag("--exact", tour_exact, "also count exactly");

  auto* oracle_count = app.add_subcommand("oracle-count", "exact count by enumeration");
  add_degree_flags(oracle_count, deg);
  oracle_count->add_option("--budget", budget, "maximum expanded search states");

  auto* sample = app.add_subcommand("sample", "uniform or beta-model samples");
  add_degree_flags(sample, deg);
  sample->add_option("--count", sample_count)->check(CLI::NonNegativeNumber);
  sample->add_option("--method", sample_method)->check(CLI::IsMember({"uniform", "beta-model"}));
  sample->add_option("--budget", budget, "maximum expanded search states");

  auto* conc = app.add_subcommand("concentration", "edge counts inside Y under uniform sampling");
  add_degree_flags(conc, deg);
  conc->add_option("--Y", y_text, "vertex pairs [[j,k],...]; overrides the document's Y");
  conc->add_option("--gamma", gammas, "one or more gamma values");
  conc->add_option("--trials", trials)->check(CLI::PositiveNumber);
  conc->add_option("--max-moment", max_moment)->check(CLI::NonNegativeNumber);
  conc->add_option("--budget", budget, "maximum expanded search states");

  auto* whiten = app.add_subcommand("whiten", "regularize and whiten with a norm certificate");
  whiten->add_option("--input", whiten_input, "JSON {A, D, r, gamma[, kernel_dim]}")->required();

  auto* validate_cmd = app.add_subcommand("validate", "run the invariant suites");
  validate_cmd->add_option("--suite", suite_names, "run only these suites");
  validate_cmd->add_flag("--full", full, "use the full sample sizes");

  auto* rv_cmd = app.add_subcommand("rv-estimate", "martingale estimates of E exp(f(X))");
  rv_cmd->add_option("--input", rv_input, "cm-rv/1 document")->required();
  rv_cmd->add_option("--order", rv_order)->check(CLI::IsMember({"first", "second", "both"}));

  auto* poly_cmd = app.add_subcommand("poly-moments", "gaussian moments of a polynomial");
  poly_cmd->add_option("--input", poly_input, "cm-poly/1 document")->required();
  poly_cmd->add_option("--sigma", sigma_text, "covariance matrix");
  poly_cmd->add_option("--A", form_text, "quadratic form A (covariance (2A)^{-1})");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return emit_error("usage", e.what(), 2);
  }

  if (common.threads == 0) {
    const char* env = std::getenv("CM_THREADS");
    common.threads = env ? std::max(1, std::atoi(env)) : 1;
  }
  const auto format = common.format == "tsv" ? cm::io::Format::Tsv : cm::io::Format::Json;

  json config;
  config["format"] = common.format;
  config["seed"] = common.seed;
  config["threads"] = common.threads;
  config["constants"] = constants_json(common.k);

  try {
    json out;
    auto degree_doc = [&](json& cfg) {
      const json raw = degree_json(deg);
      const auto doc = cm::io::parse_degree_document(raw);
      cfg["degrees"] = cm::io::degree_document(doc.d, doc.H);
      return std::pair{doc, raw};
    };

    if (*saddle) {
      auto [doc, raw] = degree_doc(config);
      std::optional<std::pair<double, double>> ab, pq;
      if (!alpha_beta.empty()) {
        const auto v = parse_inline_or_file("--alpha-beta", alpha_beta);
        ab = {cm::io::to_double(v.at(0)), cm::io::to_double(v.at(1))};
        config["alpha_beta"] = v;
      }
      if (!p_q.empty()) {
        const auto v = parse_inline_or_file("--p-q", p_q);
        pq = {cm::io::to_double(v.at(0)), cm::io::to_double(v.at(1))};
        config["p_q"] = v;
      }
      const auto sol = cm::graphs::solve_saddle(doc.d);
      out = report("saddle", config);
      out["saddle"] = cm::io::to_json(sol);
      out["tameness"] = cm::io::to_json(cm::graphs::tameness_report(sol, doc.d, ab, pq));
    } else if (*count || *count_bip) {
      auto [doc, raw] = degree_doc(config);
      const bool bip = static_cast<bool>(*count_bip);
      cm::require(doc.d.bipartite() == bip, bip ? "count-bipartite: a bipartition is required"
                                                : "count: input is bipartite; use count-bipartite");
      out = report(bip ? "count-bipartite" : "count", config);
      merge(out, cm::io::to_json(cm::graphs::estimate_count(doc.d, doc.H, common.k)));
    } else if (*prob) {
      auto [doc, raw] = degree_doc(config);
      config["mode"] = prob_mode;
      const auto mode = prob_mode == "two-sided" ? cm::graphs::ProbMode::TwoSided : cm::graphs::ProbMode::UpperBound;
      out = report("prob", config);
      merge(out, cm::io::to_json(cm::graphs::estimate_subgraph_prob(doc.d, doc.H, common.k, mode)));
    } else if (*tournament) {
      config["n"] = tour_n;
      config["exact"] = tour_exact;
      out = report("tournament", config);
      merge(out, cm::io::to_json(cm::tour::tournament_count(tour_n, tour_exact)));
    } else if (*oracle_count) {
      auto [doc, raw] = degree_doc(config);
      config["budget"] = budget;
      cm::oracle::GraphCountQuery q{doc.d, doc.H, {}};
      q.budget.max_expansions = budget;
      out = report("oracle-count", config);
      out["count"] = cm::io::big(cm::oracle::exact_count(q));
    } else if (*sample) {
      auto [doc, raw] = degree_doc(config);
      config["method"] = sample_method;
      config["count"] = sample_count;
      config["budget"] = budget;
      out = report("sample", config);
      if (sample_method == "uniform") {
        cm::oracle::GraphCountQuery q{doc.d, doc.H, {}};
        q.budget.max_expansions = budget;
        out["population"] = cm::io::big(cm::oracle::exact_count(q));
        out["graphs"] = edge_sets(cm::oracle::uniform_sample(q, sample_count, common.seed));
      } else {
        cm::require(doc.H.empty(), "sample --method beta-model: H is not supported");
        const auto sol = cm::graphs::solve_saddle(doc.d);
        out["lambda"] = cm::io::matrix(sol.lambda);
        out["graphs"] = edge_sets(cm::oracle::beta_model_sample(sol.lambda, sample_count, common.seed));
      }
    } else if (*conc) {
      json raw = degree_json(deg);
      cm::oracle::ConcentrationConfig cc;
      const auto doc = cm::io::parse_degree_document(raw);
      cm::require(doc.H.empty(), "concentration: H must be empty");
      cc.d = doc.d;
      if (!y_text.empty()) raw["Y"] = parse_inline_or_file("--Y", y_text);
      if (auto it = raw.find("Y"); it != raw.end()) cc.Y = cm::io::to_edges(*it);
      if (!gammas.empty()) cc.gammas = gammas;
      else if (auto it = raw.find("gamma"); it != raw.end())
        cc.gammas = it->is_array() ? it->get<std::vector<double>>() : std::vector<double>{it->get<double>()};
      if (conc->count("--trials") == 0 && raw.contains("trials")) trials = raw["trials"].get<int>();
      if (app.count("--seed") == 0 && raw.contains("seed")) common.seed = raw["seed"].get<std::uint64_t>();
      cc.trials = trials;
      cc.seed = common.seed;
      cc.max_moment = max_moment;
      cc.budget.max_expansions = budget;
      config["seed"] = common.seed;
      config["degrees"] = cm::io::degree_document(doc.d, doc.H);
      config["Y"] = cm::io::edges(cc.Y);
      config["gamma"] = cc.gammas;
      config["trials"] = cc.trials;
      config["max_moment"] = cc.max_moment;
      config["budget"] = budget;
      out = report("concentration", config);
      merge(out, cm::io::to_json(cm::oracle::concentration_experiment(cc)));
    } else if (*whiten) {
      const json in = parse_inline_or_file("--input", whiten_input);
      cm::require(in.is_object() && in.contains("A") && in.contains("D") && in.contains("r") && in.contains("gamma"),
                  "whiten: input needs A, D, r and gamma");
      cm::linalg::WhiteningOptions wo;
      wo.seed = cm::substream_seed(common.seed, "whiten");
      if (in.contains("kernel_dim")) wo.kernel_dim = in["kernel_dim"].get<int>();
      config["input"] = in;
      out = report("whiten", config);
      merge(out, cm::io::to_json(cm::linalg::regularize_and_whiten(cm::io::to_matrix(in["A"]), cm::io::to_vector(in["D"]),
                                                                    cm::io::to_double(in["r"]),
                                                                    cm::io::to_double(in["gamma"]), wo)));
    } else if (*validate_cmd) {
      cm::validate::Options vo;
      vo.seed = common.seed;
      vo.threads = common.threads;
      vo.full = full;
      if (suite_names.empty())
        for (const auto& s : cm::validate::suites()) suite_names.push_back(s.name);
      for (const auto& name : suite_names) {
        const auto& all_suites = cm::validate::suites();
        cm::require(std::any_of(all_suites.begin(), all_suites.end(), [&](const auto& s) { return s.name == name; }),
                    "unknown validation suite '" + name + "'");
      }
      config["suites"] = suite_names;
      config["full"] = full;
      out = report("validate", config);
      out["suites"] = json::array();
      bool all = true;
      for (const auto& name : suite_names) {
        std::cerr << "[validate] " << name << " ..." << std::flush;
        const auto r = cm::validate::run_suite(name, vo);
        std::cerr << (r.pass() ? " pass" : " FAIL") << " (" << r.seconds << " s)\n";
        all = all && r.pass();
        out["suites"].push_back(cm::io::to_json(r));
      }
      out["pass"] = all;
      std::cout << cm::io::format_report(out, format);
      return all ? 0 : 1;
    } else if (*rv_cmd) {
      const json in = parse_inline_or_file("--input", rv_input);
      const auto doc = cm::io::parse_rv_document(in);
      config["order"] = rv_order;
      config["input"] = in;
      out = report("rv-estimate", config);
      out["exact"] = cm::io::complex(cm::rv::exact_exp_expectation(doc.f, doc.space));
      if (rv_order != "second") out["first"] = cm::io::to_json(cm::rv::first_order_estimate(doc.f, doc.space));
      if (rv_order != "first") out["second"] = cm::io::to_json(cm::rv::second_order_estimate(doc.f, doc.space));
    } else if (*poly_cmd) {
      const json in = parse_inline_or_file("--input", poly_input);
      const auto p = cm::io::parse_polynomial(in);
      cm::require(sigma_text.empty() != form_text.empty(), "poly-moments: give exactly one of --sigma and --A");
      const auto model = sigma_text.empty()
                             ? cm::gauss::GaussianModel::from_form(
                                   cm::gauss::QuadraticForm::make(cm::io::to_matrix(parse_inline_or_file("--A", form_text))))
                             : cm::gauss::GaussianModel::from_covariance(
                                   cm::io::to_matrix(parse_inline_or_file("--sigma", sigma_text)));
      cm::require(model.n() == p.dimension(), "poly-moments: covariance dimension differs from the polynomial's");
      config["polynomial"] = cm::io::polynomial(p);
      config["sigma"] = cm::io::matrix(model.sigma());
      out = report("poly-moments", config);
      merge(out, cm::io::to_json(cm::gauss::poly_expectation_stats(p, model)));
    }
    std::cout << cm::io::format_report(out, format);
    return 0;
  } catch (const cm::BudgetExceeded& e) {
    return emit_error("budget", e.what(), 3);
  } catch (const cm::PreconditionError& e) {
    return emit_error("precondition", e.what(), 2);
  } catch (const cm::ConvergenceError& e) {
    return emit_error("convergence", e.what(), 2);
  } catch (const json::exception& e) {
    return emit_error("precondition", std::string("malformed input: ") + e.what(), 2);
  } catch (const std::exception& e) {
    return emit_error("internal", e.what(), 1);
  }
}
