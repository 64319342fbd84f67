#include "doctest.h"

#include <cmath>
#include <limits>

#include "cm/io.hpp"

using namespace cm;
using io::json;

namespace {

graphs::DegreeSequence general(std::vector<int> d) { return graphs::DegreeSequence{std::move(d), std::nullopt}; }

json reparse(const json& report) { return io::parse_tsv(io::format_report(report, io::Format::Tsv)); }

}  // namespace

TEST_CASE("scalars: non-finite reals, big integers, complex") {
  CHECK(io::number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(io::number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(io::number(std::nan("")) == "nan");
  CHECK(std::isinf(io::to_double(json("inf"))));
  CHECK(io::to_double(json("-inf")) < 0);
  CHECK(std::isnan(io::to_double(json("nan"))));
  CHECK_THROWS_AS(io::to_double(json("seven")), PreconditionError);

  CHECK(io::big(oracle::BigInt(19355)) == 19355);
  const oracle::BigInt huge = oracle::BigInt(1) << 80;
  CHECK(io::big(huge) == "1208925819614629174706176");

  const cplx z(0.25, -1.5);
  CHECK(io::to_complex(io::complex(z)) == z);
  CHECK(io::to_complex(json(3.0)) == cplx(3.0, 0.0));
  CHECK_THROWS_AS(io::to_complex(json::array({1, 2, 3})), PreconditionError);
}

TEST_CASE("saddle solution survives JSON and TSV bit for bit") {
  const auto d = general({3, 2, 2, 3, 4, 2, 3, 1});
  const auto sol = graphs::solve_saddle(d);
  const json j = io::to_json(sol);
  const auto back = io::saddle_from_json(json::parse(j.dump()));
  REQUIRE(back.beta.size() == sol.beta.size());
  for (Eigen::Index i = 0; i < sol.beta.size(); ++i) CHECK(back.beta[i] == sol.beta[i]);
  CHECK(back.lambda == sol.lambda);
  CHECK(back.residual == sol.residual);

  const json report = {{"command", "saddle"}, {"saddle", j}};
  const json rt = reparse(report);
  CHECK(rt == report);
  const auto back2 = io::saddle_from_json(rt["saddle"]);
  for (Eigen::Index i = 0; i < sol.beta.size(); ++i) CHECK(back2.beta[i] == sol.beta[i]);
}

TEST_CASE("TSV layout") {
  CHECK(io::format_report(json::object(), io::Format::Tsv) == "key\tvalue\n");
  CHECK(io::parse_tsv("key\tvalue\n") == json::object());
  CHECK_THROWS_AS(io::parse_tsv("k\tv\n"), PreconditionError);
  CHECK_THROWS_AS(io::parse_tsv("key\tvalue\nnovalue\n"), PreconditionError);

  const auto est = graphs::estimate_count(general(std::vector<int>(8, 3)), {});
  const std::string tsv = io::format_report(io::to_json(est), io::Format::Tsv);
  CHECK(tsv.find("\nlog_count\t") != std::string::npos);
  CHECK(tsv.find("\nerror_radius\t") != std::string::npos);
  CHECK(tsv.find("\ncomponents.log_C\t") != std::string::npos);
  CHECK(tsv.find("\nsaddle.beta.0\t") != std::string::npos);

  const json odd = {{"empty_list", json::array()},
                    {"empty_obj", json::object()},
                    {"text", "tab-free \"quoted\""},
                    {"nested", {{"a", {1, {{"b", nullptr}}}}}},
                    {"flag", false}};
  CHECK(reparse(odd) == odd);
}

TEST_CASE("degree documents") {
  const json j = json::parse(R"({"version":"cm-deg/1","d":[1,1,2,2],"H_plus":[[0,2]],"H_minus":[[1,0]]})");
  const auto doc = io::parse_degree_document(j);
  CHECK(doc.d.d == std::vector<int>{1, 1, 2, 2});
  CHECK_FALSE(doc.d.bipartite());
  REQUIRE(doc.H.minus.size() == 1);
  CHECK(doc.H.minus[0] == graphs::Edge{0, 1});
  const json out = io::degree_document(doc.d, doc.H);
  const auto again = io::parse_degree_document(out);
  CHECK(again.d.d == doc.d.d);
  CHECK(again.H.plus == doc.H.plus);
  CHECK(again.H.minus == doc.H.minus);

  CHECK_THROWS_AS(io::parse_degree_document(json::parse(R"({"version":"cm-deg/2","d":[1,1]})")), PreconditionError);
  CHECK_THROWS_AS(io::parse_degree_document(json::parse(R"({"version":"cm-deg/1"})")), PreconditionError);
  CHECK_THROWS_AS(io::parse_degree_document(json::parse(R"({"d":[1,1],"bipartition":[1]})")), PreconditionError);
  CHECK_THROWS_AS(io::parse_degree_document(json::parse(R"({"d":[1,1],"H_plus":[[0,0]]})")), PreconditionError);
  CHECK_THROWS_AS(io::parse_degree_document(json::parse(R"({"d":[1,1],"H_plus":[[0,5]]})")), PreconditionError);
}

TEST_CASE("polynomial documents") {
  const auto p = io::parse_polynomial(json::parse(R"({"version":"cm-poly/1","terms":[[[2,0],[1,0]],[[1,1],[0,2]],[[2,0],1]]})"));
  CHECK(p.dimension() == 2);
  CHECK(p.size() == 2);
  CHECK(p.terms().at(gauss::Exponent{2, 0}) == cplx(2, 0));
  CHECK(p.terms().at(gauss::Exponent{1, 1}) == cplx(0, 2));
  const auto q = io::parse_polynomial(io::polynomial(p));
  CHECK(q.terms() == p.terms());
  CHECK(io::parse_polynomial(json::parse(R"({"n":3,"terms":[]})")).dimension() == 3);

  CHECK_THROWS_AS(io::parse_polynomial(json::parse(R"({"terms":[]})")), PreconditionError);
  CHECK_THROWS_AS(io::parse_polynomial(json::parse(R"({"terms":[[[1],1],[[1,0],1]]})")), PreconditionError);
  CHECK_THROWS_AS(io::parse_polynomial(json::parse(R"({"terms":[[[-1],1]]})")), PreconditionError);
  CHECK_THROWS_AS(io::parse_polynomial(json::parse(R"({"version":"cm-rv/1","terms":[]})")), PreconditionError);
}

TEST_CASE("random-variable documents") {
  const json j = json::parse(R"({"version":"cm-rv/1",
    "coords":[[[[1,0],0.5],[[-1,0],0.5]],[[[0,1],1]]],
    "table":[[[1,0],[0,-1]],[[0,0],[0.5,0.25]]]})");
  const auto doc = io::parse_rv_document(j);
  CHECK(doc.space.dimension() == 2);
  CHECK(doc.f.size() == 2);
  CHECK(doc.f[0] == cplx(0.5, 0.25));
  CHECK(doc.f[1] == cplx(0, -1));
  const auto again = io::parse_rv_document(io::rv_document(doc.space, doc.f));
  CHECK(again.f.values() == doc.f.values());

  json missing = j;
  missing["table"].erase(0);
  CHECK_THROWS_AS(io::parse_rv_document(missing), PreconditionError);
  json dup = j;
  dup["table"][0][0] = json::array({0, 0});
  CHECK_THROWS_AS(io::parse_rv_document(dup), PreconditionError);
  json badprob = j;
  badprob["coords"][0][0][1] = 0.6;
  CHECK_THROWS_AS(io::parse_rv_document(badprob), PreconditionError);
  json range = j;
  range["table"][0][0] = json::array({2, 0});
  CHECK_THROWS_AS(io::parse_rv_document(range), PreconditionError);
}
