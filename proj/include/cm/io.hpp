#pragma once

// JSON documents (cm-deg/1, cm-poly/1, cm-rv/1), result serialization and
// the flat TSV view used by the command-line front end.

#include <json.hpp>

#include <string>

#include "cm/complexrv.hpp"
#include "cm/gaussian.hpp"
#include "cm/graphenum.hpp"
#include "cm/linalg.hpp"
#include "cm/oracle.hpp"
#include "cm/tournaments.hpp"
#include "cm/validate.hpp"

namespace cm::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kDegSchema = "cm-deg/1";
inline constexpr const char* kPolySchema = "cm-poly/1";
inline constexpr const char* kRvSchema = "cm-rv/1";

enum class Format { Json, Tsv };

// Scalars. Non-finite doubles become the strings "inf", "-inf", "nan";
// big integers are numbers when they fit in 64 bits, decimal strings
// otherwise. Complex values are [re, im].
json number(double x);
double to_double(const json& j);
json big(const oracle::BigInt& x);
json complex(cplx z);
cplx to_complex(const json& j);
json vector(const Eigen::VectorXd& v);
json matrix(const Eigen::MatrixXd& m);  // row-major nested arrays
Eigen::VectorXd to_vector(const json& j);
Eigen::MatrixXd to_matrix(const json& j);
json edges(const std::vector<graphs::Edge>& es);
std::vector<graphs::Edge> to_edges(const json& j);

// All parsers throw PreconditionError naming the offending field. A
// "version" field, when present, must match.
struct DegreeDocument {
  graphs::DegreeSequence d;
  graphs::ConstraintPair H;
};
DegreeDocument parse_degree_document(const json& j);
json degree_document(const graphs::DegreeSequence& d, const graphs::ConstraintPair& H);

gauss::SparsePolynomial parse_polynomial(const json& j);
json polynomial(const gauss::SparsePolynomial& p);

struct RvDocument {
  rv::DiscreteProductSpace space;
  rv::TabulatedFunction f;
};
RvDocument parse_rv_document(const json& j);
json rv_document(const rv::DiscreteProductSpace& space, const rv::TabulatedFunction& f);

json to_json(const graphs::SaddleSolution& s);
graphs::SaddleSolution saddle_from_json(const json& j);
json to_json(const graphs::TamenessReport& t);
json to_json(const graphs::EnumEstimate& e);
json to_json(const graphs::ProbEstimate& p);
json to_json(const tour::TournamentCount& t);
json to_json(const oracle::ConcentrationReport& r);
json to_json(const linalg::WhiteningResult& w);
json to_json(const rv::BoundReport& b);
json to_json(const gauss::PolyStats& s);
json to_json(const validate::SuiteResult& r);

// TSV: header "key<TAB>value", then one row per leaf with a dotted path
// (array elements by index) and the leaf as JSON text. Empty containers
// are leaves. parse_tsv inverts format_report(.., Tsv) exactly.
std::string format_report(const json& report, Format format);
json parse_tsv(const std::string& text);

}  // namespace cm::io
