#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "oracle.hpp"
#include "pencil.hpp"
#include "types.hpp"

namespace dsmkit {

inline constexpr const char* kVersion = "0.1.0";

namespace io {

using json = nlohmann::json;

/// Malformed document or file; the message names the offending field.
class FormatError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------- numbers

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s, const std::string& what) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw FormatError(what + ": not a number: '" + std::string(s) + "'");
  return v;
}

/// Parses `<decimal>i` into a purely imaginary scalar. A bare decimal or any
/// real part is rejected.
inline cplx parse_lambda(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.size() < 2 || s.back() != 'i')
    throw FormatError("lambda: expected <decimal>i, got '" + std::string(s) + "'");
  std::string_view num = s.substr(0, s.size() - 1);
  if (!num.empty() && num.front() == '+') num.remove_prefix(1);
  double v = 0.0;
  const auto r = std::from_chars(num.data(), num.data() + num.size(), v);
  if (num.empty() || r.ec != std::errc() || r.ptr != num.data() + num.size() || !std::isfinite(v))
    throw FormatError("lambda: expected <decimal>i, got '" + std::string(s) + "'");
  return {0.0, v};
}

inline std::string format_lambda(cplx l) { return format_double(l.imag()) + "i"; }

inline std::vector<cplx> parse_lambda_list(std::string_view s) {
  std::vector<cplx> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string_view item =
        s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_lambda(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// ---------------------------------------------------------------- matrices

/// JSON null stands for a non-finite value (JSON has no inf or NaN).
inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline double number_from(const json& j, const std::string& field, double if_null) {
  if (j.is_null()) return if_null;
  if (!j.is_number()) throw FormatError("field '" + field + "' must be a number");
  return j.get<double>();
}

inline json matrix_to_json(const cmat& A) {
  json re = json::array(), im = json::array();
  for (Index i = 0; i < A.rows(); ++i) {
    json rr = json::array(), ri = json::array();
    for (Index j = 0; j < A.cols(); ++j) {
      rr.push_back(A(i, j).real());
      ri.push_back(A(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"rows", A.rows()}, {"cols", A.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline const json& field(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.is_object()) throw FormatError(ctx + ": expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw FormatError(ctx + ": missing field '" + key + "'");
  return *it;
}

inline cmat matrix_from_json(const json& j, const std::string& ctx = "matrix") {
  const json& jr = field(j, "rows", ctx);
  const json& jc = field(j, "cols", ctx);
  if (!jr.is_number_integer() || jr.get<long long>() < 0)
    throw FormatError(ctx + ": field 'rows' must be a nonnegative integer");
  if (!jc.is_number_integer() || jc.get<long long>() < 0)
    throw FormatError(ctx + ": field 'cols' must be a nonnegative integer");
  const Index rows = jr.get<Index>(), cols = jc.get<Index>();
  cmat A(rows, cols);
  for (const char* part : {"re", "im"}) {
    const json& arr = field(j, part, ctx);
    const std::string where = ctx + "." + part;
    if (!arr.is_array() || Index(arr.size()) != rows)
      throw FormatError(where + ": expected " + std::to_string(rows) + " rows");
    for (Index i = 0; i < rows; ++i) {
      const json& row = arr[std::size_t(i)];
      if (!row.is_array() || Index(row.size()) != cols)
        throw FormatError(where + "[" + std::to_string(i) + "]: expected " +
                          std::to_string(cols) + " entries");
      for (Index k = 0; k < cols; ++k) {
        const json& v = row[std::size_t(k)];
        if (!v.is_number())
          throw FormatError(where + "[" + std::to_string(i) + "][" + std::to_string(k) +
                            "]: not a number");
        const double d = v.get<double>();
        if (!std::isfinite(d))
          throw FormatError(where + "[" + std::to_string(i) + "][" + std::to_string(k) +
                            "]: not finite");
        if (part[0] == 'r')
          A(i, k).real(d);
        else
          A(i, k).imag(d);
      }
    }
  }
  return A;
}

/// A column vector stored as an n x 1 matrix file.
inline cvec vector_from_json(const json& j, const std::string& ctx = "vector") {
  const cmat A = matrix_from_json(j, ctx);
  if (A.cols() != 1) throw FormatError(ctx + ": expected a column vector (cols = 1)");
  return A.col(0);
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": invalid JSON (" + e.what() + ")");
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path + ": cannot open for writing");
  out << text;
  if (!out) throw FormatError(path + ": write failed");
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- pencils

inline json pencil_to_json(const PHPencil& P) {
  return {{"n", P.n()},
          {"m", P.m()},
          {"J", matrix_to_json(P.J)},
          {"R", matrix_to_json(P.R)},
          {"E", matrix_to_json(P.E)},
          {"B", matrix_to_json(P.B)},
          {"S", matrix_to_json(P.S)}};
}

/// Reads the blocks and checks the declared n, m against them. Structural
/// invariants are left to the caller (see load_pencil).
inline PHPencil pencil_from_json_unchecked(const json& j, const std::string& ctx = "pencil") {
  PHPencil P;
  P.J = matrix_from_json(field(j, "J", ctx), ctx + ".J");
  P.R = matrix_from_json(field(j, "R", ctx), ctx + ".R");
  P.E = matrix_from_json(field(j, "E", ctx), ctx + ".E");
  P.B = matrix_from_json(field(j, "B", ctx), ctx + ".B");
  P.S = matrix_from_json(field(j, "S", ctx), ctx + ".S");
  const json& jn = field(j, "n", ctx);
  const json& jm = field(j, "m", ctx);
  if (!jn.is_number_integer() || jn.get<Index>() != P.J.rows())
    throw FormatError(ctx + ": field 'n' does not match J");
  if (!jm.is_number_integer() || jm.get<Index>() != P.B.cols())
    throw FormatError(ctx + ": field 'm' does not match B");
  return P;
}

inline PHPencil pencil_from_json(const json& j, const ToleranceConfig& cfg = {},
                                 const std::string& ctx = "pencil") {
  PHPencil P = pencil_from_json_unchecked(j, ctx);
  P.validate(cfg);
  return P;
}

// ---------------------------------------------------------------- results

inline json conditions_to_json(const std::vector<Condition>& cs) {
  json a = json::array();
  for (const auto& c : cs) a.push_back({{"name", c.name}, {"held", c.held}});
  return a;
}

inline std::vector<Condition> conditions_from_json(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw FormatError(ctx + ": expected an array");
  std::vector<Condition> out;
  for (const auto& c : j) {
    const json& nm = field(c, "name", ctx);
    const json& hd = field(c, "held", ctx);
    if (!nm.is_string() || !hd.is_boolean()) throw FormatError(ctx + ": malformed condition");
    out.push_back({nm.get<std::string>(), hd.get<bool>()});
  }
  return out;
}

inline json residuals_to_json(const ResidualReport& r) {
  return {{"interp_x", r.interp_x},
          {"interp_z", r.interp_z},
          {"structure_defect", r.structure_defect},
          {"min_eig", number_or_null(r.min_eig)},
          {"checks", conditions_to_json(r.checks)},
          {"pass", r.pass}};
}

inline ResidualReport residuals_from_json(const json& j) {
  const std::string ctx = "residuals";
  ResidualReport r;
  r.interp_x = number_from(field(j, "interp_x", ctx), "residuals.interp_x", 0.0);
  r.interp_z = number_from(field(j, "interp_z", ctx), "residuals.interp_z", 0.0);
  r.structure_defect =
      number_from(field(j, "structure_defect", ctx), "residuals.structure_defect", 0.0);
  r.min_eig = number_from(field(j, "min_eig", ctx), "residuals.min_eig",
                          std::numeric_limits<double>::quiet_NaN());
  r.checks = conditions_from_json(field(j, "checks", ctx), "residuals.checks");
  const json& p = field(j, "pass", ctx);
  if (!p.is_boolean()) throw FormatError("residuals.pass must be a boolean");
  r.pass = p.get<bool>();
  return r;
}

/// Output of `map solve`: the problem echo, the verdict, the norm bracket and
/// the solution with its residual audit.
struct ResultDocument {
  std::string kind;  ///< map, two-sided, dsm, type1, type2
  std::string family;
  std::map<std::string, cmat> problem;  ///< x, y and optionally z, w
  bool feasible = false;
  std::string reason;
  double norm_lower = 0.0;
  double norm_upper = 0.0;
  bool exact = false;
  std::string note;
  std::optional<cmat> solution;
  std::optional<ResidualReport> residuals;
  std::string version = kVersion;
  std::optional<std::uint64_t> seed;
};

inline json result_to_json(const ResultDocument& d) {
  json prob = json::object();
  for (const auto& [k, v] : d.problem) prob[k] = matrix_to_json(v);
  json j = {{"tool", "dsmkit"},
            {"version", d.version},
            {"seed", d.seed ? json(*d.seed) : json(nullptr)},
            {"kind", d.kind},
            {"family", d.family},
            {"problem", std::move(prob)},
            {"feasible", d.feasible},
            {"reason", d.reason},
            {"norm",
             {{"lower", number_or_null(d.norm_lower)},
              {"upper", number_or_null(d.norm_upper)},
              {"exact", d.exact}}},
            {"note", d.note}};
  if (d.solution) j["solution"] = {{"Delta", matrix_to_json(*d.solution)}};
  if (d.residuals) j["residuals"] = residuals_to_json(*d.residuals);
  return j;
}

inline std::string string_field(const json& j, const std::string& key, const std::string& ctx) {
  const json& v = field(j, key, ctx);
  if (!v.is_string()) throw FormatError(ctx + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

inline bool bool_field(const json& j, const std::string& key, const std::string& ctx) {
  const json& v = field(j, key, ctx);
  if (!v.is_boolean()) throw FormatError(ctx + ": field '" + key + "' must be a boolean");
  return v.get<bool>();
}

inline ResultDocument result_from_json(const json& j) {
  const std::string ctx = "result";
  ResultDocument d;
  d.version = string_field(j, "version", ctx);
  const json& seed = field(j, "seed", ctx);
  if (!seed.is_null()) {
    if (!seed.is_number_unsigned()) throw FormatError("result: field 'seed' must be an unsigned integer");
    d.seed = seed.get<std::uint64_t>();
  }
  d.kind = string_field(j, "kind", ctx);
  d.family = string_field(j, "family", ctx);
  const json& prob = field(j, "problem", ctx);
  if (!prob.is_object()) throw FormatError("result: field 'problem' must be an object");
  for (const auto& [k, v] : prob.items()) d.problem[k] = matrix_from_json(v, "problem." + k);
  d.feasible = bool_field(j, "feasible", ctx);
  d.reason = string_field(j, "reason", ctx);
  const json& norm = field(j, "norm", ctx);
  const double inf = std::numeric_limits<double>::infinity();
  d.norm_lower = number_from(field(norm, "lower", "norm"), "norm.lower", inf);
  d.norm_upper = number_from(field(norm, "upper", "norm"), "norm.upper", inf);
  d.exact = bool_field(norm, "exact", "norm");
  d.note = string_field(j, "note", ctx);
  if (j.contains("solution"))
    d.solution = matrix_from_json(field(j["solution"], "Delta", "solution"), "solution.Delta");
  if (j.contains("residuals")) d.residuals = residuals_from_json(j["residuals"]);
  return d;
}

/// Output of a single-shot `backerr`: inputs, bounds and the reconstructed
/// perturbation at the upper bound.
struct BackerrDocument {
  PHPencil pencil;
  cplx lambda{0.0, 0.0};
  cvec u;
  BackwardErrorBounds bounds;
  std::optional<PerturbationBlocks> perturbation;
  double residual = std::numeric_limits<double>::quiet_NaN();  ///< relative ‖(L−ΔL)(λ)u‖
  std::string version = kVersion;
  std::optional<std::uint64_t> seed;
};

inline json backerr_to_json(const BackerrDocument& d) {
  const auto& b = d.bounds;
  json j = {{"tool", "dsmkit"},
            {"version", d.version},
            {"seed", d.seed ? json(*d.seed) : json(nullptr)},
            {"kind", "backerr"},
            {"pencil", pencil_to_json(d.pencil)},
            {"lambda", format_lambda(d.lambda)},
            {"u", matrix_to_json(d.u)},
            {"blocks", b.blocks.str()},
            {"variant", to_string(b.variant)},
            {"finite", b.finite},
            {"eta_lower", number_or_null(b.eta_lower)},
            {"eta_upper", number_or_null(b.eta_upper)},
            {"exact", b.exact},
            {"alpha", {{"re", b.alpha.real()}, {"im", b.alpha.imag()}}},
            {"conditions", conditions_to_json(b.conditions)},
            {"conditions_report", b.conditions_report()}};
  if (b.H1.size()) j["H1"] = matrix_to_json(b.H1);
  if (b.H2.size()) j["H2"] = matrix_to_json(b.H2);
  if (d.perturbation) {
    j["perturbation"] = {{"dJ", matrix_to_json(d.perturbation->dJ)},
                         {"dR", matrix_to_json(d.perturbation->dR)},
                         {"dE", matrix_to_json(d.perturbation->dE)},
                         {"dB", matrix_to_json(d.perturbation->dB)},
                         {"norm", d.perturbation->norm()}};
    j["residual"] = number_or_null(d.residual);
  }
  return j;
}

inline BackerrDocument backerr_from_json(const json& j, const ToleranceConfig& cfg = {}) {
  const std::string ctx = "backerr";
  BackerrDocument d;
  d.version = string_field(j, "version", ctx);
  const json& seed = field(j, "seed", ctx);
  if (!seed.is_null()) {
    if (!seed.is_number_unsigned()) throw FormatError("backerr: field 'seed' must be an unsigned integer");
    d.seed = seed.get<std::uint64_t>();
  }
  d.pencil = pencil_from_json(field(j, "pencil", ctx), cfg);
  d.lambda = parse_lambda(string_field(j, "lambda", ctx));
  d.u = vector_from_json(field(j, "u", ctx), "u");
  auto& b = d.bounds;
  try {
    b.blocks = BlockSelection::parse(string_field(j, "blocks", ctx));
    b.variant = parse_variant(string_field(j, "variant", ctx));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("backerr: ") + e.what());
  }
  b.finite = bool_field(j, "finite", ctx);
  const double inf = std::numeric_limits<double>::infinity();
  b.eta_lower = number_from(field(j, "eta_lower", ctx), "eta_lower", inf);
  b.eta_upper = number_from(field(j, "eta_upper", ctx), "eta_upper", inf);
  b.exact = bool_field(j, "exact", ctx);
  const json& a = field(j, "alpha", ctx);
  b.alpha = {number_from(field(a, "re", "alpha"), "alpha.re", 0.0),
             number_from(field(a, "im", "alpha"), "alpha.im", 0.0)};
  b.conditions = conditions_from_json(field(j, "conditions", ctx), "conditions");
  if (j.contains("H1")) b.H1 = matrix_from_json(j["H1"], "H1");
  if (j.contains("H2")) b.H2 = matrix_from_json(j["H2"], "H2");
  if (j.contains("perturbation")) {
    const json& p = j["perturbation"];
    d.perturbation = PerturbationBlocks{matrix_from_json(field(p, "dJ", "perturbation"), "dJ"),
                                        matrix_from_json(field(p, "dR", "perturbation"), "dR"),
                                        matrix_from_json(field(p, "dE", "perturbation"), "dE"),
                                        matrix_from_json(field(p, "dB", "perturbation"), "dB")};
    d.residual = number_from(field(j, "residual", ctx), "residual",
                             std::numeric_limits<double>::quiet_NaN());
  }
  return d;
}

// ---------------------------------------------------------------- CSV

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Experiment rows as `lambda,eta_lower,eta_upper,finite,conditions`.
inline std::string experiment_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream os;
  os << "lambda,eta_lower,eta_upper,finite,conditions\n";
  for (const auto& r : rows)
    os << format_lambda(r.lambda) << ',' << format_double(r.eta_lower) << ','
       << format_double(r.eta_upper) << ',' << (r.finite ? "true" : "false") << ','
       << csv_quote(r.conditions) << '\n';
  return os.str();
}

}  // namespace io
}  // namespace dsmkit
