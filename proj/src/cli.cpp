#include "qheun/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "qheun/error.hpp"
#include "qheun/operator.hpp"
#include "qheun/qes.hpp"
#include "qheun/qhypergeometric.hpp"
#include "qheun/version.hpp"

namespace qheun::cli {

namespace {

constexpr std::string_view kCommandNames[] = {"exponents", "series", "apparency", "characterize",
                                              "qes",       "limit",  "hypergeom", "sweep"};
constexpr std::string_view kScalarKeys[] = {"q", "alpha1", "alpha2", "beta", "E", "Etilde"};
constexpr std::string_view kListKeys[] = {"h", "l", "t"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool is_list_key(std::string_view key) {
  return std::find(std::begin(kListKeys), std::end(kListKeys), key) != std::end(kListKeys);
}

bool is_scalar_key(std::string_view key) {
  return std::find(std::begin(kScalarKeys), std::end(kScalarKeys), key) != std::end(kScalarKeys);
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::ValidationError, what); }

const std::string& require(const ParamMap& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) invalid("missing required parameter '" + key + "'");
  return it->second;
}

Scalar scalar_or(const ParamMap& params, const std::string& key, Scalar fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : parse_scalar(it->second, key);
}

Family parse_family(const ParamMap& params) {
  try {
    return family_from_string(trim(require(params, "family")));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ValidationError) throw;
    invalid(e.what());
  }
}

std::string format_number(Scalar x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json number_or_null(Scalar x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json array_of(const std::vector<Scalar>& xs) {
  Json a = Json::array();
  for (Scalar x : xs) a.push_back(number_or_null(x));
  return a;
}

Json point_json(const OdePoint& p) { return p.infinite ? Json("inf") : Json(p.x); }

std::string point_name(BasePoint p) { return p == BasePoint::Zero ? "zero" : "inf"; }

QDiffEquation equation_for(const ModelParams& p) { return build_equation(p); }

Json exponents_json(const ExponentPair& ex) {
  Json j;
  j["lambda1"] = ex.lambda1;
  j["lambda2"] = ex.lambda2;
  j["difference"] = ex.difference;
  j["resonant"] = ex.resonant;
  if (auto idx = ex.resonance_index()) j["resonance_index"] = *idx;
  else j["resonance_index"] = nullptr;
  return j;
}

Json run_exponents(const RunConfig& c) {
  const ModelParams p = model_params(c.params);
  const QDiffEquation eq = equation_for(p);
  const ExponentPair ex = exponents(eq, c.point, c.tol);
  Json j;
  j["point"] = point_name(c.point);
  j.update(exponents_json(ex));
  j["characteristic_residuals"] = {characteristic_residual(eq, c.point, ex.lambda1),
                                   characteristic_residual(eq, c.point, ex.lambda2)};
  return j;
}

Json run_series(const RunConfig& c) {
  const ModelParams p = model_params(c.params);
  const QDiffEquation eq = equation_for(p);
  Scalar lambda = 0.0;
  if (c.lambda) {
    lambda = *c.lambda;
  } else {
    const ExponentPair ex = exponents(eq, c.point, c.tol);
    lambda = c.exponent_index == 1 ? ex.lambda1 : ex.lambda2;
  }
  const LocalExpansion s = frobenius_series(eq, c.point, lambda, c.order, c.tol);
  const ResidualProfile prof = residual_profile(eq, s);
  Json j;
  j["point"] = point_name(c.point);
  j["lambda"] = lambda;
  j["status"] = std::string(to_string(s.status));
  j["order"] = s.order;
  if (s.resonance) j["resonance"] = *s.resonance;
  else j["resonance"] = nullptr;
  j["consistency"] = s.consistency;
  j["coefficients"] = array_of(s.coeffs);
  std::vector<Scalar> rel;
  for (std::size_t n = 0; n <= static_cast<std::size_t>(s.order); ++n) rel.push_back(prof.relative(n));
  j["residual_relative"] = array_of(rel);
  j["residual_max_relative"] = prof.max_relative(static_cast<std::size_t>(s.order));
  return j;
}

Json run_apparency(const RunConfig& c) {
  const ModelParams p = model_params(c.params);
  const ApparencyCheck a = check_apparency(equation_for(p), c.point, c.tol);
  Json j;
  j["point"] = point_name(c.point);
  j.update(exponents_json(a.exponents));
  if (a.index) j["index"] = *a.index;
  else j["index"] = nullptr;
  j["consistency"] = a.consistency;
  if (a.apparent) j["apparent"] = *a.apparent;
  else j["apparent"] = nullptr;
  return j;
}

Json run_characterize(const RunConfig& c) {
  const VariantSkeleton sk = skeleton(c.params);
  Json j;
  Json b;
  if (sk.family == Family::A3) {
    const DerivedA3 d = derive_b_A3(sk);
    b["b3"] = d.b3;
    b["b2"] = d.b2;
    b["b0"] = d.b0;
    j["lambda"] = d.lambda;
  } else {
    const DerivedA2 d = derive_b_A2(sk);
    b["b4"] = d.b4;
    b["b3"] = d.b3;
    b["b1"] = d.b1;
    b["b0"] = d.b0;
    j["lambda"] = d.lambda;
  }
  j["derived"] = b;
  const CharacterizationReport rep = verify_characterization(sk, c.tol);
  j["all_pass"] = rep.all_pass();
  Json conds = Json::array();
  for (const auto& cond : rep.conditions) {
    Json r;
    r["name"] = cond.name;
    r["pass"] = cond.pass;
    r["expected"] = number_or_null(cond.expected);
    r["observed"] = number_or_null(cond.observed);
    r["residual"] = number_or_null(cond.residual);
    r["note"] = cond.note;
    conds.push_back(r);
  }
  j["conditions"] = conds;
  return j;
}

Json run_qes(const RunConfig& c) {
  const ModelParams p = model_params(c.params);
  Json subs = Json::array();
  for (const InvariantSubspace& sub : find_subspaces(p, c.tol)) {
    Json s;
    s["lambda"] = sub.lambda;
    s["n"] = sub.n;
    if (sub.alpha) s["alpha"] = *sub.alpha;
    else s["alpha"] = nullptr;
    s["dimension"] = sub.dimension();
    s["closure_defect"] = sub.closure_defect;
    if (sub.n == 0) {
      s["closed_form"] = p.family == Family::A4 ? one_dimensional_eigenvalue_A4(p, *sub.alpha)
                                                : one_dimensional_eigenvalue_variant(p);
    }
    Json pairs = Json::array();
    for (const EigenPair& ep : eigenpairs(p, sub)) {
      Json e;
      e["eigenvalue"] = {ep.eigenvalue.real(), ep.eigenvalue.imag()};
      e["residual"] = ep.residual;
      Json coeffs = Json::array();
      for (const auto& z : ep.coefficients) coeffs.push_back({z.real(), z.imag()});
      e["coefficients"] = coeffs;
      pairs.push_back(e);
    }
    s["eigenpairs"] = pairs;
    subs.push_back(s);
  }
  Json j;
  j["subspaces"] = subs;
  return j;
}

Json run_limit(const RunConfig& c) {
  const LimitSetup setup = limit_setup(c.params);
  std::vector<Scalar> eps = c.epsilons;
  if (eps.empty()) eps = {std::pow(10.0, -1.5), 1e-2, std::pow(10.0, -2.5)};
  const LimitReport rep = verify_limit(setup, eps, c.order);
  const FuchsianODE ode = limit_ode(setup, setup.Etilde + rep.offset);
  Json j;
  j["family"] = std::string(to_string(setup.family));
  j["exponent"] = rep.exponent;
  j["fit_index"] = rep.fit_index;
  j["offset"] = rep.offset;
  j["offset_stability"] = rep.offset_stability;
  j["slopes"] = array_of(rep.slopes);
  Json samples = Json::array();
  for (const auto& s : rep.samples) {
    Json r;
    r["epsilon"] = s.epsilon;
    r["q_exponent"] = s.q_exponent;
    r["exponent_gap"] = s.exponent_gap;
    r["fitted_offset"] = s.fitted_offset;
    r["differences"] = array_of(s.differences);
    samples.push_back(r);
  }
  j["samples"] = samples;
  Json o;
  o["ltilde"] = ode.ltilde;
  o["Btilde"] = ode.Btilde;
  o["p2"] = array_of(ode.p2);
  o["p1"] = array_of(ode.p1);
  o["p0"] = array_of(ode.p0);
  o["coefficients"] = array_of(rep.ode_coeffs);
  j["ode"] = o;
  Json scheme = Json::array();
  for (const auto& col : riemann_scheme(ode)) {
    Json r;
    r["point"] = point_json(col.point);
    r["computed"] = {col.computed[0], col.computed[1]};
    r["expected"] = {col.expected[0], col.expected[1]};
    scheme.push_back(r);
  }
  j["riemann_scheme"] = scheme;
  const HeunForm hf = to_heun_form(ode);
  Json h;
  h["t"] = hf.t;
  h["gamma"] = hf.gamma;
  h["delta"] = hf.delta;
  h["epsilon"] = hf.epsilon;
  h["alphaP"] = hf.alphaP;
  h["betaP"] = hf.betaP;
  h["fuchs_defect"] = hf.fuchs_defect();
  h["accessory_offset_known"] = hf.accessory_offset_known;
  j["heun"] = h;
  return j;
}

Json run_hypergeom(const RunConfig& c) {
  ModelParams p = model_params(c.params);
  if (!c.params.count("E")) p.E = reducible_accessory(p);
  const HypergeometricReduction red = reduce_to_q_hypergeometric(p, c.tol);
  const int terms = std::max(c.order, 1);
  const LaurentPoly f = q_hypergeometric_series(red.a, red.b, red.c, p.q, terms, c.tol);
  const LaurentPoly res = apply_equation(red.equation, f);
  const LaurentPoly mag = apply_equation_magnitude(red.equation, 0.0, f);
  std::vector<Scalar> rel;
  Scalar worst = 0.0;
  for (int n = 0; n < terms; ++n) {
    const Scalar m = mag[n];
    const Scalar r = m > 0.0 ? std::abs(res[n]) / m : std::abs(res[n]);
    rel.push_back(r);
    worst = std::max(worst, r);
  }
  std::vector<Scalar> coeffs;
  for (int n = 0; n < terms; ++n) coeffs.push_back(f[n]);
  Json j;
  j["E"] = p.E;
  j["a"] = red.a;
  j["b"] = red.b;
  j["c"] = red.c;
  j["root"] = red.root;
  j["scale"] = red.scale;
  j["nu"] = red.nu;
  j["remainder"] = red.remainder;
  j["terms"] = terms;
  j["coefficients"] = array_of(coeffs);
  j["residual_relative"] = array_of(rel);
  j["residual_max_relative"] = worst;
  return j;
}

std::string sweep_summary(Command target, const Json& results) {
  std::ostringstream os;
  if (target == Command::Qes) {
    bool first = true;
    for (const auto& s : results["subspaces"]) {
      if (!first) os << ' ';
      first = false;
      os << "n=" << s["n"].get<int>() << "@lambda=" << format_number(s["lambda"].get<Scalar>());
    }
  } else if (results.contains("lambda1")) {
    os << "lambda1=" << format_number(results["lambda1"].get<Scalar>())
       << " lambda2=" << format_number(results["lambda2"].get<Scalar>());
  } else if (results.contains("offset")) {
    os << "offset=" << format_number(results["offset"].get<Scalar>());
  } else if (results.contains("all_pass")) {
    os << "all_pass=" << (results["all_pass"].get<bool>() ? "true" : "false");
  }
  return os.str();
}

Json error_json(ErrorKind kind, const std::string& message) {
  Json j;
  j["kind"] = std::string(to_string(kind));
  j["message"] = message;
  j["exit_code"] = exit_code(kind);
  return j;
}

Json run_sweep(const RunConfig& c) {
  if (!c.sweep) invalid("sweep requires --sweep key=start:stop:step");
  if (c.target == Command::Sweep) invalid("sweep target cannot be sweep");
  const std::vector<Scalar> grid = c.sweep->grid();
  with_value(c.params, c.sweep->key, grid.front());
  std::vector<Json> rows(grid.size());
  auto eval = [&](std::size_t i) {
    Json row;
    row["index"] = i;
    row["value"] = grid[i];
    try {
      RunConfig sub = c;
      sub.command = c.target;
      sub.sweep.reset();
      sub.params = with_value(c.params, c.sweep->key, grid[i]);
      Json res = execute(sub);
      row["status"] = "ok";
      row["summary"] = sweep_summary(c.target, res);
      row["results"] = std::move(res);
    } catch (const Error& e) {
      row["status"] = "error";
      row["error"] = error_json(e.kind(), e.what());
    }
    return row;
  };
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < grid.size(); start += workers) {
    std::vector<std::future<Json>> batch;
    const std::size_t stop = std::min(grid.size(), start + workers);
    for (std::size_t i = start; i < stop; ++i) batch.push_back(std::async(std::launch::async, eval, i));
    for (std::size_t i = start; i < stop; ++i) rows[i] = batch[i - start].get();
  }
  Json j;
  j["target"] = std::string(to_string(c.target));
  j["key"] = c.sweep->key;
  j["start"] = c.sweep->start;
  j["stop"] = c.sweep->stop;
  j["step"] = c.sweep->step;
  j["rows"] = rows;
  return j;
}

// Flat table for csv and human output.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number()) return format_number(v.get<Scalar>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

Table table_for(Command command, const Json& r) {
  Table t;
  switch (command) {
    case Command::Exponents:
      t.header = {"point", "lambda1", "lambda2", "difference", "resonant"};
      t.rows.push_back({cell(r["point"]), cell(r["lambda1"]), cell(r["lambda2"]), cell(r["difference"]),
                        cell(r["resonant"])});
      break;
    case Command::Series:
    case Command::Hypergeom:
      t.header = {"n", "coefficient", "residual_relative"};
      for (std::size_t n = 0; n < r["coefficients"].size(); ++n) {
        t.rows.push_back({std::to_string(n), cell(r["coefficients"][n]), cell(r["residual_relative"][n])});
      }
      break;
    case Command::Apparency:
      t.header = {"point", "lambda1", "lambda2", "index", "consistency", "apparent"};
      t.rows.push_back({cell(r["point"]), cell(r["lambda1"]), cell(r["lambda2"]), cell(r["index"]),
                        cell(r["consistency"]), cell(r["apparent"])});
      break;
    case Command::Characterize:
      t.header = {"condition", "pass", "expected", "observed", "residual"};
      for (const auto& c : r["conditions"]) {
        t.rows.push_back({cell(c["name"]), cell(c["pass"]), cell(c["expected"]), cell(c["observed"]),
                          cell(c["residual"])});
      }
      break;
    case Command::Qes:
      t.header = {"lambda", "n", "alpha", "closure_defect", "eigenvalue_re", "eigenvalue_im", "residual"};
      for (const auto& s : r["subspaces"]) {
        for (const auto& e : s["eigenpairs"]) {
          t.rows.push_back({cell(s["lambda"]), cell(s["n"]), cell(s["alpha"]), cell(s["closure_defect"]),
                            cell(e["eigenvalue"][0]), cell(e["eigenvalue"][1]), cell(e["residual"])});
        }
      }
      break;
    case Command::Limit: {
      t.header = {"n", "ode_coefficient"};
      for (const auto& s : r["samples"]) t.header.push_back("diff@" + cell(s["epsilon"]));
      t.header.push_back("slope");
      const auto& coeffs = r["ode"]["coefficients"];
      for (std::size_t n = 0; n < coeffs.size(); ++n) {
        std::vector<std::string> row{std::to_string(n), cell(coeffs[n])};
        for (const auto& s : r["samples"]) row.push_back(cell(s["differences"][n]));
        row.push_back(n == 0 ? "" : cell(r["slopes"][n - 1]));
        t.rows.push_back(row);
      }
      break;
    }
    case Command::Sweep:
      t.header = {"index", r["key"].get<std::string>(), "status", "summary"};
      for (const auto& row : r["rows"]) {
        const std::string info = row["status"] == "ok" ? cell(row["summary"]) : cell(row["error"]["kind"]);
        t.rows.push_back({cell(row["index"]), cell(row["value"]), cell(row["status"]), info});
      }
      break;
  }
  return t;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_csv(std::ostream& os, const Table& t) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_escape(cells[i]);
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

void write_human(std::ostream& os, const RunConfig& c, const Json& results, const Table& t) {
  os << "qheun " << kVersion << "  " << to_string(c.command) << '\n';
  for (const auto& [key, value] : results.items()) {
    if (value.is_primitive()) os << "  " << key << ": " << cell(value) << '\n';
  }
  std::vector<std::size_t> width(t.header.size(), 0);
  for (std::size_t i = 0; i < t.header.size(); ++i) width[i] = t.header[i].size();
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    os << ' ';
    for (std::size_t i = 0; i < cells.size(); ++i) {
      os << ' ' << cells[i] << std::string(width[i] - cells[i].size(), ' ');
    }
    os << '\n';
  };
  os << '\n';
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

}  // namespace

std::string_view to_string(Command command) { return kCommandNames[static_cast<int>(command)]; }

std::optional<Command> command_from_string(std::string_view name) {
  for (int i = 0; i < 8; ++i) {
    if (kCommandNames[i] == name) return static_cast<Command>(i);
  }
  return std::nullopt;
}

std::string_view to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::Json: return "json";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Human: return "human";
  }
  return "json";
}

bool is_param_key(std::string_view key) { return key == "family" || is_scalar_key(key) || is_list_key(key); }

ParamMap parse_param_text(std::string_view text, std::string_view source) {
  ParamMap params;
  std::size_t lineno = 0;
  while (!text.empty()) {
    ++lineno;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(lineno) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::ParseError, where + "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw Error(ErrorKind::ParseError, where + "missing key");
    if (value.empty()) throw Error(ErrorKind::ParseError, where + "missing value for '" + key + "'");
    if (!is_param_key(key)) throw Error(ErrorKind::ParseError, where + "unknown key '" + key + "'");
    if (!params.emplace(key, value).second) throw Error(ErrorKind::ParseError, where + "duplicate key '" + key + "'");
  }
  return params;
}

void merge_flag(ParamMap& params, const std::string& key, const std::string& value) {
  if (!params.emplace(key, value).second) {
    throw Error(ErrorKind::ParseError, "flag --" + key + " duplicates key '" + key + "' from the parameter file");
  }
}

Scalar parse_scalar(std::string_view text, std::string_view what) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  Scalar value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    invalid("parameter '" + std::string(what) + "' is not a decimal number: '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) invalid("parameter '" + std::string(what) + "' must be finite");
  return value;
}

std::vector<Scalar> parse_list(std::string_view text, std::string_view what) {
  std::vector<Scalar> out;
  std::size_t i = 1;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_scalar(text.substr(0, comma), std::string(what) + std::to_string(i++)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

ModelParams model_params(const ParamMap& params) {
  ModelParams p;
  p.family = parse_family(params);
  p.q = parse_scalar(require(params, "q"), "q");
  p.h = parse_list(require(params, "h"), "h");
  p.l = parse_list(require(params, "l"), "l");
  p.t = parse_list(require(params, "t"), "t");
  p.alpha1 = scalar_or(params, "alpha1", 0.0);
  p.alpha2 = scalar_or(params, "alpha2", 0.0);
  p.beta = scalar_or(params, "beta", 0.0);
  p.E = scalar_or(params, "E", 0.0);
  try {
    p.validate();
  } catch (const Error& e) {
    invalid(e.what());
  }
  return p;
}

VariantSkeleton skeleton(const ParamMap& params) {
  const ModelParams p = model_params(params);
  if (p.family == Family::A4) invalid("characterization applies to families A3 and A2");
  VariantSkeleton sk;
  sk.family = p.family;
  sk.q = p.q;
  sk.h = p.h;
  sk.l = p.l;
  sk.t = p.t;
  sk.beta = p.beta;
  sk.E = p.E;
  try {
    sk.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidParams) invalid(e.what());
    throw;
  }
  return sk;
}

LimitSetup limit_setup(const ParamMap& params) {
  const Family family = parse_family(params);
  if (family == Family::A4) invalid("q -> 1 limits apply to families A3 and A2");
  LimitSetup s;
  s.family = limit_family_from(family);
  s.h = parse_list(require(params, "h"), "h");
  s.l = parse_list(require(params, "l"), "l");
  s.t = parse_list(require(params, "t"), "t");
  s.beta = family == Family::A3 ? scalar_or(params, "beta", 0.0) : 0.0;
  s.Etilde = scalar_or(params, "Etilde", 0.0);
  const std::size_t n = family_size(family);
  if (s.h.size() != n || s.l.size() != n || s.t.size() != n) {
    invalid("invariant violated: h, l, t must have length " + std::to_string(n));
  }
  s.validate();
  return s;
}

Json params_to_json(const ParamMap& params) {
  Json j;
  for (const auto& [key, value] : params) {
    if (key == "family") j[key] = std::string(trim(value));
    else if (is_list_key(key)) j[key] = parse_list(value, key);
    else j[key] = parse_scalar(value, key);
  }
  return j;
}

ParamMap params_from_json(const Json& inputs) {
  ParamMap params;
  for (const auto& [key, value] : inputs.items()) {
    if (!is_param_key(key)) throw Error(ErrorKind::ParseError, "unknown key '" + key + "' in report inputs");
    if (value.is_string()) {
      params[key] = value.get<std::string>();
    } else if (value.is_array()) {
      std::string s;
      for (std::size_t i = 0; i < value.size(); ++i) s += (i ? "," : "") + format_number(value[i].get<Scalar>());
      params[key] = s;
    } else if (value.is_number()) {
      params[key] = format_number(value.get<Scalar>());
    } else {
      throw Error(ErrorKind::ParseError, "malformed value for '" + key + "' in report inputs");
    }
  }
  return params;
}

std::vector<Scalar> SweepSpec::grid() const {
  if (!(step != 0.0) || !std::isfinite(step)) invalid("sweep step must be nonzero");
  const Scalar span = (stop - start) / step;
  if (span < -1e-9) invalid("sweep step points away from stop");
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  if (count > 100000) invalid("sweep grid exceeds 100000 points");
  std::vector<Scalar> g;
  for (std::size_t i = 0; i < count; ++i) g.push_back(start + static_cast<Scalar>(i) * step);
  return g;
}

SweepSpec parse_sweep(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw Error(ErrorKind::ParseError, "--sweep expects key=start:stop:step");
  SweepSpec s;
  s.key = std::string(trim(text.substr(0, eq)));
  std::string_view rest = text.substr(eq + 1);
  std::vector<std::string_view> parts;
  while (true) {
    const auto colon = rest.find(':');
    parts.push_back(rest.substr(0, colon));
    if (colon == std::string_view::npos) break;
    rest.remove_prefix(colon + 1);
  }
  if (parts.size() != 3) throw Error(ErrorKind::ParseError, "--sweep expects key=start:stop:step");
  s.start = parse_scalar(parts[0], "sweep start");
  s.stop = parse_scalar(parts[1], "sweep stop");
  s.step = parse_scalar(parts[2], "sweep step");
  return s;
}

ParamMap with_value(const ParamMap& params, const std::string& key, Scalar value) {
  ParamMap out = params;
  if (is_scalar_key(key)) {
    out[key] = format_number(value);
    return out;
  }
  if (key.size() >= 2 && is_list_key(key.substr(0, 1))) {
    const std::string base = key.substr(0, 1);
    std::size_t idx = 0;
    const auto [ptr, ec] = std::from_chars(key.data() + 1, key.data() + key.size(), idx);
    if (ec == std::errc{} && ptr == key.data() + key.size() && idx >= 1) {
      std::vector<Scalar> xs = parse_list(require(params, base), base);
      if (idx > xs.size()) invalid("sweep key '" + key + "' is out of range");
      xs[idx - 1] = value;
      std::string s;
      for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_number(xs[i]);
      out[base] = s;
      return out;
    }
  }
  throw Error(ErrorKind::ParseError, "cannot sweep key '" + key + "'");
}

void RunConfig::validate() {
  for (const auto& [name, value] : tolerance_overrides) {
    if (!(value > 0.0) || !std::isfinite(value)) invalid("invariant violated: tolerance '" + name + "' > 0");
    if (name == "vanish") tol.vanish = value;
    else if (name == "integrality") tol.integrality = value;
    else if (name == "exponent_match") tol.exponent_match = value;
    else throw Error(ErrorKind::ParseError, "unknown tolerance '" + name + "'");
  }
  tolerance_overrides.clear();
  if (order < 0) invalid("invariant violated: order >= 0");
  if (exponent_index != 1 && exponent_index != 2) invalid("exponent index must be 1 or 2");
}

Json execute(const RunConfig& c) {
  if (c.sweep && c.command != Command::Sweep) {
    RunConfig s = c;
    s.target = c.command;
    return run_sweep(s);
  }
  switch (c.command) {
    case Command::Exponents: return run_exponents(c);
    case Command::Series: return run_series(c);
    case Command::Apparency: return run_apparency(c);
    case Command::Characterize: return run_characterize(c);
    case Command::Qes: return run_qes(c);
    case Command::Limit: return run_limit(c);
    case Command::Hypergeom: return run_hypergeom(c);
    case Command::Sweep: return run_sweep(c);
  }
  return {};
}

Json report(const RunConfig& c) {
  Json j;
  j["command"] = std::string(to_string(c.command));
  j["version"] = std::string(kVersion);
  j["inputs"] = params_to_json(c.params);
  Json opts;
  opts["order"] = c.order;
  opts["point"] = point_name(c.point);
  if (c.lambda) opts["lambda"] = *c.lambda;
  opts["exponent_index"] = c.exponent_index;
  if (!c.epsilons.empty()) opts["epsilons"] = c.epsilons;
  if (c.sweep) {
    opts["sweep"] = c.sweep->key + "=" + format_number(c.sweep->start) + ":" + format_number(c.sweep->stop) + ":" +
                    format_number(c.sweep->step);
    opts["target"] = std::string(to_string(c.command == Command::Sweep ? c.target : c.command));
  }
  j["options"] = opts;
  Json tol;
  tol["vanish"] = c.tol.vanish;
  tol["integrality"] = c.tol.integrality;
  tol["exponent_match"] = c.tol.exponent_match;
  j["tolerances"] = tol;
  j["results"] = execute(c);
  return j;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonRealExponent:
    case ErrorKind::ClosureViolation:
    case ErrorKind::ConvergenceFailure:
    case ErrorKind::PochhammerPole:
    case ErrorKind::ResonantLogarithmic:
    case ErrorKind::IrregularPoint:
      return 3;
    default:
      return 2;
  }
}

int run(RunConfig config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    const Json rep = report(config);
    std::ofstream file;
    if (config.output_path) {
      file.open(*config.output_path);
      if (!file) {
        Json e;
        e["kind"] = "IOError";
        e["message"] = "cannot open output file '" + *config.output_path + "'";
        e["exit_code"] = 1;
        err << Json{{"error", e}}.dump() << '\n';
        return 1;
      }
    }
    std::ostream& os = config.output_path ? static_cast<std::ostream&>(file) : out;
    const Command shape = config.sweep ? Command::Sweep : config.command;
    switch (config.format) {
      case OutputFormat::Json: os << rep.dump(2) << '\n'; break;
      case OutputFormat::Csv: write_csv(os, table_for(shape, rep["results"])); break;
      case OutputFormat::Human: write_human(os, config, rep["results"], table_for(shape, rep["results"])); break;
    }
    return 0;
  } catch (const Error& e) {
    err << Json{{"error", error_json(e.kind(), e.what())}}.dump() << '\n';
    return exit_code(e.kind());
  }
}

int main_entry(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"q-Heun equation toolkit", "qheun"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  RunConfig config;
  std::string params_path;
  std::map<std::string, std::string> flag_values;
  std::string point = "zero";
  std::string format = "json";
  std::string output;
  std::string sweep;
  std::string target = "qes";
  std::string eps;
  std::vector<std::string> tolerances;
  std::optional<Scalar> lambda;

  const std::map<std::string_view, std::string> about = {
      {"exponents", "characteristic exponents at 0 or infinity"},
      {"series", "Frobenius series with residual profile"},
      {"apparency", "resonance and apparency of a singularity"},
      {"characterize", "derive and check the variant b coefficients"},
      {"qes", "invariant subspaces and exact eigenpairs"},
      {"limit", "q -> 1 limit, Riemann scheme and Heun form"},
      {"hypergeom", "reduction to the 2phi1 equation"},
      {"sweep", "run --command over a parameter grid"}};
  for (std::string_view name : kCommandNames) {
    CLI::App* sub = app.add_subcommand(std::string(name), about.at(name));
    sub->set_help_flag("--help", "print this help message and exit");
    sub->add_option("--params", params_path, "parameter file, '-' for stdin");
    for (const char* key : {"family", "q", "h", "l", "t", "alpha1", "alpha2", "beta", "E", "Etilde"}) {
      sub->add_option_function<std::string>(std::string("--") + key,
                                            [&flag_values, key](const std::string& v) { flag_values[key] = v; });
    }
    sub->add_option("--point", point, "zero or inf")->check(CLI::IsMember({"zero", "inf"}));
    sub->add_option("--order", config.order, "series order");
    sub->add_option("--lambda", lambda, "exponent for the series");
    sub->add_option("--exponent-index", config.exponent_index, "1 or 2, used when --lambda is absent");
    sub->add_option("--eps", eps, "comma list of epsilon values (limit)");
    sub->add_option("--format", format, "json, csv or human")->check(CLI::IsMember({"json", "csv", "human"}));
    sub->add_option("--output", output, "write the report to a file");
    sub->add_option("--sweep", sweep, "key=start:stop:step");
    sub->add_option("--command", target, "command evaluated per grid point (sweep)");
    sub->add_option("--tol", tolerances, "name=value tolerance override");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << Json{{"error", error_json(ErrorKind::ParseError, e.what())}}.dump() << '\n';
    return exit_code(ErrorKind::ParseError);
  }

  try {
    config.command = *command_from_string(app.get_subcommands().front()->get_name());
    if (!params_path.empty()) {
      std::string text;
      if (params_path == "-") {
        text.assign(std::istreambuf_iterator<char>(in), {});
      } else {
        std::ifstream f(params_path);
        if (!f) throw Error(ErrorKind::ParseError, "cannot read parameter file '" + params_path + "'");
        text.assign(std::istreambuf_iterator<char>(f), {});
      }
      config.params = parse_param_text(text, params_path == "-" ? "stdin" : params_path);
    }
    for (const auto& [key, value] : flag_values) merge_flag(config.params, key, value);
    config.point = point == "inf" ? BasePoint::Infinity : BasePoint::Zero;
    config.lambda = lambda;
    config.format = format == "csv" ? OutputFormat::Csv : format == "human" ? OutputFormat::Human : OutputFormat::Json;
    if (!output.empty()) config.output_path = output;
    if (!eps.empty()) config.epsilons = parse_list(eps, "eps");
    if (!sweep.empty()) config.sweep = parse_sweep(sweep);
    auto tgt = command_from_string(target);
    if (!tgt) throw Error(ErrorKind::ParseError, "unknown --command '" + target + "'");
    config.target = *tgt;
    if (const char* env = std::getenv("QHEUN_TOLERANCE")) {
      const Scalar v = parse_scalar(env, "QHEUN_TOLERANCE");
      for (const char* name : {"vanish", "integrality", "exponent_match"}) config.tolerance_overrides[name] = v;
    }
    for (const std::string& t : tolerances) {
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::ParseError, "--tol expects name=value");
      config.tolerance_overrides[t.substr(0, eq)] = parse_scalar(t.substr(eq + 1), "tolerance " + t.substr(0, eq));
    }
  } catch (const Error& e) {
    err << Json{{"error", error_json(e.kind(), e.what())}}.dump() << '\n';
    return exit_code(e.kind());
  }
  return run(std::move(config), out, err);
}

}  // namespace qheun::cli
