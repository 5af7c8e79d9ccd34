#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qheun/characterize.hpp"
#include "qheun/degeneration.hpp"
#include "qheun/error.hpp"
#include "qheun/local.hpp"
#include "qheun/params.hpp"
#include "qheun/tolerance.hpp"

namespace qheun::cli {

using Json = nlohmann::ordered_json;

enum class Command { Exponents, Series, Apparency, Characterize, Qes, Limit, Hypergeom, Sweep };
enum class OutputFormat { Json, Csv, Human };

std::string_view to_string(Command command);
std::optional<Command> command_from_string(std::string_view name);
std::string_view to_string(OutputFormat format);

// Raw parameter values keyed by name, kept as the decimal strings given.
using ParamMap = std::map<std::string, std::string>;

// Recognised keys: family, q, h, l, t, alpha1, alpha2, beta, E, Etilde.
bool is_param_key(std::string_view key);

// One `key = value` per line, '#' starts a comment. Throws ParseError with
// "<source>:<line>: ..." on malformed lines, unknown or duplicate keys.
ParamMap parse_param_text(std::string_view text, std::string_view source = "params");

// Adds a flag value; throws ParseError if the key is already present.
void merge_flag(ParamMap& params, const std::string& key, const std::string& value);

// Strict decimal parse: the whole string must be consumed and finite.
Scalar parse_scalar(std::string_view text, std::string_view what);
std::vector<Scalar> parse_list(std::string_view text, std::string_view what);

// Typed views of the parameter map. Missing or malformed entries throw
// ValidationError naming the parameter or the violated invariant.
ModelParams model_params(const ParamMap& params);
VariantSkeleton skeleton(const ParamMap& params);
LimitSetup limit_setup(const ParamMap& params);

// Inputs echoed in a report, and the inverse used for re-validation.
Json params_to_json(const ParamMap& params);
ParamMap params_from_json(const Json& inputs);

// key=start:stop:step, inclusive of stop when the grid lands on it.
struct SweepSpec {
  std::string key;
  Scalar start = 0.0;
  Scalar stop = 0.0;
  Scalar step = 1.0;

  std::vector<Scalar> grid() const;
};

SweepSpec parse_sweep(std::string_view text);

// Replaces a scalar key, or element i of a list via h1, l2, t3, ...
ParamMap with_value(const ParamMap& params, const std::string& key, Scalar value);

struct RunConfig {
  Command command = Command::Exponents;
  Command target = Command::Qes;  // evaluated per grid point by sweep
  ParamMap params;
  int order = 32;
  Tolerances tol;
  std::map<std::string, Scalar> tolerance_overrides;
  OutputFormat format = OutputFormat::Json;
  std::optional<std::string> output_path;
  BasePoint point = BasePoint::Zero;
  std::optional<Scalar> lambda;
  int exponent_index = 1;
  std::vector<Scalar> epsilons;
  std::optional<SweepSpec> sweep;

  // Applies overrides and checks order >= 0, tolerances > 0.
  void validate();
};

// Results object for one command. Throws Error on failure.
Json execute(const RunConfig& config);

// Full report: command, version, inputs, tolerances, results.
Json report(const RunConfig& config);

// 0 success, 2 parse or validation errors, 3 numerical failures.
int exit_code(ErrorKind kind);

int run(RunConfig config, std::ostream& out, std::ostream& err);

// Parses argv with CLI11 and runs. `in` backs --params -.
int main_entry(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace qheun::cli
