#pragma once

#include <map>
#include <string>
#include <vector>

namespace drkit::cli {

enum class ParamKind { integer, real, text, int_list, flag };

struct ParamDef {
  std::string name;
  std::string default_value;
  ParamKind kind;
  std::string help;
};

/// Parameters accepted by an algorithm command. Throws bad_config for an unknown algorithm.
const std::vector<ParamDef>& param_defs(const std::string& algo);

bool is_algorithm(const std::string& algo);
const std::vector<std::string>& algorithm_names();

/// Validated parameter values with defaults filled in.
class Params {
 public:
  Params() = default;
  Params(std::string algo, std::map<std::string, std::string> values);

  int integer(const std::string& name) const;
  double real(const std::string& name) const;
  const std::string& text(const std::string& name) const;
  std::vector<int> int_list(const std::string& name) const;
  bool flag(const std::string& name) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  const std::string& algo() const { return algo_; }

 private:
  const std::string& raw(const std::string& name) const;

  std::string algo_;
  std::map<std::string, std::string> values_;
};

/// Merge user values over defaults. Unknown names and unparsable values
/// raise bad_config.
Params resolve_params(const std::string& algo, const std::map<std::string, std::string>& given);

/// "8,8" or a range "1:20" (inclusive).
std::vector<int> parse_int_list(const std::string& text);
int parse_int(const std::string& text);
double parse_real(const std::string& text);
bool parse_flag(const std::string& text);

}  // namespace drkit::cli
