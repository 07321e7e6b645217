#include "drkit/cli/params.hpp"

#include "drkit/error.hpp"

#include <algorithm>
#include <charconv>
#include <climits>
#include <cmath>

namespace drkit::cli {
namespace {

using K = ParamKind;

const std::map<std::string, std::vector<ParamDef>>& table() {
  static const std::map<std::string, std::vector<ParamDef>> defs{
      {"pca", {{"components", "2", K::integer, "number of score columns written"}}},
      {"lle",
       {{"k", "12", K::integer, "neighbors per point"},
        {"d", "2", K::integer, "embedding dimension"},
        {"reg", "0.001", K::real, "local Gram regularization (times trace)"}}},
      {"calc-k",
       {{"ks", "1:20", K::int_list, "candidate k values, list or a:b range"},
        {"d", "2", K::integer, "embedding dimension"},
        {"reg", "0.001", K::real, "local Gram regularization"},
        {"max-pairs", "2000", K::integer, "pairs sampled for rho"}}},
      {"tsne",
       {{"perplexity", "30", K::real, "effective neighbor count"},
        {"theta", "0.5", K::real, "Barnes-Hut accuracy, 0 = exact"},
        {"iters", "1000", K::integer, "gradient steps"},
        {"eta", "200", K::real, "learning rate"},
        {"exaggeration", "12", K::real, "early exaggeration factor"},
        {"exaggeration-iters", "250", K::integer, "iterations with exaggeration"},
        {"d", "2", K::integer, "embedding dimension (theta must be 0 when d != 2)"}}},
      {"umap",
       {{"k", "15", K::integer, "neighbors in the fuzzy graph"},
        {"epochs", "200", K::integer, "optimization epochs"},
        {"min-dist", "0.1", K::real, "minimum embedded distance"},
        {"spread", "1", K::real, "scale of embedded points"},
        {"lr", "1", K::real, "initial learning rate"},
        {"neg-rate", "5", K::real, "negative samples per positive sample"},
        {"d", "2", K::integer, "embedding dimension"}}},
      {"som",
       {{"rows", "10", K::integer, "lattice rows"},
        {"cols", "10", K::integer, "lattice columns"},
        {"rlen", "100", K::integer, "passes over the data"},
        {"alpha-start", "0.1", K::real, "initial learning rate"},
        {"alpha-end", "0.001", K::real, "final learning rate"},
        {"radius", "0", K::real, "initial neighborhood radius, 0 = half the lattice diagonal"},
        {"radius-end", "0.001", K::real, "final neighborhood radius"},
        {"clusters", "0", K::integer, "k-means and fuzzy c-means clusters on the codes, 0 = skip"},
        {"fuzzifier", "2", K::real, "fuzzy c-means exponent m"}}},
      {"autoencoder",
       {{"hidden", "16", K::int_list, "hidden layer sizes"},
        {"epochs", "100", K::integer, "training epochs"},
        {"batch", "32", K::integer, "mini-batch size"},
        {"lr", "0.01", K::real, "learning rate"},
        {"optimizer", "momentum", K::text, "sgd or momentum"},
        {"momentum", "0.9", K::real, "momentum coefficient"},
        {"denoise", "0", K::real, "input noise sd, 0 = plain autoencoder"},
        {"activation", "tanh", K::text, "tanh, relu, logistic or identity"},
        {"layer", "1", K::integer, "hidden layer exported as deep features"},
        {"overcomplete-ok", "false", K::flag, "allow hidden layers as wide as the input"},
        {"clf-hidden", "8,8", K::int_list, "classifier hidden layers"},
        {"clf-epochs", "200", K::integer, "classifier epochs"},
        {"importance-repeats", "10", K::integer, "permutations per feature"}}},
  };
  return defs;
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

}  // namespace

const std::vector<ParamDef>& param_defs(const std::string& algo) {
  const auto it = table().find(algo);
  if (it == table().end()) throw Error(ErrorCode::bad_config, "unknown algorithm '" + algo + "'");
  return it->second;
}

bool is_algorithm(const std::string& algo) { return table().count(algo) > 0; }

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names{"pca", "lle", "calc-k", "tsne", "umap", "som", "autoencoder"};
  return names;
}

int parse_int(const std::string& text) {
  long long v = 0;
  if (!parse_number(text, v) || v < INT_MIN || v > INT_MAX) {
    throw Error(ErrorCode::bad_config, "'" + text + "' is not an integer");
  }
  return static_cast<int>(v);
}

double parse_real(const std::string& text) {
  double v = 0.0;
  if (!parse_number(text, v) || !std::isfinite(v)) throw Error(ErrorCode::bad_config, "'" + text + "' is not a number");
  return v;
}

bool parse_flag(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw Error(ErrorCode::bad_config, "'" + text + "' is not a boolean");
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const int a = parse_int(text.substr(0, colon));
    const int b = parse_int(text.substr(colon + 1));
    if (b < a) throw Error(ErrorCode::bad_config, "empty range '" + text + "'");
    for (int v = a; v <= b; ++v) out.push_back(v);
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(parse_int(piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

Params::Params(std::string algo, std::map<std::string, std::string> values)
    : algo_(std::move(algo)), values_(std::move(values)) {}

const std::string& Params::raw(const std::string& name) const {
  const auto it = values_.find(name);
  if (it == values_.end()) throw Error(ErrorCode::bad_config, "parameter '" + name + "' not defined for " + algo_);
  return it->second;
}

int Params::integer(const std::string& name) const { return parse_int(raw(name)); }
double Params::real(const std::string& name) const { return parse_real(raw(name)); }
const std::string& Params::text(const std::string& name) const { return raw(name); }
std::vector<int> Params::int_list(const std::string& name) const { return parse_int_list(raw(name)); }
bool Params::flag(const std::string& name) const { return parse_flag(raw(name)); }

Params resolve_params(const std::string& algo, const std::map<std::string, std::string>& given) {
  const auto& defs = param_defs(algo);
  std::map<std::string, std::string> values;
  for (const auto& d : defs) values[d.name] = d.default_value;
  for (const auto& [name, value] : given) {
    const auto it = std::find_if(defs.begin(), defs.end(), [&](const ParamDef& d) { return d.name == name; });
    if (it == defs.end()) throw Error(ErrorCode::bad_config, "unknown parameter '" + name + "' for " + algo);
    switch (it->kind) {
      case K::integer: parse_int(value); break;
      case K::real: parse_real(value); break;
      case K::int_list: parse_int_list(value); break;
      case K::flag: parse_flag(value); break;
      case K::text: break;
    }
    values[name] = value;
  }
  return Params(algo, std::move(values));
}

}  // namespace drkit::cli
