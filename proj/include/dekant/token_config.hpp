#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dekant/isl.hpp"

namespace dekant {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 1-based argument position, optionally open-ended ("3+").
struct ArgPosition {
  std::size_t first = 1;
  bool and_after = false;
  friend bool operator==(const ArgPosition&, const ArgPosition&) = default;
};

struct FunctionSpec {
  IslToken token = IslToken::var;
  std::vector<ArgPosition> positions;  // empty: every argument matters
  std::vector<VulnClass> classes;      // sinks only

  bool is_relevant(std::size_t index0) const;
};

class TokenConfig {
 public:
  // Reads every known *.cfg file in `dir`; missing files are allowed.
  static TokenConfig load_dir(const std::string& dir);

  // `file_name` selects the token class, e.g. "sanit_f.cfg" or "ss_xss.cfg".
  void add_file(std::string_view file_name, std::string_view text);

  // Names are case-insensitive; methods use "class::method".
  const FunctionSpec* lookup(std::string_view name) const;
  bool is_input(std::string_view superglobal) const { return inputs_.count(std::string(superglobal)) > 0; }

  std::size_t char_threshold() const { return char_threshold_; }
  const std::set<std::string>& inputs() const { return inputs_; }
  const std::map<std::string, FunctionSpec>& functions() const { return functions_; }

 private:
  std::map<std::string, FunctionSpec> functions_;
  std::set<std::string> inputs_;
  std::size_t char_threshold_ = 6;
};

std::optional<IslToken> token_for_function(std::string_view name, const TokenConfig& config);

// Token files other than input.cfg and the ss_<class>.cfg family.
const std::vector<IslToken>& configurable_tokens();

}  // namespace dekant
