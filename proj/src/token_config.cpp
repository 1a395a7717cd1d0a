#include "dekant/token_config.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dekant {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

ArgPosition parse_position(std::string_view word, const std::string& where) {
  ArgPosition p;
  std::string digits(word);
  if (!digits.empty() && digits.back() == '+') {
    p.and_after = true;
    digits.pop_back();
  }
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw ConfigError(where + ": bad argument position '" + std::string(word) + "'");
  p.first = std::stoul(digits);
  if (p.first == 0) throw ConfigError(where + ": argument positions start at 1");
  return p;
}

}  // namespace

bool FunctionSpec::is_relevant(std::size_t index0) const {
  if (positions.empty()) return true;
  const std::size_t pos = index0 + 1;
  return std::any_of(positions.begin(), positions.end(),
                     [&](const ArgPosition& p) { return pos == p.first || (p.and_after && pos > p.first); });
}

const std::vector<IslToken>& configurable_tokens() {
  static const std::vector<IslToken> tokens = {
      IslToken::sanit_f,   IslToken::typechk_str, IslToken::typechk_num, IslToken::contentchk,
      IslToken::fillchk,   IslToken::join_str,    IslToken::erase_str,   IslToken::replace_str,
      IslToken::split_str, IslToken::add_str,     IslToken::sub_str,     IslToken::sub_str_replace};
  return tokens;
}

void TokenConfig::add_file(std::string_view file_name, std::string_view text) {
  std::string stem(file_name);
  if (stem.size() > 4 && stem.ends_with(".cfg")) stem.resize(stem.size() - 4);

  std::optional<IslToken> token;
  std::optional<VulnClass> cls;
  const bool inputs = stem == "input";
  if (stem.rfind("ss_", 0) == 0) {
    token = IslToken::ss;
    cls = parse_class(stem.substr(3));
    if (!cls) throw ConfigError(std::string(file_name) + ": unknown vulnerability class");
  } else if (!inputs) {
    token = parse_token(stem);
    if (!token || std::find(configurable_tokens().begin(), configurable_tokens().end(), *token) ==
                      configurable_tokens().end())
      throw ConfigError(std::string(file_name) + ": not a token configuration file");
  }

  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string name;
    if (!(words >> name)) continue;
    const std::string where = std::string(file_name) + ":" + std::to_string(lineno);
    if (inputs) {
      if (name.front() == '$') name.erase(0, 1);
      inputs_.insert(name);
      continue;
    }
    FunctionSpec spec;
    spec.token = *token;
    std::string w;
    while (words >> w) spec.positions.push_back(parse_position(w, where));
    if (cls) spec.classes.push_back(*cls);

    const std::string key = lower(name);
    auto it = functions_.find(key);
    if (it == functions_.end()) {
      functions_.emplace(key, std::move(spec));
      continue;
    }
    FunctionSpec& have = it->second;
    if (have.token != spec.token)
      throw ConfigError(where + ": '" + name + "' already listed as " + std::string(name_of(have.token)));
    if (have.positions != spec.positions)
      throw ConfigError(where + ": '" + name + "' listed with different argument positions");
    for (auto c : spec.classes)
      if (std::find(have.classes.begin(), have.classes.end(), c) == have.classes.end()) have.classes.push_back(c);
  }
}

TokenConfig TokenConfig::load_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ConfigError("config directory not found: " + dir);
  std::vector<std::string> files = {"input.cfg"};
  for (auto t : configurable_tokens()) files.push_back(std::string(name_of(t)) + ".cfg");
  for (auto c : all_classes()) files.push_back("ss_" + std::string(suffix_of(c)) + ".cfg");

  TokenConfig cfg;
  for (const auto& f : files) {
    const fs::path p = fs::path(dir) / f;
    if (!fs::exists(p)) continue;
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    cfg.add_file(f, ss.str());
  }
  if (cfg.inputs_.empty()) throw ConfigError(dir + ": no entry points configured (input.cfg)");
  for (auto& [name, spec] : cfg.functions_) std::sort(spec.classes.begin(), spec.classes.end());
  return cfg;
}

const FunctionSpec* TokenConfig::lookup(std::string_view name) const {
  auto it = functions_.find(lower(name));
  return it == functions_.end() ? nullptr : &it->second;
}

std::optional<IslToken> token_for_function(std::string_view name, const TokenConfig& config) {
  if (const auto* spec = config.lookup(name)) return spec->token;
  return std::nullopt;
}

}  // namespace dekant
