#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "dekant/hmm.hpp"
#include "dekant/php/parser.hpp"
#include "dekant/token_config.hpp"

namespace testing_support {

inline std::string source_path(const std::string& rel) { return std::string(DEKANT_SOURCE_DIR) + "/" + rel; }

inline std::string read(const std::string& rel) {
  std::ifstream in(source_path(rel), std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const dekant::TokenConfig& bundled_config() {
  static const dekant::TokenConfig config = dekant::TokenConfig::load_dir(source_path("data/config"));
  return config;
}

inline const dekant::HmmModel<double>& demo_model() {
  static const dekant::HmmModel<double> model = dekant::load_model(read("data/models/demo.model"));
  return model;
}

inline dekant::php::Ast parse_fixture(const std::string& rel) {
  return dekant::php::parse_file(read(rel), rel);
}

}  // namespace testing_support
