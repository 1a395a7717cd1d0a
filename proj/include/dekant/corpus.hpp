#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dekant/isl.hpp"

namespace dekant {

using Pair = std::pair<IslToken, HmmState>;

struct CorpusEntry {
  std::vector<Pair> pairs;  // padded to the corpus max_len
  std::size_t length = 0;   // before padding

  std::span<const Pair> unpadded() const { return {pairs.data(), length}; }
  friend bool operator==(const CorpusEntry&, const CorpusEntry&) = default;
};

struct Corpus {
  std::vector<CorpusEntry> entries;
  std::size_t max_len = 0;
};

class CorpusError : public std::runtime_error {
 public:
  CorpusError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Blank lines and '#' comments are skipped. Entries are deduplicated in
// first-seen order, then padded with <miss, last state>.
Corpus load_corpus(std::string_view text);
Corpus load_corpus_file(const std::string& path);
// Writes unpadded entries so load(save(c)) == c.
std::string save_corpus(const Corpus& corpus);

// Builds a corpus from raw sequences (validated, deduplicated, padded).
Corpus make_corpus(std::vector<std::vector<Pair>> sequences);

std::string render_pair(const Pair& p);

}  // namespace dekant
