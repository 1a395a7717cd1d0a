#include "dekant/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace dekant {

namespace {

Pair parse_pair(std::string_view word, int line) {
  if (word.size() < 5 || word.front() != '<' || word.back() != '>')
    throw CorpusError(line, "malformed pair '" + std::string(word) + "'");
  const auto body = word.substr(1, word.size() - 2);
  const auto comma = body.find(',');
  if (comma == std::string_view::npos) throw CorpusError(line, "malformed pair '" + std::string(word) + "'");
  const auto tok = parse_token(body.substr(0, comma));
  if (!tok) throw CorpusError(line, "unknown token '" + std::string(body.substr(0, comma)) + "'");
  const auto st = parse_state(body.substr(comma + 1));
  if (!st) throw CorpusError(line, "unknown state '" + std::string(body.substr(comma + 1)) + "'");
  if (*tok == IslToken::miss) throw CorpusError(line, "miss is reserved for padding");
  if (!can_emit(*st, *tok))
    throw CorpusError(line, "state " + std::string(name_of(*st)) + " cannot emit " + std::string(name_of(*tok)));
  return {*tok, *st};
}

void check_sequence(const std::vector<Pair>& seq, int line) {
  if (seq.empty()) throw CorpusError(line, "empty sequence");
  for (const auto& [tok, st] : seq)
    if (tok == IslToken::miss || !can_emit(st, tok))
      throw CorpusError(line, "state " + std::string(name_of(st)) + " cannot emit " + std::string(name_of(tok)));
  if (!is_final_state(seq.back().second))
    throw CorpusError(line, "sequence must end in Taint or N-Taint");
  std::vector<IslToken> toks;
  for (const auto& p : seq) toks.push_back(p.first);
  if (!validate_sequence(toks)) throw CorpusError(line, "sequence not derivable from the ISL grammar");
}

Corpus build(std::vector<std::vector<Pair>> seqs, const std::vector<int>& lines) {
  Corpus c;
  std::vector<std::vector<Pair>> seen;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    check_sequence(seqs[i], lines.empty() ? 0 : lines[i]);
    if (std::find(seen.begin(), seen.end(), seqs[i]) != seen.end()) continue;
    seen.push_back(std::move(seqs[i]));
  }
  for (const auto& s : seen) c.max_len = std::max(c.max_len, s.size());
  for (auto& s : seen) {
    CorpusEntry e;
    e.length = s.size();
    e.pairs = std::move(s);
    const HmmState last = e.pairs.back().second;
    e.pairs.resize(c.max_len, Pair{IslToken::miss, last});
    c.entries.push_back(std::move(e));
  }
  return c;
}

}  // namespace

std::string render_pair(const Pair& p) {
  return "<" + std::string(name_of(p.first)) + "," + std::string(name_of(p.second)) + ">";
}

Corpus load_corpus(std::string_view text) {
  std::vector<std::vector<Pair>> seqs;
  std::vector<int> lines;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream words(raw);
    std::vector<Pair> seq;
    std::string w;
    while (words >> w) seq.push_back(parse_pair(w, line));
    if (seq.empty()) continue;
    seqs.push_back(std::move(seq));
    lines.push_back(line);
  }
  if (seqs.empty()) throw CorpusError(0, "empty corpus");
  return build(std::move(seqs), lines);
}

Corpus load_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError(0, "cannot read corpus " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_corpus(ss.str());
}

Corpus make_corpus(std::vector<std::vector<Pair>> sequences) {
  if (sequences.empty()) throw CorpusError(0, "empty corpus");
  return build(std::move(sequences), {});
}

std::string save_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& e : corpus.entries) {
    bool first = true;
    for (const auto& p : e.unpadded()) {
      if (!first) out += ' ';
      first = false;
      out += render_pair(p);
    }
    out += '\n';
  }
  return out;
}

}  // namespace dekant
