#include "dekant/eval.hpp"

#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

namespace dekant {

void ConfusionMatrix::record(HmmState predicted, HmmState actual) {
  const bool p = predicted == HmmState::Taint;
  const bool a = actual == HmmState::Taint;
  if (p && a) ++tp;
  else if (p) ++fp;
  else if (a) ++fn;
  else ++tn;
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

// Unbiased draw in [0, bound) without relying on a library distribution,
// whose output differs between standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

}  // namespace

Metrics metrics(const ConfusionMatrix& cm) {
  return {ratio(cm.tp + cm.tn, cm.total()), ratio(cm.tp, cm.tp + cm.fp), ratio(cm.fp, cm.fp + cm.tn),
          ratio(cm.fn, cm.fn + cm.tp)};
}

std::string format_metric(std::optional<double> value) {
  if (!value) return "n/a";
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << *value;
  return out.str();
}

std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw EvalError("k must be positive");
  if (k > n) throw EvalError("k = " + std::to_string(k) + " exceeds corpus size " + std::to_string(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[bounded(rng, i)]);
  std::vector<std::size_t> fold(n);
  for (std::size_t i = 0; i < n; ++i) fold[order[i]] = i % k;
  return fold;
}

HmmState classify_entry(const CorpusEntry& entry, const HmmModel<double>& model, const DetectorOptions& options) {
  IslInstruction instr;
  for (const auto& [tok, state] : entry.unpadded()) {
    instr.tokens.push_back(tok);
    instr.varmap.names.emplace_back(kNoName);
    instr.input_keys.emplace_back();
  }
  SliceIsl slice;
  slice.instructions.push_back(std::move(instr));
  return classify_slice(slice, model, options).final_state;
}

KFoldResult kfold(const Corpus& corpus, std::size_t k, std::uint64_t seed, const DetectorOptions& options) {
  KFoldResult out;
  out.k = k;
  out.seed = seed;
  out.assignment = fold_assignment(corpus.entries.size(), k, seed);
  out.folds.resize(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::vector<Pair>> training;
    for (std::size_t i = 0; i < corpus.entries.size(); ++i)
      if (out.assignment[i] != f) {
        const auto seq = corpus.entries[i].unpadded();
        training.emplace_back(seq.begin(), seq.end());
      }
    // leave-one-out on a single entry leaves nothing to train on
    if (training.empty()) throw EvalError("fold " + std::to_string(f) + " has no training entries");
    const auto model = train<double>(make_corpus(std::move(training)));
    for (std::size_t i = 0; i < corpus.entries.size(); ++i)
      if (out.assignment[i] == f) {
        const auto& entry = corpus.entries[i];
        out.folds[f].record(classify_entry(entry, model, options), entry.unpadded().back().second);
      }
    out.aggregate += out.folds[f];
  }
  return out;
}

namespace {

nlohmann::ordered_json matrix_json(const ConfusionMatrix& cm) {
  const Metrics m = metrics(cm);
  const auto num = [](std::optional<double> v) -> nlohmann::ordered_json {
    if (!v) return "n/a";
    return *v;
  };
  nlohmann::ordered_json j;
  j["acc"] = num(m.acc);
  j["pr"] = num(m.pr);
  j["fpr"] = num(m.fpr);
  j["fnr"] = num(m.fnr);
  j["tp"] = cm.tp;
  j["fp"] = cm.fp;
  j["fn"] = cm.fn;
  j["tn"] = cm.tn;
  return j;
}

}  // namespace

std::string eval_text(const KFoldResult& r) {
  std::ostringstream out;
  out << "k=" << r.k << " seed=" << r.seed << "\n";
  out << std::left << std::setw(10) << "fold" << std::right;
  for (const char* h : {"tp", "fp", "fn", "tn"}) out << std::setw(6) << h;
  for (const char* h : {"acc", "pr", "fpr", "fnr"}) out << std::setw(8) << h;
  out << "\n";
  const auto row = [&](const std::string& label, const ConfusionMatrix& cm) {
    const Metrics m = metrics(cm);
    out << std::left << std::setw(10) << label << std::right;
    for (std::size_t v : {cm.tp, cm.fp, cm.fn, cm.tn}) out << std::setw(6) << v;
    for (auto v : {m.acc, m.pr, m.fpr, m.fnr}) out << std::setw(8) << format_metric(v);
    out << "\n";
  };
  for (std::size_t f = 0; f < r.folds.size(); ++f) row(std::to_string(f + 1), r.folds[f]);
  row("total", r.aggregate);
  return out.str();
}

std::string eval_json(const KFoldResult& r) {
  nlohmann::ordered_json j;
  j["k"] = r.k;
  j["seed"] = r.seed;
  j["folds"] = nlohmann::ordered_json::array();
  for (const auto& f : r.folds) j["folds"].push_back(matrix_json(f));
  j["aggregate"] = matrix_json(r.aggregate);
  return j.dump(2) + "\n";
}

}  // namespace dekant
