#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dekant/corpus.hpp"
#include "dekant/detector.hpp"

namespace dekant {

// Positive class: Taint.
struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  void record(HmmState predicted, HmmState actual);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Empty when the denominator is zero.
struct Metrics {
  std::optional<double> acc, pr, fpr, fnr;
};

Metrics metrics(const ConfusionMatrix& cm);
std::string format_metric(std::optional<double> value);  // "0.955" or "n/a"

class EvalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Entry i goes to fold assignment[i]; a seeded shuffle then round-robin.
std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t k, std::uint64_t seed);

// A corpus entry decoded as a one-instruction slice with empty lists.
HmmState classify_entry(const CorpusEntry& entry, const HmmModel<double>& model, const DetectorOptions& options = {});

struct KFoldResult {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignment;
  std::vector<ConfusionMatrix> folds;
  ConfusionMatrix aggregate;
};

KFoldResult kfold(const Corpus& corpus, std::size_t k, std::uint64_t seed, const DetectorOptions& options = {});

std::string eval_text(const KFoldResult& result);
std::string eval_json(const KFoldResult& result);

}  // namespace dekant
