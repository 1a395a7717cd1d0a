#include <algorithm>
#include <set>

#include "doctest.h"
#include "dekant/eval.hpp"
#include "support.hpp"

using namespace dekant;
using testing_support::read;

TEST_CASE("metrics on hand-checked matrices") {
  const auto m = metrics({.tp = 405, .fp = 14, .fn = 9, .tn = 82});
  CHECK(*m.acc == doctest::Approx(487.0 / 510));
  CHECK(*m.pr == doctest::Approx(405.0 / 419));
  CHECK(*m.fpr == doctest::Approx(14.0 / 96));
  CHECK(*m.fnr == doctest::Approx(9.0 / 414));
  CHECK(format_metric(m.acc) == "0.955");
  CHECK(format_metric(m.pr) == "0.967");
  CHECK(format_metric(m.fpr) == "0.146");
  CHECK(format_metric(m.fnr) == "0.022");

  const auto d = metrics({.tp = 412, .fp = 16, .fn = 2, .tn = 80});
  CHECK(format_metric(d.pr) == "0.963");
  CHECK(format_metric(d.fnr) == "0.005");
}

TEST_CASE("undefined metrics are not zero") {
  const auto m = metrics({.tp = 0, .fp = 0, .fn = 0, .tn = 3});
  CHECK_FALSE(m.pr);
  CHECK_FALSE(m.fnr);
  CHECK(format_metric(m.pr) == "n/a");
  CHECK(*m.acc == 1.0);
  CHECK(*m.fpr == 0.0);
  CHECK_FALSE(metrics({}).acc);
}

TEST_CASE("confusion matrix records by the Taint class") {
  ConfusionMatrix cm;
  cm.record(HmmState::Taint, HmmState::Taint);
  cm.record(HmmState::Taint, HmmState::NTaint);
  cm.record(HmmState::NTaint, HmmState::Taint);
  cm.record(HmmState::NTaint, HmmState::NTaint);
  cm.record(HmmState::NTaint, HmmState::NTaint);
  CHECK(cm == ConfusionMatrix{.tp = 1, .fp = 1, .fn = 1, .tn = 2});
}

TEST_CASE("fold assignment partitions evenly and repeats for a seed") {
  for (std::size_t n : {1u, 7u, 24u, 88u})
    for (std::size_t k : {1u, 2u, 5u, 7u}) {
      if (k > n) {
        CHECK_THROWS_AS(fold_assignment(n, k, 3), EvalError);
        continue;
      }
      const auto a = fold_assignment(n, k, 3);
      REQUIRE(a.size() == n);
      std::vector<std::size_t> sizes(k);
      for (auto f : a) {
        REQUIRE(f < k);
        ++sizes[f];
      }
      CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
      CHECK(fold_assignment(n, k, 3) == a);
    }
  CHECK(fold_assignment(88, 10, 1) != fold_assignment(88, 10, 2));
  CHECK_THROWS_AS(fold_assignment(5, 0, 1), EvalError);
}

TEST_CASE("leave-one-out over the seed corpus") {
  const Corpus c = load_corpus(read("fixtures/seed.corpus"));
  const auto r = kfold(c, 24, 11);
  CHECK(r.folds.size() == 24);
  for (const auto& f : r.folds) CHECK(f.total() == 1);
  CHECK(r.aggregate.total() == 24);
  // four Taint and twenty N-Taint annotations
  CHECK(r.aggregate.tp + r.aggregate.fn == 4);
  CHECK(r.aggregate.fp + r.aggregate.tn == 20);
  CHECK_THROWS_AS(kfold(c, 25, 1), EvalError);
}

TEST_CASE("k-fold covers the corpus once and is reproducible") {
  const Corpus c = load_corpus(read("data/corpus/demo.corpus"));
  const auto a = kfold(c, 10, 5);
  const auto b = kfold(c, 10, 5);
  CHECK(a.aggregate.total() == c.entries.size());
  ConfusionMatrix sum;
  for (const auto& f : a.folds) sum += f;
  CHECK(sum == a.aggregate);
  CHECK(eval_json(a) == eval_json(b));
  CHECK(eval_text(a) == eval_text(b));
  CHECK(eval_json(a).find("\"aggregate\"") != std::string::npos);
}
