#pragma once

#include <random>
#include <vector>

#include "dekant/hmm.hpp"
#include "oracles.hpp"

namespace testing_support {

// Random positive column-stochastic model. With `twin` set, state 4 copies
// state 3 everywhere so exact score ties occur.
inline dekant::HmmModel<double> random_model(std::mt19937& rng, bool twin, std::size_t max_len = 4) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  dekant::HmmModel<double> m;
  for (int s = 0; s < dekant::kStates; ++s) {
    m.start(s) = u(rng);
    for (int d = 0; d < dekant::kStates; ++d) m.trans(d, s) = u(rng);
    for (int t = 0; t < dekant::kTokens; ++t) m.emit(t, s) = u(rng);
  }
  if (twin) {
    m.start(4) = m.start(3);
    m.trans.col(4) = m.trans.col(3);
    m.trans.row(4) = m.trans.row(3);
    m.trans(4, 4) = m.trans(3, 3);
    m.trans(3, 4) = m.trans(3, 3);
    m.trans(4, 3) = m.trans(3, 3);
    m.emit.col(4) = m.emit.col(3);
  }
  m.start /= m.start.sum();
  for (int s = 0; s < dekant::kStates; ++s) {
    m.trans.col(s) /= m.trans.col(s).sum();
    m.emit.col(s) /= m.emit.col(s).sum();
  }
  m.max_len = max_len;
  return m;
}

inline std::vector<dekant::IslToken> random_tokens(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<int> pick(0, dekant::kTokens - 1);
  std::vector<dekant::IslToken> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<dekant::IslToken>(pick(rng)));
  return out;
}

inline oracle::BestPath oracle_decode(const dekant::HmmModel<double>& m, const std::vector<dekant::IslToken>& toks,
                                      bool final_taint_only) {
  std::array<double, 5> start{};
  std::array<std::array<double, 5>, 5> trans{};
  std::vector<std::array<double, 5>> rows;
  for (int s = 0; s < 5; ++s) {
    start[s] = m.start(s);
    for (int d = 0; d < 5; ++d) trans[d][s] = m.trans(d, s);
  }
  for (auto t : toks) {
    std::array<double, 5> r{};
    for (int s = 0; s < 5; ++s) r[s] = m.emit(static_cast<int>(dekant::index_of(t)), s);
    rows.push_back(r);
  }
  return oracle::enumerate_paths(start, trans, rows, final_taint_only);
}

}  // namespace testing_support
