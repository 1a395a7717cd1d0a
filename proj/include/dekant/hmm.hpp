#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dekant/corpus.hpp"
#include "dekant/isl.hpp"

namespace dekant {

inline constexpr int kStates = static_cast<int>(kNumStates);
inline constexpr int kTokens = static_cast<int>(kNumTokens);

template <typename Scalar>
using StateVector = Eigen::Matrix<Scalar, kStates, 1>;
// Column = source state, row = target state.
template <typename Scalar>
using TransitionMatrix = Eigen::Matrix<Scalar, kStates, kStates>;
// Column = emitting state, row = token.
template <typename Scalar>
using EmissionMatrix = Eigen::Matrix<Scalar, kTokens, kStates>;
// One row per observation, gathered from an EmissionMatrix.
template <typename Scalar>
using EmissionRows = Eigen::Matrix<Scalar, Eigen::Dynamic, kStates, Eigen::RowMajor>;

template <typename Scalar = double>
struct HmmModel {
  StateVector<Scalar> start = StateVector<Scalar>::Constant(Scalar(1) / kStates);
  TransitionMatrix<Scalar> trans = TransitionMatrix<Scalar>::Constant(Scalar(1) / kStates);
  EmissionMatrix<Scalar> emit = EmissionMatrix<Scalar>::Constant(Scalar(1) / kTokens);
  std::size_t max_len = 1;

  template <typename Other>
  HmmModel<Other> cast() const {
    return {start.template cast<Other>(), trans.template cast<Other>(), emit.template cast<Other>(), max_len};
  }
};

struct Counts {
  Eigen::Matrix<long, kStates, 1> begin = Eigen::Matrix<long, kStates, 1>::Zero();
  Eigen::Matrix<long, kStates, kStates> moves = Eigen::Matrix<long, kStates, kStates>::Zero();
  Eigen::Matrix<long, kTokens, kStates> pairs = Eigen::Matrix<long, kTokens, kStates>::Zero();
};

Counts count(const Corpus& corpus);

// Add-one smoothing over the raw counts, normalized per column.
template <typename Scalar = double>
HmmModel<Scalar> train(const Corpus& corpus) {
  if (corpus.entries.empty()) throw std::invalid_argument("empty corpus");
  const Counts c = count(corpus);
  HmmModel<Scalar> m;
  const auto n = static_cast<Scalar>(corpus.entries.size());
  m.start = (c.begin.cast<Scalar>().array() + Scalar(1)) / (n + Scalar(kStates));
  for (int s = 0; s < kStates; ++s) {
    const auto from = static_cast<Scalar>(c.moves.col(s).sum());
    m.trans.col(s) = (c.moves.col(s).cast<Scalar>().array() + Scalar(1)) / (from + Scalar(kStates));
    const auto emitted = static_cast<Scalar>(c.pairs.col(s).sum());
    m.emit.col(s) = (c.pairs.col(s).cast<Scalar>().array() + Scalar(1)) / (emitted + Scalar(kTokens));
  }
  m.max_len = corpus.max_len;
  return m;
}

template <typename Scalar>
EmissionRows<Scalar> gather_emissions(const HmmModel<Scalar>& m, std::span<const IslToken> tokens) {
  EmissionRows<Scalar> rows(static_cast<Eigen::Index>(tokens.size()), kStates);
  for (std::size_t i = 0; i < tokens.size(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) = m.emit.row(static_cast<Eigen::Index>(index_of(tokens[i])));
  return rows;
}

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kModelHeader = "dekant-model v1";
// Columns further than this from 1 are rejected; closer ones are renormalized.
inline constexpr double kRenormalizeLimit = 0.5;
inline constexpr double kStochasticTolerance = 1e-9;

std::string save_model(const HmmModel<double>& model);
// Warnings (renormalized columns) are appended to `warnings` when given.
HmmModel<double> load_model(std::string_view text, std::vector<std::string>* warnings = nullptr);
HmmModel<double> load_model_file(const std::string& path, std::vector<std::string>* warnings = nullptr);

}  // namespace dekant
