#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dekant/hmm.hpp"

namespace dekant {

template <typename Scalar>
struct ViterbiResult {
  std::vector<HmmState> states;
  StateVector<Scalar> scores;  // log score of the best path ending in each state
};

enum class FinalStates { Any, TaintOrNTaint };

// Max-product decoding in log space. Observations may arrive in chunks; the
// score vector is carried between chunks and backtracking waits for finish(),
// so chunked and whole-sequence decoding agree exactly.
template <typename Scalar>
class ViterbiDecoder {
 public:
  explicit ViterbiDecoder(const HmmModel<Scalar>& model)
      : log_start_(model.start.unaryExpr(&log_of)), log_trans_(model.trans.unaryExpr(&log_of)) {}

  void feed(const EmissionRows<Scalar>& rows) {
    for (Eigen::Index i = 0; i < rows.rows(); ++i) step(rows.row(i).transpose().unaryExpr(&log_of));
  }

  std::size_t length() const { return back_.size(); }
  const StateVector<Scalar>& scores() const { return current_; }

  ViterbiResult<Scalar> finish(FinalStates final_states = FinalStates::TaintOrNTaint) const {
    ViterbiResult<Scalar> out;
    out.scores = current_;
    if (back_.empty()) return out;
    const int limit = final_states == FinalStates::Any ? kStates : 2;
    int best = 0;
    for (int s = 1; s < limit; ++s)
      if (current_(s) > current_(best)) best = s;
    out.states.resize(back_.size());
    for (std::size_t i = back_.size(); i-- > 0;) {
      out.states[i] = static_cast<HmmState>(best);
      best = back_[i][static_cast<std::size_t>(best)];
    }
    return out;
  }

 private:
  static Scalar log_of(Scalar v) {
    using std::log;
    return log(v);
  }

  void step(const StateVector<Scalar>& log_emit) {
    std::array<std::uint8_t, kNumStates> from{};
    if (back_.empty()) {
      current_ = log_emit + log_start_;
    } else {
      StateVector<Scalar> next;
      for (int s = 0; s < kStates; ++s) {
        int arg = 0;
        Scalar best = log_trans_(s, 0) + current_(0);
        for (int p = 1; p < kStates; ++p) {
          const Scalar v = log_trans_(s, p) + current_(p);
          if (v > best) {
            best = v;
            arg = p;
          }
        }
        next(s) = log_emit(s) + best;
        from[static_cast<std::size_t>(s)] = static_cast<std::uint8_t>(arg);
      }
      current_ = next;
    }
    back_.push_back(from);
  }

  StateVector<Scalar> log_start_;
  TransitionMatrix<Scalar> log_trans_;
  StateVector<Scalar> current_ = StateVector<Scalar>::Zero();
  std::vector<std::array<std::uint8_t, kNumStates>> back_;
};

// Splits the observations into chunks of `chunk_len` (0 = model.max_len).
template <typename Scalar>
ViterbiResult<Scalar> decode_vit(const EmissionRows<Scalar>& rows, const HmmModel<Scalar>& model,
                                 FinalStates final_states = FinalStates::TaintOrNTaint, std::size_t chunk_len = 0) {
  ViterbiDecoder<Scalar> dec(model);
  const auto chunk = static_cast<Eigen::Index>(chunk_len ? chunk_len : std::max<std::size_t>(model.max_len, 1));
  for (Eigen::Index at = 0; at < rows.rows(); at += chunk) {
    const Eigen::Index len = std::min(chunk, rows.rows() - at);
    dec.feed(rows.middleRows(at, len));
  }
  return dec.finish(final_states);
}

}  // namespace dekant
