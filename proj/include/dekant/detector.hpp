#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dekant/hmm.hpp"
#include "dekant/isl.hpp"
#include "dekant/viterbi.hpp"

namespace dekant {

class DetectError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DetectorOptions {
  // Only typechk_num and contentchk mark the next parameter as validated.
  bool strict_triggers = false;
  FinalStates final_states = FinalStates::TaintOrNTaint;
  std::size_t chunk_len = 0;  // 0: the model's max_len
};

enum class ListKind { TL, CTL, SL };

// The tainted, validated and sanitized name lists of one slice. Lists print in
// the order names first appeared anywhere in the slice.
class TaintArtifacts {
 public:
  bool contains(ListKind list, const std::string& name) const { return lists_[idx(list)].count(name) > 0; }
  void insert(ListKind list, const std::string& name);
  void erase(ListKind list, const std::string& name) { lists_[idx(list)].erase(name); }
  void clear(ListKind list) { lists_[idx(list)].clear(); }
  std::vector<std::string> items(ListKind list) const;
  std::string render(ListKind list) const;  // "{u, a}"

  int condition = 0;  // 0 plain, 1 if-header, 2 inside a branch
  bool val = false;
  bool san = false;

 private:
  static std::size_t idx(ListKind l) { return static_cast<std::size_t>(l); }
  std::array<std::set<std::string>, 3> lists_;
  std::map<std::string, std::size_t> first_seen_;
};

enum class Shape { Plain, Header, Branch, Else };
Shape shape_of(const std::vector<IslToken>& tokens);

struct Prepared {
  std::vector<IslToken> tokens;
  EmissionRows<double> rows;
};

Prepared before_vit(const IslInstruction& instr, TaintArtifacts& artifacts, const HmmModel<double>& model,
                    const DetectorOptions& options = {});

void after_vit(const IslInstruction& instr, const std::vector<IslToken>& tokens, const std::vector<HmmState>& states,
               TaintArtifacts& artifacts);

struct Step {
  IslInstruction source;
  std::vector<IslToken> tokens;  // after before_vit
  std::vector<HmmState> states;
  StateVector<double> scores;
  Shape shape = Shape::Plain;
  std::string tl, ctl, sl;  // lists after after_vit
};

struct Alert {
  std::string file;
  int entry_line = 0;
  int sink_line = 0;
  VulnClass sink_class = VulnClass::SQLI;
  std::string sink;
  std::vector<std::string> trace;  // one rendered line per instruction
};

struct Decoding {
  std::vector<Step> steps;
  HmmState final_state = HmmState::NTaint;
  std::optional<Alert> alert;
};

Decoding classify_slice(const SliceIsl& slice, const HmmModel<double>& model, const DetectorOptions& options = {});

// "<input,Taint> <var_vv_u,Taint>"
std::string render_trace(const Step& step);

}  // namespace dekant
