#include "dekant/detector.hpp"

#include <algorithm>

namespace dekant {

using T = IslToken;

void TaintArtifacts::insert(ListKind list, const std::string& name) {
  first_seen_.emplace(name, first_seen_.size());
  lists_[idx(list)].insert(name);
}

std::vector<std::string> TaintArtifacts::items(ListKind list) const {
  std::vector<std::string> out(lists_[idx(list)].begin(), lists_[idx(list)].end());
  std::sort(out.begin(), out.end(),
            [&](const auto& a, const auto& b) { return first_seen_.at(a) < first_seen_.at(b); });
  return out;
}

std::string TaintArtifacts::render(ListKind list) const {
  std::string out = "{";
  for (const auto& n : items(list)) {
    if (out.size() > 1) out += ", ";
    out += n;
  }
  return out + "}";
}

Shape shape_of(const std::vector<IslToken>& tokens) {
  if (tokens.empty() || tokens.front() != T::cond) return Shape::Plain;
  if (tokens.size() == 1) return Shape::Else;
  return tokens.back() == T::cond ? Shape::Header : Shape::Branch;
}

namespace {

bool is_check(T t, bool strict) {
  if (t == T::typechk_num || t == T::contentchk) return true;
  return !strict && (t == T::typechk_str || t == T::fillchk);
}

const std::string& name_at(const IslInstruction& instr, std::size_t i) {
  if (i >= instr.varmap.names.size())
    throw DetectError(instr.loc.file + ":" + std::to_string(instr.loc.line) + ": variable map has no entry for token " +
                      std::to_string(i + 1));
  return instr.varmap.names[i];
}

bool named(const std::string& n) { return n != kNoName; }

}  // namespace

Prepared before_vit(const IslInstruction& instr, TaintArtifacts& a, const HmmModel<double>& model,
                    const DetectorOptions& options) {
  Prepared out;
  out.tokens = instr.tokens;
  a.val = false;
  a.san = std::find(instr.tokens.begin(), instr.tokens.end(), T::sanit_f) != instr.tokens.end();

  const Shape shape = shape_of(instr.tokens);
  switch (shape) {
    case Shape::Header: a.condition = 1; break;
    case Shape::Branch: a.condition = 2; break;
    case Shape::Else:
      a.condition = 0;
      a.clear(ListKind::CTL);
      break;
    case Shape::Plain: a.condition = 0; break;
  }

  const auto key_at = [&](std::size_t i) -> std::string {
    return i < instr.input_keys.size() ? instr.input_keys[i] : std::string();
  };
  const auto cleared = [&](const std::string& n) { return a.contains(ListKind::CTL, n) || a.contains(ListKind::SL, n); };

  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    T& obs = out.tokens[i];
    if (a.condition == 1 && i > 0) {
      if (is_check(obs, options.strict_triggers)) a.val = true;
      if (obs == T::var && a.val) {
        if (const auto& n = name_at(instr, i); named(n)) a.insert(ListKind::CTL, n);
        a.val = false;
      } else if (obs == T::input && a.val) {
        if (const auto k = key_at(i); !k.empty()) a.insert(ListKind::CTL, k);
        a.val = false;
      }
    }
    const bool target = instr.varmap.is_assignment && i + 1 == out.tokens.size();
    if (obs == T::var && !target) {  // the target's old taint says nothing about its new value
      const auto& n = name_at(instr, i);
      const bool tainted = named(n) && a.contains(ListKind::TL, n);
      if (a.condition == 0 ? tainted && !a.contains(ListKind::SL, n) : tainted && !cleared(n)) obs = T::var_vv;
    } else if (obs == T::input && a.condition == 2) {
      if (const auto k = key_at(i); !k.empty() && cleared(k)) obs = T::var;
    }
  }
  out.rows = gather_emissions(model, out.tokens);
  return out;
}

void after_vit(const IslInstruction& instr, const std::vector<IslToken>& tokens, const std::vector<HmmState>& states,
               TaintArtifacts& a) {
  if (states.empty()) return;
  if (instr.varmap.is_assignment) {
    const std::string& n = name_at(instr, tokens.size() - 1);
    if (!named(n)) return;
    if (states.back() == HmmState::Taint) {
      a.insert(ListKind::TL, n);
      a.erase(ListKind::SL, n);
    } else {
      a.erase(ListKind::TL, n);
      if (a.san) {
        a.insert(ListKind::SL, n);
        a.san = false;
      }
    }
  }
  if (shape_of(tokens) == Shape::Header)
    for (std::size_t i = 0; i < tokens.size(); ++i)
      if (tokens[i] == T::var || tokens[i] == T::var_vv)
        if (const auto& n = name_at(instr, i); named(n) && a.contains(ListKind::TL, n)) a.insert(ListKind::CTL, n);
}

std::string render_trace(const Step& step) {
  std::string out;
  for (std::size_t i = 0; i < step.tokens.size(); ++i) {
    const T t = step.tokens[i];
    const HmmState s = step.states[i];
    std::string tok(name_of(t));
    const std::string& n = i < step.source.varmap.names.size() ? step.source.varmap.names[i] : std::string(kNoName);
    if ((t == T::var || t == T::var_vv) && named(n) && (t == T::var_vv || s == HmmState::Taint)) tok = "var_vv_" + n;
    if (!out.empty()) out += ' ';
    out += "<" + tok + "," + std::string(name_of(s)) + ">";
  }
  return out;
}

Decoding classify_slice(const SliceIsl& slice, const HmmModel<double>& model, const DetectorOptions& options) {
  if (slice.instructions.empty()) throw DetectError("empty slice");
  Decoding out;
  TaintArtifacts a;
  for (const auto& instr : slice.instructions) {
    Step step;
    step.source = instr;
    step.shape = shape_of(instr.tokens);
    Prepared prep = before_vit(instr, a, model, options);
    auto res = decode_vit(prep.rows, model, options.final_states, options.chunk_len);
    step.tokens = std::move(prep.tokens);
    step.states = std::move(res.states);
    step.scores = res.scores;
    after_vit(instr, step.tokens, step.states, a);
    step.tl = a.render(ListKind::TL);
    step.ctl = a.render(ListKind::CTL);
    step.sl = a.render(ListKind::SL);
    out.steps.push_back(std::move(step));
  }
  out.final_state = out.steps.back().states.back();
  if (out.final_state == HmmState::Taint) {
    Alert alert{slice.origin, slice.entry_line, slice.sink_line, slice.sink_class, slice.sink, {}};
    for (const auto& s : out.steps) alert.trace.push_back(render_trace(s));
    out.alert = std::move(alert);
  }
  return out;
}

}  // namespace dekant
