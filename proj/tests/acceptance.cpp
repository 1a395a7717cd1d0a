// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dekant/corpus.hpp"
#include "dekant/eval.hpp"
#include "dekant/hmm.hpp"
#include "dekant/scan.hpp"
#include "dekant/viterbi.hpp"
#include "oracles.hpp"
#include "random_models.hpp"
#include "support.hpp"

using namespace dekant;
using testing_support::read;

namespace {

constexpr double kMaxTrainSeconds = 1.0;
constexpr double kMaxViterbiSeconds = 10.0;
constexpr int kViterbiCases = 1000;
constexpr int kChainCases = 100;
constexpr double kChainScoreTol = 1e-12;
constexpr double kColumnSumTol = 1e-9;

struct Target {
  double value, tol;
};
constexpr Target kEvalAcc{0.95, 0.01}, kEvalPr{0.97, 0.01}, kEvalFpr{0.15, 0.01}, kEvalFnr{0.02, 0.005};
constexpr Target kDecPr{0.96, 0.01}, kDecFnr{0.005, 0.003};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects mismatches; a criterion passes when none were recorded.
struct Check {
  std::vector<std::string> problems;
  void expect(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
  template <typename A, typename B>
  void equal(const A& got, const B& want, const std::string& what) {
    if (!(got == want)) {
      std::ostringstream s;
      s << what << ": got '" << got << "' want '" << want << "'";
      problems.push_back(s.str());
    }
  }
};

FileReport scan_one(const std::string& rel) {
  const auto config = TokenConfig::load_dir(testing_support::source_path("data/config"));
  return scan_file({rel, ""}, config, testing_support::demo_model(), {});
}

std::vector<std::string> isl_rows(const SliceReport& r) {
  std::vector<std::string> out;
  if (!r.isl) return out;
  for (const auto& in : r.isl->instructions)
    out.push_back(std::to_string(in.loc.line) + " | " + join_tokens(in.tokens) + " | " + render_varmap(in.varmap));
  return out;
}

std::string joined(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += s + "\n";
  return out;
}

Check login_query() {
  Check c;
  const auto report = scan_one("fixtures/login_query/login.php");
  c.equal(report.slices.size(), 1u, "slice count");
  if (report.slices.size() != 1) return c;
  const auto& s = report.slices[0];
  c.equal(joined(isl_rows(s)), joined({"1 | input var | 1 - u", "2 | var var | 1 u q", "3 | ss var var | 1 - q r"}),
          "isl");
  if (!s.decoding) {
    c.expect(false, "not decoded");
    return c;
  }
  const std::vector<std::string> traces = {"<input,Taint> <var_vv_u,Taint>", "<var_vv_u,Taint> <var_vv_q,Taint>",
                                           "<ss,N-Taint> <var_vv_q,Taint> <var_vv_r,Taint>"};
  const std::vector<std::string> tls = {"{u}", "{u, q}", "{u, q, r}"};
  for (std::size_t i = 0; i < 3 && i < s.decoding->steps.size(); ++i) {
    c.equal(render_trace(s.decoding->steps[i]), traces[i], "trace line " + std::to_string(i + 1));
    c.equal(s.decoding->steps[i].tl, tls[i], "TL line " + std::to_string(i + 1));
  }
  c.equal(name_of(s.decoding->final_state), "Taint", "classification");
  return c;
}

Check validated_form() {
  Check c;
  const auto report = scan_one("fixtures/validated_echo/user_form.php");
  c.equal(report.slices.size(), 2u, "slice count");
  if (report.slices.size() != 2) return c;
  const auto& a = report.slices[0];
  const auto& b = report.slices[1];
  const std::string header = "3 | cond fillchk var contentchk var typechk_num var cond | 0 - - a - u - a -";
  c.equal(joined(isl_rows(a)),
          joined({"1 | input var | 1 - u", "2 | input var | 1 - a", header, "4 | cond ss var | 0 - - u"}), "slice 1");
  c.equal(joined(isl_rows(b)), joined({"1 | input var | 1 - u", header, "5 | cond | 0 -", "6 | ss var | 0 - u"}),
          "slice 2");
  if (!a.decoding || !b.decoding || a.decoding->steps.size() != 4 || b.decoding->steps.size() != 4) {
    c.expect(false, "not decoded");
    return c;
  }
  const std::vector<std::string> ctl_a = {"{}", "{}", "{u, a}", "{u, a}"};
  const std::vector<std::string> tl_a = {"{u}", "{u, a}", "{u, a}", "{u, a}"};
  const std::vector<std::string> ctl_b = {"{}", "{u, a}", "{}", "{}"};
  for (std::size_t i = 0; i < 4; ++i) {
    c.equal(a.decoding->steps[i].ctl, ctl_a[i], "slice 1 CTL step " + std::to_string(i + 1));
    c.equal(a.decoding->steps[i].tl, tl_a[i], "slice 1 TL step " + std::to_string(i + 1));
    c.equal(b.decoding->steps[i].ctl, ctl_b[i], "slice 2 CTL step " + std::to_string(i + 1));
  }
  c.equal(name_of(a.decoding->final_state), "N-Taint", "slice 1 classification");
  c.equal(name_of(b.decoding->final_state), "Taint", "slice 2 classification");
  return c;
}

Check sanitized_input() {
  Check c;
  const std::vector<IslToken> toks = {IslToken::sanit_f, IslToken::input, IslToken::var};
  const auto& m = testing_support::demo_model();
  const auto got = decode_vit(gather_emissions(m, toks), m, FinalStates::TaintOrNTaint);
  std::string states;
  for (auto s : got.states) states += std::string(name_of(s)) + " ";
  c.equal(states, std::string("San San N-Taint "), "states");
  return c;
}

std::vector<std::string> corpus_lines(const std::string& rel) {
  std::vector<std::string> out;
  std::istringstream in(read(rel));
  std::string l;
  while (std::getline(in, l))
    if (!l.empty() && l[0] != '#') out.push_back(l);
  return out;
}

Check trainer() {
  Check c;
  std::vector<std::string> corpora;
  for (const char* rel : {"fixtures/seed.corpus", "data/corpus/demo.corpus"}) {
    const auto pool = corpus_lines(rel);
    std::mt19937 rng(41);
    for (int round = 0; round < 100; ++round) {
      std::string text;
      const int n = 1 + round % 10;
      for (int i = 0; i < n; ++i) text += pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)] + "\n";
      corpora.push_back(text);
    }
  }
  const auto t0 = Clock::now();
  for (const auto& text : corpora) {
    const auto m = train(load_corpus(text));
    const auto ref = oracle::brute_force_train(text);
    bool same = true;
    for (int s = 0; s < 5; ++s) same = same && m.start(s) == ref.start[s];
    for (int d = 0; d < 5; ++d)
      for (int s = 0; s < 5; ++s) same = same && m.trans(d, s) == ref.trans[d][s];
    for (int t = 0; t < 22; ++t)
      for (int s = 0; s < 5; ++s) same = same && m.emit(t, s) == ref.emit[t][s];
    c.expect(same, "differs from counter on:\n" + text);
    c.expect(std::abs(m.start.sum() - 1) <= kColumnSumTol, "start does not sum to 1");
    for (int s = 0; s < kStates; ++s) {
      c.expect(std::abs(m.trans.col(s).sum() - 1) <= kColumnSumTol, "transition column sum");
      c.expect(std::abs(m.emit.col(s).sum() - 1) <= kColumnSumTol, "emission column sum");
    }
    c.expect(m.start.minCoeff() > 0 && m.trans.minCoeff() > 0 && m.emit.minCoeff() > 0, "zero probability");
  }
  const double secs = seconds_since(t0);
  c.expect(secs < kMaxTrainSeconds, "took " + std::to_string(secs) + " s");
  return c;
}

Check viterbi() {
  Check c;
  std::mt19937 rng(1234);
  const auto t0 = Clock::now();
  int agree = 0;
  for (int i = 0; i < kViterbiCases; ++i) {
    const auto m = testing_support::random_model(rng, i % 4 == 0);
    const auto toks = testing_support::random_tokens(rng, 1 + i % 6);
    const bool constrained = i % 2 == 0;
    const auto got = decode_vit(gather_emissions(m, toks), m, constrained ? FinalStates::TaintOrNTaint : FinalStates::Any);
    const auto want = testing_support::oracle_decode(m, toks, constrained);
    std::vector<int> states;
    for (auto s : got.states) states.push_back(static_cast<int>(index_of(s)));
    agree += states == want.states;
  }
  const double secs = seconds_since(t0);
  c.equal(agree, kViterbiCases, "agreeing cases");
  c.expect(secs < kMaxViterbiSeconds, "took " + std::to_string(secs) + " s");
  return c;
}

Check chaining() {
  Check c;
  std::mt19937 rng(77);
  for (int i = 0; i < kChainCases; ++i) {
    const std::size_t max_len = 2 + i % 7;
    const auto m = testing_support::random_model(rng, i % 5 == 0, max_len);
    const auto toks = testing_support::random_tokens(rng, 2 * max_len);
    const auto rows = gather_emissions(m, toks);
    const auto split = decode_vit(rows, m, FinalStates::TaintOrNTaint, max_len);
    const auto whole = decode_vit(rows, m, FinalStates::TaintOrNTaint, 2 * max_len);
    c.expect(split.states == whole.states, "state lists differ in case " + std::to_string(i));
    c.expect((split.scores - whole.scores).cwiseAbs().maxCoeff() <= kChainScoreTol,
             "scores differ in case " + std::to_string(i));
  }
  return c;
}

Check metric_arithmetic() {
  Check c;
  const auto within = [&](std::optional<double> v, Target t, const std::string& what) {
    c.expect(v && std::abs(*v - t.value) <= t.tol, what + " = " + format_metric(v));
  };
  const auto eval = metrics({.tp = 405, .fp = 14, .fn = 9, .tn = 82});
  within(eval.acc, kEvalAcc, "evaluation acc");
  within(eval.pr, kEvalPr, "evaluation pr");
  within(eval.fpr, kEvalFpr, "evaluation fpr");
  within(eval.fnr, kEvalFnr, "evaluation fnr");
  const auto dec = metrics({.tp = 412, .fp = 16, .fn = 2, .tn = 80});
  within(dec.pr, kDecPr, "decoding pr");
  within(dec.fnr, kDecFnr, "decoding fnr");
  return c;
}

Check corpus_pipeline() {
  Check c;
  const std::string text = read("fixtures/seed.corpus");
  try {
    const Corpus corpus = load_corpus(text);
    c.equal(corpus.entries.size(), 24u, "entries");
    std::size_t padded = 0;
    for (const auto& e : corpus.entries) padded += e.pairs.size() == corpus.max_len;
    c.equal(padded, corpus.entries.size(), "padded entries");
    const Corpus doubled = load_corpus(text + text);
    c.equal(doubled.entries.size(), 24u, "entries after duplication");
    const std::string saved = save_corpus(corpus);
    c.expect(save_corpus(load_corpus(saved)) == saved, "save/load is not byte-identical");
  } catch (const CorpusError& e) {
    c.expect(false, e.what());
  }

  // Every pair the emission table forbids is rejected on the line it appears.
  int rejected = 0, forbidden = 0;
  for (auto s : all_states())
    for (auto t : all_tokens()) {
      if (can_emit(s, t)) continue;
      ++forbidden;
      const std::string bad = "<input,Taint> <var_vv,Taint>\n<ss,N-Taint> " +
                              render_pair({t, s}) + " <var,N-Taint>\n";
      try {
        load_corpus(bad);
      } catch (const CorpusError& e) {
        rejected += e.line() == 2;
      }
    }
  c.equal(rejected, forbidden, "forbidden pairs rejected at line 2");
  return c;
}

Check determinism() {
  Check c;
  const auto config = TokenConfig::load_dir(testing_support::source_path("data/config"));
  const auto targets = collect_targets({"fixtures"});
  ScanOptions serial, parallel;
  parallel.jobs = 4;
  const std::string a = report_json(scan(targets, config, testing_support::demo_model(), serial));
  const std::string b = report_json(scan(targets, config, testing_support::demo_model(), parallel));
  const std::string again = report_json(scan(targets, config, testing_support::demo_model(), parallel));
  c.expect(a == b, "--jobs 1 and --jobs 4 differ");
  c.expect(b == again, "repeated runs differ");
  c.expect(targets.size() > 3, "fixture tree not found");
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"sql injection slice end to end", login_query},
      {"validated branch slices end to end", validated_form},
      {"sanitized input decoding", sanitized_input},
      {"trainer equals brute-force counter", trainer},
      {"viterbi equals exhaustive search", viterbi},
      {"chunked decoding equals whole decoding", chaining},
      {"metrics arithmetic", metric_arithmetic},
      {"corpus pipeline", corpus_pipeline},
      {"scan determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const bool ok = c.problems.empty();
    failed += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << "\n";
    for (const auto& p : c.problems) std::cout << "    " << p << "\n";
  }
  return failed ? 1 : 0;
}
