#include "dekant/cli.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "dekant/corpus.hpp"
#include "dekant/eval.hpp"
#include "dekant/hmm.hpp"
#include "dekant/scan.hpp"

#ifndef DEKANT_DEFAULT_MODEL
#define DEKANT_DEFAULT_MODEL "data/models/demo.model"
#endif
#ifndef DEKANT_DEFAULT_CONFIG
#define DEKANT_DEFAULT_CONFIG "data/config"
#endif

namespace dekant {

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

template <typename M>
std::string matrix_checksum(const M& m) {
  std::string text;
  char buf[32];
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g ", m(r, c));
      text += buf;
    }
  return hex(fnv1a(text));
}

struct TrainArgs {
  std::string corpus, out;
};

struct ScanArgs {
  std::string model = DEKANT_DEFAULT_MODEL;
  std::string config_dir = DEKANT_DEFAULT_CONFIG;
  std::vector<std::string> classes;
  unsigned jobs = 1;
  bool dump_slices = false;
  bool dump_isl = false;
  std::string format = "text";
  bool strict_triggers = false;
  std::size_t path_cap = 64;
  int inline_depth = 3;
  std::vector<std::string> paths;
};

struct EvalArgs {
  std::string corpus;
  std::size_t k = 10;
  std::uint64_t seed = 1;
  std::string format = "both";
  bool strict_triggers = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  Corpus corpus;
  try {
    corpus = load_corpus_file(a.corpus);
  } catch (const CorpusError& e) {
    err << a.corpus << ": " << e.what() << "\n";
    return kExitError;
  }
  const auto model = train<double>(corpus);
  const std::string text = save_model(model);
  std::ofstream file(a.out, std::ios::binary);
  if (!(file << text)) {
    err << a.out << ": cannot write model\n";
    return kExitError;
  }
  out << "entries " << corpus.entries.size() << "\n"
      << "maxlen " << corpus.max_len << "\n"
      << "start " << matrix_checksum(model.start) << "\n"
      << "trans " << matrix_checksum(model.trans) << "\n"
      << "emit " << matrix_checksum(model.emit) << "\n"
      << "model " << hex(fnv1a(text)) << " -> " << a.out << "\n";
  return kExitClean;
}

int cmd_scan(const ScanArgs& a, std::ostream& out, std::ostream& err) {
  ScanOptions options;
  options.jobs = std::max(1u, a.jobs);
  options.slicing.path_cap = a.path_cap;
  options.slicing.inline_depth = a.inline_depth;
  options.detection.strict_triggers = a.strict_triggers;
  for (const auto& c : a.classes) {
    const auto cls = parse_class(c);
    if (!cls) {
      err << "unknown vulnerability class '" << c << "'\n";
      return kExitError;
    }
    options.slicing.classes.push_back(*cls);
  }

  TokenConfig config;
  HmmModel<double> model;
  std::vector<ScanTarget> targets;
  try {
    config = TokenConfig::load_dir(a.config_dir);
    std::vector<std::string> warnings;
    model = load_model_file(a.model, &warnings);
    for (const auto& w : warnings) err << a.model << ": warning: " << w << "\n";
    targets = collect_targets(a.paths);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitError;
  }

  const ScanReport report = scan(targets, config, model, options);
  for (const auto& f : report.files)
    for (const auto& d : f.diagnostics) err << d << "\n";
  if (a.format == "json")
    out << report_json(report);
  else
    out << report_text(report, a.dump_slices, a.dump_isl);
  return report.alert_count() ? kExitFindings : kExitClean;
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  try {
    const Corpus corpus = load_corpus_file(a.corpus);
    DetectorOptions options;
    options.strict_triggers = a.strict_triggers;
    const KFoldResult r = kfold(corpus, a.k, a.seed, options);
    if (a.format != "json") out << eval_text(r);
    if (a.format != "text") out << eval_json(r);
  } catch (const CorpusError& e) {
    err << a.corpus << ": " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitError;
  }
  return kExitClean;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trainable HMM-based detector of input validation vulnerabilities in PHP"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Build a model from an annotated corpus");
  train_cmd->add_option("--corpus", train_args.corpus, "Corpus file")->required();
  train_cmd->add_option("--out", train_args.out, "Model file to write")->required();

  ScanArgs scan_args;
  auto* scan_cmd = app.add_subcommand("scan", "Report vulnerable slices in PHP files");
  scan_cmd->add_option("--model", scan_args.model, "Model file")->capture_default_str();
  scan_cmd->add_option("--config-dir", scan_args.config_dir, "Directory of token .cfg files")->capture_default_str();
  scan_cmd->add_option("--class", scan_args.classes, "Only report these classes (repeatable)");
  scan_cmd->add_option("--jobs", scan_args.jobs, "Files scanned in parallel")->capture_default_str();
  scan_cmd->add_flag("--dump-slices", scan_args.dump_slices, "Print extracted slices");
  scan_cmd->add_flag("--dump-isl", scan_args.dump_isl, "Print ISL, variable maps and decodings");
  scan_cmd->add_option("--format", scan_args.format, "Report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  scan_cmd->add_flag("--strict-listing4", scan_args.strict_triggers,
                     "Only typechk_num and contentchk validate the following parameter");
  scan_cmd->add_option("--path-cap", scan_args.path_cap, "Distinct slices kept per sink")->capture_default_str();
  scan_cmd->add_option("--inline-depth", scan_args.inline_depth, "Nested user-function inlining depth")
      ->capture_default_str();
  scan_cmd->add_option("paths", scan_args.paths, "Files or directories")->required();

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Cross-validate a corpus");
  eval_cmd->add_option("--corpus", eval_args.corpus, "Corpus file")->required();
  eval_cmd->add_option("--k", eval_args.k, "Number of folds")->capture_default_str();
  eval_cmd->add_option("--seed", eval_args.seed, "Shuffle seed")->capture_default_str();
  eval_cmd->add_option("--format", eval_args.format, "Report format")
      ->check(CLI::IsMember({"text", "json", "both"}))
      ->capture_default_str();
  eval_cmd->add_flag("--strict-listing4", eval_args.strict_triggers, "As for scan");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitClean : kExitError;
  }

  if (*train_cmd) return cmd_train(train_args, out, err);
  if (*scan_cmd) return cmd_scan(scan_args, out, err);
  return cmd_eval(eval_args, out, err);
}

}  // namespace dekant
