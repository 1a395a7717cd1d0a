#include "dekant/scan.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dekant/php/parser.hpp"
#include "dekant/translator.hpp"
#include "json.hpp"

namespace dekant {

namespace fs = std::filesystem;

std::size_t ScanReport::slice_count() const {
  std::size_t n = 0;
  for (const auto& f : files) n += f.slices.size();
  return n;
}

std::size_t ScanReport::alert_count() const {
  std::size_t n = 0;
  for (const auto& f : files)
    for (const auto& s : f.slices) n += s.decoding && s.decoding->alert ? 1 : 0;
  return n;
}

std::size_t ScanReport::skipped_count() const {
  std::size_t n = 0;
  for (const auto& f : files)
    for (const auto& s : f.slices) n += s.skipped.empty() ? 0 : 1;
  return n;
}

std::vector<ScanTarget> collect_targets(const std::vector<std::string>& paths) {
  std::vector<ScanTarget> out;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (!e.is_regular_file()) continue;
        std::string ext = e.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".php") out.push_back({e.path().generic_string(), fs::path(p).generic_string()});
      }
    } else if (fs::is_regular_file(p)) {
      out.push_back({fs::path(p).generic_string(), fs::path(p).parent_path().generic_string()});
    } else {
      throw std::runtime_error(p + ": no such file or directory");
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.file < b.file; });
  out.erase(std::unique(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.file == b.file; }),
            out.end());
  return out;
}

FileReport scan_file(const ScanTarget& target, const TokenConfig& config, const HmmModel<double>& model,
                     const ScanOptions& options) {
  FileReport report;
  report.path = target.file;
  std::ifstream in(target.file, std::ios::binary);
  if (!in) {
    report.diagnostics.push_back(target.file + ": cannot read file");
    return report;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  php::Ast ast;
  try {
    ast = php::parse_file(buf.str(), target.file);
  } catch (const php::ParseError& e) {
    report.diagnostics.push_back(e.what());
    return report;
  }

  SliceOptions slicing = options.slicing;
  if (slicing.root.empty()) slicing.root = target.root.empty() ? "." : target.root;
  SliceResult sliced = extract_slices(ast, config, slicing);
  report.diagnostics = std::move(sliced.diagnostics);
  for (auto& slice : sliced.slices) {
    SliceReport sr;
    sr.slice = std::move(slice);
    try {
      sr.isl = translate_slice(sr.slice, config);
      sr.decoding = classify_slice(*sr.isl, model, options.detection);
    } catch (const TranslateError& e) {
      sr.skipped = "line " + std::to_string(e.line()) + ": " + e.what();
    } catch (const DetectError& e) {
      sr.skipped = e.what();
    }
    if (!sr.skipped.empty())
      report.diagnostics.push_back(sr.slice.file + ":" + std::to_string(sr.slice.sink_line) + ": slice skipped: " +
                                   sr.skipped);
    report.slices.push_back(std::move(sr));
  }
  return report;
}

ScanReport scan(const std::vector<ScanTarget>& targets, const TokenConfig& config, const HmmModel<double>& model,
                const ScanOptions& options) {
  ScanReport report;
  report.files.resize(targets.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < targets.size(); i = next++)
      report.files[i] = scan_file(targets[i], config, model, options);
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(targets.size())));
  if (jobs <= 1) {
    work();
    return report;
  }
  std::vector<std::jthread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work);
  pool.clear();
  return report;
}

std::string dump_decoding(const Decoding& d) {
  std::ostringstream out;
  for (const auto& s : d.steps)
    out << s.source.loc.line << "\t" << render_trace(s) << "\tTL = " << s.tl << "; CTL = " << s.ctl << "; SL = " << s.sl
        << "\n";
  out << "final " << name_of(d.final_state) << "\n";
  return out.str();
}

std::string report_text(const ScanReport& report, bool dump_slices_flag, bool dump_isl_flag) {
  std::ostringstream out;
  for (const auto& f : report.files) {
    if (dump_slices_flag) {
      std::vector<Slice> slices;
      for (const auto& s : f.slices) slices.push_back(s.slice);
      out << dump_slices(slices);
    }
    for (const auto& s : f.slices) {
      if (dump_isl_flag && s.isl) {
        out << dump_isl(*s.isl);
        if (s.decoding) out << dump_decoding(*s.decoding);
      }
      if (!s.decoding || !s.decoding->alert) continue;
      const Alert& a = *s.decoding->alert;
      out << a.file << ":" << a.sink_line << ": " << label_of(a.sink_class) << " vulnerability (entry line "
          << a.entry_line << ", sink " << a.sink << ")\n";
      for (std::size_t i = 0; i < a.trace.size(); ++i)
        out << "  " << s.decoding->steps[i].source.loc.line << "\t" << a.trace[i] << "\n";
    }
  }
  out << "summary: " << report.files.size() << " file(s), " << report.slice_count() << " slice(s), "
      << report.alert_count() << " alert(s), " << report.skipped_count() << " skipped\n";
  return out.str();
}

std::string report_json(const ScanReport& report) {
  using json = nlohmann::ordered_json;
  json files = json::array(), slices = json::array(), alerts = json::array();
  for (const auto& f : report.files) {
    json jf;
    jf["path"] = f.path;
    jf["slices"] = f.slices.size();
    jf["diagnostics"] = f.diagnostics;
    files.push_back(std::move(jf));
    for (const auto& s : f.slices) {
      json js;
      js["file"] = s.slice.file;
      js["class"] = label_of(s.slice.sink_class);
      js["entry_line"] = s.slice.entry_line;
      js["sink_line"] = s.slice.sink_line;
      js["sink"] = s.slice.sink;
      json lines = json::array();
      for (const auto& st : s.slice.statements) lines.push_back(st.line);
      js["lines"] = std::move(lines);
      js["branches"] = s.slice.branches;
      js["loop_approximated"] = s.slice.loop_approx;
      js["inline_cut"] = s.slice.cut;
      if (s.isl) {
        json isl = json::array();
        for (const auto& in : s.isl->instructions)
          isl.push_back({{"line", in.loc.line}, {"tokens", join_tokens(in.tokens)}, {"varmap", render_varmap(in.varmap)}});
        js["isl"] = std::move(isl);
      }
      if (s.decoding) {
        js["status"] = name_of(s.decoding->final_state);
        json trace = json::array();
        for (const auto& step : s.decoding->steps)
          trace.push_back({{"line", step.source.loc.line},
                           {"trace", render_trace(step)},
                           {"TL", step.tl},
                           {"CTL", step.ctl},
                           {"SL", step.sl}});
        js["trace"] = std::move(trace);
      } else {
        js["status"] = "skipped";
        js["reason"] = s.skipped;
      }
      slices.push_back(js);
      if (s.decoding && s.decoding->alert) {
        const Alert& a = *s.decoding->alert;
        alerts.push_back({{"file", a.file},
                          {"class", label_of(a.sink_class)},
                          {"entry_line", a.entry_line},
                          {"sink_line", a.sink_line},
                          {"sink", a.sink},
                          {"trace", a.trace}});
      }
    }
  }
  json j;
  j["files"] = std::move(files);
  j["slices"] = std::move(slices);
  j["alerts"] = std::move(alerts);
  j["summary"] = {{"files", report.files.size()},
                  {"slices", report.slice_count()},
                  {"alerts", report.alert_count()},
                  {"skipped", report.skipped_count()}};
  return j.dump(2) + "\n";
}

}  // namespace dekant
