#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dekant/detector.hpp"
#include "dekant/slicer.hpp"
#include "dekant/token_config.hpp"

namespace dekant {

struct ScanOptions {
  SliceOptions slicing;
  DetectorOptions detection;
  unsigned jobs = 1;
};

struct SliceReport {
  Slice slice;
  std::optional<SliceIsl> isl;
  std::optional<Decoding> decoding;
  std::string skipped;  // why the slice was not classified
};

struct FileReport {
  std::string path;
  std::vector<SliceReport> slices;
  std::vector<std::string> diagnostics;
};

struct ScanReport {
  std::vector<FileReport> files;

  std::size_t slice_count() const;
  std::size_t alert_count() const;
  std::size_t skipped_count() const;
};

struct ScanTarget {
  std::string file;
  std::string root;  // literal includes resolve against this directory
};

// Directories are walked recursively for *.php; explicit files are taken as
// given. Output is sorted by path. Throws std::runtime_error on a missing target.
std::vector<ScanTarget> collect_targets(const std::vector<std::string>& paths);

FileReport scan_file(const ScanTarget& target, const TokenConfig& config, const HmmModel<double>& model,
                     const ScanOptions& options);

// Files are scanned on `options.jobs` threads; the report order never depends on it.
ScanReport scan(const std::vector<ScanTarget>& targets, const TokenConfig& config, const HmmModel<double>& model,
                const ScanOptions& options);

std::string report_text(const ScanReport& report, bool dump_slices, bool dump_isl);
std::string report_json(const ScanReport& report);

// Per instruction: line, trace and the lists after it.
std::string dump_decoding(const Decoding& decoding);

}  // namespace dekant
