#include "dekant/hmm.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dekant {

Counts count(const Corpus& corpus) {
  Counts c;
  for (const auto& e : corpus.entries) {
    if (e.pairs.empty()) continue;
    ++c.begin(static_cast<int>(index_of(e.pairs.front().second)));
    for (std::size_t i = 0; i < e.pairs.size(); ++i) {
      const auto [tok, st] = e.pairs[i];
      ++c.pairs(static_cast<int>(index_of(tok)), static_cast<int>(index_of(st)));
      if (i + 1 < e.pairs.size())
        ++c.moves(static_cast<int>(index_of(e.pairs[i + 1].second)), static_cast<int>(index_of(st)));
    }
  }
  return c;
}

namespace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename Derived>
void write_block(std::ostringstream& out, std::string_view label, const Eigen::MatrixBase<Derived>& m) {
  out << label << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << format_number(m(r, c));
    out << '\n';
  }
}

class Reader {
 public:
  explicit Reader(std::string_view text) : in_(std::string(text)) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw ModelError("unexpected end of model file");
    return w;
  }

  void expect(std::string_view w) {
    const auto got = word();
    if (got != w) throw ModelError("expected '" + std::string(w) + "', found '" + got + "'");
  }

  double number() {
    const auto w = word();
    try {
      std::size_t used = 0;
      const double v = std::stod(w, &used);
      if (used != w.size()) throw std::invalid_argument(w);
      return v;
    } catch (const std::exception&) {
      throw ModelError("dimension mismatch or bad number '" + w + "'");
    }
  }

  template <typename Derived>
  void fill(std::string_view label, Eigen::MatrixBase<Derived>& m) {
    expect(label);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = number();
  }

  bool done() {
    std::string w;
    return !(in_ >> w);
  }

 private:
  std::istringstream in_;
};

template <typename Derived>
void check_columns(std::string_view label, Eigen::MatrixBase<Derived>& m, std::vector<std::string>* warnings) {
  if ((m.array() <= 0.0).any()) throw ModelError(std::string(label) + ": smoothing violated (nonpositive entry)");
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double sum = m.col(c).sum();
    const double off = std::abs(sum - 1.0);
    if (off <= kStochasticTolerance) continue;
    if (off > kRenormalizeLimit)
      throw ModelError(std::string(label) + " column " + std::to_string(c) + " sums to " + format_number(sum));
    m.col(c) /= sum;
    if (warnings)
      warnings->push_back(std::string(label) + " column " + std::to_string(c) + " summed to " + format_number(sum) +
                          ", renormalized");
  }
}

}  // namespace

std::string save_model(const HmmModel<double>& model) {
  std::ostringstream out;
  out << kModelHeader << '\n' << "maxlen " << model.max_len << '\n';
  write_block(out, "start", model.start.transpose());
  write_block(out, "trans", model.trans);
  write_block(out, "emit", model.emit);
  return out.str();
}

HmmModel<double> load_model(std::string_view text, std::vector<std::string>* warnings) {
  Reader r(text);
  r.expect("dekant-model");
  r.expect("v1");
  r.expect("maxlen");
  const double len = r.number();
  if (len < 1 || len != std::floor(len)) throw ModelError("maxlen must be a positive integer");
  HmmModel<double> m;
  m.max_len = static_cast<std::size_t>(len);
  Eigen::Matrix<double, 1, kStates> start;
  r.fill("start", start);
  r.fill("trans", m.trans);
  r.fill("emit", m.emit);
  if (!r.done()) throw ModelError("dimension mismatch: trailing data after emit block");
  m.start = start.transpose();
  check_columns("start", m.start, warnings);
  check_columns("trans", m.trans, warnings);
  check_columns("emit", m.emit, warnings);
  return m;
}

HmmModel<double> load_model_file(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot read model " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str(), warnings);
}

}  // namespace dekant
