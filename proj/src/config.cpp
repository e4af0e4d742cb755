#include "agdmm/config.hpp"

#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

#include "agdmm/error.hpp"

namespace agdmm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T number(std::string_view key, std::string_view v, int line) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ParseError("config line " + std::to_string(line) + ": " + std::string(key) + " expects an integer");
  return out;
}

Matrix read_file(const std::string& path, const Field& field) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file " + path);
  Matrix m = read_matrix(in);
  if (&m.field() != &field) throw FieldMismatch();
  return m;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view val = trim(line.substr(eq + 1));
    if (key == "scheme") cfg.scheme = val;
    else if (key == "a") cfg.a_file = val;
    else if (key == "b") cfg.b_file = val;
    else if (key == "matrix_seed") cfg.matrix_seed = number<std::uint64_t>(key, val, line_no);
    else if (key == "model") cfg.model = val;
    else if (key == "seed") cfg.seed = number<std::uint64_t>(key, val, line_no);
    else if (key == "trials") cfg.trials = number<int>(key, val, line_no);
    else if (key == "out") cfg.out = val;
    else if (key == "format") {
      if (val != "json" && val != "csv") throw ParseError("config line " + std::to_string(line_no) + ": format must be json or csv");
      cfg.format = val;
    } else {
      throw ParseError("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream os;
  os << "scheme = " << scheme << '\n';
  if (!a_file.empty()) os << "a = " << a_file << '\n';
  if (!b_file.empty()) os << "b = " << b_file << '\n';
  os << "matrix_seed = " << matrix_seed << '\n'
     << "model = " << model << '\n'
     << "seed = " << seed << '\n'
     << "trials = " << trials << '\n';
  if (!out.empty()) os << "out = " << out << '\n';
  if (!format.empty()) os << "format = " << format << '\n';
  return os.str();
}

std::pair<Matrix, Matrix> load_matrices(const ExperimentConfig& cfg, const SchemeInstance& inst) {
  const auto& P = inst.spec.part;
  std::mt19937_64 rng(cfg.matrix_seed);
  Matrix A = cfg.a_file.empty() ? Matrix::random(inst.field(), P.t, P.r, rng) : read_file(cfg.a_file, inst.field());
  Matrix B = cfg.b_file.empty() ? Matrix::random(inst.field(), P.r, P.s, rng) : read_file(cfg.b_file, inst.field());
  return {std::move(A), std::move(B)};
}

}  // namespace agdmm
