#include "rnmf/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace rnmf::io {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Numbered non-blank lines.
std::vector<std::pair<std::size_t, std::string_view>> content_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const std::string_view line =
        text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    ++line_no;
    if (!trim(line).empty()) out.emplace_back(line_no, line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

std::optional<double> parse_real(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<std::size_t> parse_index(std::string_view s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

MatrixFormat parse_matrix_format(std::string_view name) {
  if (name == "dense" || name == "dense_csv") return MatrixFormat::dense_csv;
  if (name == "triplet" || name == "triplet_csv") return MatrixFormat::triplet_csv;
  throw ValidationError("unknown matrix format '" + std::string(name) + "'");
}

Matrix parse_dense_csv(std::string_view text) {
  const auto lines = content_lines(text);
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto [line_no, line] = lines[k];
    const auto fields = split_fields(line);
    std::vector<double> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (auto f : fields) {
      const auto v = parse_real(f);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (k == 0) continue;  // header
      throw ParseError(at_line(line_no) + "non-numeric field", line_no);
    }
    if (cols == 0) {
      cols = row.size();
    } else if (row.size() != cols) {
      throw ParseError(at_line(line_no) + "ragged row with " + std::to_string(row.size()) +
                           " fields, expected " + std::to_string(cols),
                       line_no);
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw ParseError(at_line(line_no) + "non-finite value", line_no);
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw ParseError("no numeric rows", lines.empty() ? 1 : lines.back().first);
  return Matrix(rows, cols, std::move(values));
}

Matrix parse_triplet_csv(std::string_view text, std::optional<Shape> shape) {
  const auto lines = content_lines(text);
  if (lines.empty()) throw ParseError("empty triplet file", 1);
  {
    const auto [line_no, line] = lines.front();
    const auto header = split_fields(line);
    if (header.size() != 3 || header[0] != "row" || header[1] != "col" || header[2] != "value") {
      throw ParseError(at_line(line_no) + "expected header row,col,value", line_no);
    }
  }
  std::map<std::pair<std::size_t, std::size_t>, double> entries;
  std::size_t max_row = 0, max_col = 0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto [line_no, line] = lines[k];
    const auto fields = split_fields(line);
    if (fields.size() != 3) {
      throw ParseError(at_line(line_no) + "expected 3 fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    const auto i = parse_index(fields[0]);
    const auto j = parse_index(fields[1]);
    const auto v = parse_real(fields[2]);
    if (!i || !j) throw ParseError(at_line(line_no) + "bad index", line_no);
    if (!v || !std::isfinite(*v)) throw ParseError(at_line(line_no) + "bad value", line_no);
    if (shape && (*i >= shape->rows || *j >= shape->cols)) {
      throw ParseError(at_line(line_no) + "index outside declared shape", line_no);
    }
    entries[{*i, *j}] += *v;
    max_row = std::max(max_row, *i);
    max_col = std::max(max_col, *j);
  }
  const Shape s = shape ? *shape : Shape{max_row + 1, max_col + 1};
  if (!shape && entries.empty()) throw ParseError("triplet file has no entries", 1);
  Matrix m(s.rows, s.cols);
  for (const auto& [ij, v] : entries) m(ij.first, ij.second) = v;
  return m;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Matrix load_matrix(const fs::path& path, MatrixFormat format, std::optional<Shape> shape) {
  const std::string text = read_file(path);
  try {
    return format == MatrixFormat::dense_csv ? parse_dense_csv(text)
                                             : parse_triplet_csv(text, shape);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

Vector load_vector(const fs::path& path) {
  const Matrix m = load_matrix(path, MatrixFormat::dense_csv);
  if (m.rows() != 1 && m.cols() != 1) {
    throw ShapeError(path.string() + ": expected a single row or column");
  }
  return Vector(std::vector<double>(m.values().begin(), m.values().end()));
}

void require_nonnegative(const Matrix& m, std::string_view what) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) < 0.0) {
        throw ValidationError(std::string(what) + " has a negative entry at (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
      }
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string to_csv(const Matrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string to_csv(const Vector& v) {
  std::string out;
  for (double x : v.values()) {
    out += format_double(x);
    out += '\n';
  }
  return out;
}

std::string trace_csv(const std::vector<TraceRecord>& trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const TraceRecord& t : trace) {
    out += std::to_string(t.iter);
    out += ',' + format_double(t.objective);
    out += ',' + format_double(t.frob_error);
    out += ',';
    if (t.alpha_l) out += format_double(*t.alpha_l);
    out += ',';
    if (t.alpha_r) out += format_double(*t.alpha_r);
    out += ',';
    if (t.clipped_count) out += std::to_string(*t.clipped_count);
    out += '\n';
  }
  return out;
}

std::string qp_trace_csv(const std::vector<QpTraceRecord>& trace) {
  std::string out = "iter,objective,alpha\n";
  for (const QpTraceRecord& t : trace) {
    out += std::to_string(t.iter) + ',' + format_double(t.objective) + ',';
    if (!std::isnan(t.alpha)) out += format_double(t.alpha);
    out += '\n';
  }
  return out;
}

void KeyValueReport::add(std::string key, std::string value) {
  entries_.emplace_back(std::move(key), std::move(value));
}

void KeyValueReport::add(std::string key, double value) {
  add(std::move(key), format_double(value));
}

void KeyValueReport::add(std::string key, std::size_t value) {
  add(std::move(key), std::to_string(value));
}

std::string KeyValueReport::str() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + '=' + v + '\n';
  return out;
}

void OutputBatch::add(const fs::path& relative, std::string content) {
  files_.emplace_back(relative, std::move(content));
}

void OutputBatch::commit() const {
  std::vector<fs::path> staged;
  auto discard = [&] {
    std::error_code ec;
    for (const auto& p : staged) fs::remove(p, ec);
  };
  try {
    for (const auto& [rel, content] : files_) {
      const fs::path target = dir_ / rel;
      fs::create_directories(target.parent_path());
      fs::path tmp = target;
      tmp += ".tmp";
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write " + tmp.string());
      staged.push_back(tmp);
      out << content;
      out.close();
      if (!out) throw Error("failed writing " + tmp.string());
    }
  } catch (...) {
    discard();
    throw;
  }
  for (std::size_t k = 0; k < files_.size(); ++k) {
    fs::rename(staged[k], dir_ / files_[k].first);
  }
}

}  // namespace rnmf::io
