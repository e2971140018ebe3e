#pragma once

// Matrix files and run outputs.
//
//   dense CSV    comma-separated rows, optional non-numeric header line
//   triplet CSV  header "row,col,value", 0-based indices, duplicates summed,
//                omitted entries zero
//   trace CSV    iter,objective,frob_error,alpha_l,alpha_r,clipped_count
//
// Numbers are written in shortest round-trip form.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rnmf/matrix.hpp"
#include "rnmf/nmf.hpp"
#include "rnmf/qp.hpp"

namespace rnmf::io {

enum class MatrixFormat { dense_csv, triplet_csv };

MatrixFormat parse_matrix_format(std::string_view name);

struct Shape {
  std::size_t rows;
  std::size_t cols;
};

Matrix parse_dense_csv(std::string_view text);
// Without `shape`, the extent is one past the largest index seen.
Matrix parse_triplet_csv(std::string_view text, std::optional<Shape> shape = std::nullopt);

Matrix load_matrix(const std::filesystem::path& path, MatrixFormat format,
                   std::optional<Shape> shape = std::nullopt);
// A dense CSV holding a single row or a single column.
Vector load_vector(const std::filesystem::path& path);

// Throws ValidationError naming `what` if any entry is negative.
void require_nonnegative(const Matrix& m, std::string_view what);

std::string format_double(double v);
std::string to_csv(const Matrix& m);
// One value per line.
std::string to_csv(const Vector& v);

inline constexpr std::string_view kTraceHeader =
    "iter,objective,frob_error,alpha_l,alpha_r,clipped_count";

std::string trace_csv(const std::vector<TraceRecord>& trace);
std::string qp_trace_csv(const std::vector<QpTraceRecord>& trace);

// Flat "key=value" lines in insertion order.
class KeyValueReport {
 public:
  void add(std::string key, std::string value);
  void add(std::string key, double value);
  void add(std::string key, std::size_t value);
  std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Stages file contents and publishes them together: commit() writes every
// file to a temporary sibling and then renames it into place.
class OutputBatch {
 public:
  explicit OutputBatch(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add(const std::filesystem::path& relative, std::string content);
  void commit() const;

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace rnmf::io
