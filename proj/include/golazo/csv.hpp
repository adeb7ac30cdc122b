#pragma once

// Dense CSV matrices (no header) and sample files (optional header row).
// Values are written with 17 significant digits so a round trip is exact.

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace golazo {

std::string format_double(double v);

/// Writes `contents` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string matrix_to_csv(const Eigen::MatrixXd& m);
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

/// Parses numeric CSV. A first row containing any non-numeric field is taken
/// as a header. Accepts "inf", "-inf" and "nan" spellings. Throws Errc::data
/// on ragged rows or unparsable fields.
CsvTable parse_csv(std::string_view text, std::string_view source = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);

/// Reads a headerless square matrix.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

}  // namespace golazo
