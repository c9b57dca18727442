#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hartreelab/grid.hpp"

namespace hartreelab {

/// Reals in exponent notation with enough digits to round-trip.
std::string format_real(double v);

/// RFC-4180 writer. Fields containing separators or quotes are quoted.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::size_t width_;
};

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

/// Snapshots as rows (t, j, r, re, im).
void write_fields(const std::filesystem::path& path, const std::vector<double>& times,
                  const std::vector<RadialField>& fields);

/// Reads snapshots written by write_fields onto `grid`; throws DomainError
/// when the node radii do not match.
void read_fields(const std::filesystem::path& path, const GridPtr& grid, std::vector<double>& times,
                 std::vector<RadialField>& fields);

/// Single profile as rows (r, re, im).
void write_profile(const std::filesystem::path& path, const RadialField& u);

/// Reads a profile written by write_profile and interpolates it linearly
/// onto `grid`; zero beyond the last radius.
RadialField read_profile(const std::filesystem::path& path, const GridPtr& grid);

/// Lower-case hex SHA-256 of a file.
std::string sha256_file(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace hartreelab
