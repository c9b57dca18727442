#include "hartreelab/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <sstream>

#include "hartreelab/errors.hpp"

namespace hartreelab {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw DomainError("not a number: '" + s + "'");
  return v;
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), width_(header.size()) {
  if (!out_) throw DomainError("cannot write " + path.string());
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw DomainError("CSV row width does not match the header");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out_ << ',';
    out_ << quote(cells[k]);
  }
  out_ << "\r\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_real(v));
  row(cells);
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> cur;
  std::string cell;
  bool quoted = false, any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          cell += '"';
          in.get(c);
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') quoted = true;
    else if (c == ',') {
      cur.push_back(cell);
      cell.clear();
    } else if (c == '\n') {
      cur.push_back(cell);
      cell.clear();
      rows.push_back(std::move(cur));
      cur.clear();
      any = false;
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (any) {
    cur.push_back(cell);
    rows.push_back(std::move(cur));
  }
  return rows;
}

void write_fields(const std::filesystem::path& path, const std::vector<double>& times,
                  const std::vector<RadialField>& fields) {
  if (times.size() != fields.size()) throw DomainError("times and fields differ in length");
  CsvWriter w(path, {"t", "j", "r", "re", "im"});
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const auto& u = fields[k];
    for (int j = 0; j < u.size(); ++j)
      w.row({format_real(times[k]), std::to_string(j), format_real(u.grid->nodes(j)),
             format_real(u.values(j).real()), format_real(u.values(j).imag())});
  }
}

void read_fields(const std::filesystem::path& path, const GridPtr& grid, std::vector<double>& times,
                 std::vector<RadialField>& fields) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows[0].size() != 5 || rows[0][0] != "t")
    throw DomainError(path.string() + " is not a field snapshot file");
  times.clear();
  fields.clear();
  const int J = grid->size();
  if ((rows.size() - 1) % J != 0) throw DomainError(path.string() + " does not match the grid size");
  for (std::size_t k = 1; k < rows.size(); k += J) {
    RadialField u(grid);
    for (int j = 0; j < J; ++j) {
      const auto& row = rows[k + j];
      if (row.size() != 5) throw DomainError("malformed snapshot row");
      const double r = parse_double(row[2]);
      if (std::abs(r - grid->nodes(j)) > 1e-12 * grid->nodes(j)) throw DomainError("snapshot radii do not match the grid");
      u.values(j) = {parse_double(row[3]), parse_double(row[4])};
    }
    times.push_back(parse_double(rows[k][0]));
    fields.push_back(std::move(u));
  }
}

void write_profile(const std::filesystem::path& path, const RadialField& u) {
  CsvWriter w(path, {"r", "re", "im"});
  for (int j = 0; j < u.size(); ++j) w.row({u.grid->nodes(j), u.values(j).real(), u.values(j).imag()});
}

RadialField read_profile(const std::filesystem::path& path, const GridPtr& grid) {
  const auto rows = read_csv(path);
  if (rows.size() < 3 || rows[0].size() != 3 || rows[0][0] != "r")
    throw DomainError(path.string() + " is not a profile file");
  std::vector<double> r;
  std::vector<std::complex<double>> v;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].size() != 3) throw DomainError("malformed profile row " + std::to_string(k + 1));
    r.push_back(parse_double(rows[k][0]));
    v.emplace_back(parse_double(rows[k][1]), parse_double(rows[k][2]));
    if (r.size() > 1 && !(r.back() > r[r.size() - 2])) throw DomainError("profile radii must increase");
  }
  return sample(grid, [&](double x) -> std::complex<double> {
    if (x <= r.front()) return v.front();
    if (x > r.back()) return 0.0;
    const auto hi = static_cast<std::size_t>(std::upper_bound(r.begin(), r.end(), x) - r.begin());
    if (hi == r.size()) return v.back();
    const double s = (x - r[hi - 1]) / (r[hi] - r[hi - 1]);
    return (1.0 - s) * v[hi - 1] + s * v[hi];
  });
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 unavailable");
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  static const char* digits = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    hex += digits[md[i] >> 4];
    hex += digits[md[i] & 15];
  }
  return hex;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path.string());
  out << text;
}

}  // namespace hartreelab
