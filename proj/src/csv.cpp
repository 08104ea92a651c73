#include "capsim/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "capsim/errors.hpp"

namespace capsim {

namespace {

std::string non_finite(double value) {
  if (std::isnan(value)) return "nan";
  return value > 0 ? "inf" : "-inf";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string format_number(double value) {
  if (!std::isfinite(value)) return non_finite(value);
  if (value == 0.0) return "0";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 12);
  return std::string(buf, r.ptr);
}

std::string format_exact(double value) {
  if (!std::isfinite(value)) return non_finite(value);
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, r.ptr);
}

double parse_number(std::string_view text) {
  text = trim(text);
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (body == "inf" || body == ".inf" || body == "Inf" || body == ".Inf" || body == "infinity") {
    return negative ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto r = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::size_t NumericTable::column(std::string_view name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::invalid_argument("missing CSV column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header.begin());
}

NumericTable parse_numeric_csv(const std::string& text) {
  NumericTable table;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto cells = split(line, ',');
    if (table.header.empty()) {
      for (auto c : cells) table.header.emplace_back(c);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw ConfigError("expected " + std::to_string(table.header.size()) + " columns, found " +
                            std::to_string(cells.size()),
                        line_no);
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) {
      try {
        row.push_back(parse_number(c));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), line_no);
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw ConfigError("empty CSV: missing header", 0);
  return table;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void CsvWriter::separator() {
  if (!first_) os_ << ',';
  first_ = false;
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
  for (auto n : names) field(n);
  end_row();
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (const auto& n : names) field(std::string_view(n));
  end_row();
}

CsvWriter& CsvWriter::field(double value) {
  separator();
  os_ << format_number(value);
  return *this;
}

CsvWriter& CsvWriter::field(std::string_view text) {
  separator();
  if (text.find_first_of(",\"\n") != std::string_view::npos) {
    os_ << '"';
    for (char ch : text) {
      if (ch == '"') os_ << '"';
      os_ << ch;
    }
    os_ << '"';
  } else {
    os_ << text;
  }
  return *this;
}

void CsvWriter::end_row() {
  os_ << '\n';
  first_ = true;
}

}  // namespace capsim
