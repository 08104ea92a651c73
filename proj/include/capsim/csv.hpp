#pragma once

#include <filesystem>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace capsim {

/// Shortest representation with at most 12 significant digits; "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double value);

/// Round-trip exact representation (shortest digits that parse back to the same double).
std::string format_exact(double value);

/// Parses a floating-point literal; accepts inf/+inf/-inf/.inf. Throws std::invalid_argument.
double parse_number(std::string_view text);

/// Numeric CSV: one header row, then rows of numbers. Blank lines and '#' comments are skipped.
struct NumericTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a column by name; throws std::invalid_argument when absent.
  std::size_t column(std::string_view name) const;
};

/// Throws ConfigError with the offending line on malformed input.
NumericTable parse_numeric_csv(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
/// Creates parent directories. Throws std::runtime_error naming the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Writes comma-separated rows with deterministic number formatting.
class CsvWriter {
public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void header(std::initializer_list<std::string_view> names);
  void header(const std::vector<std::string>& names);
  CsvWriter& field(double value);
  CsvWriter& field(std::string_view text);
  void end_row();

private:
  void separator();

  std::ostream& os_;
  bool first_{true};
};

}  // namespace capsim
