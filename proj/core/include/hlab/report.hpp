#pragma once

// Result emission: RFC-4180 CSV (CRLF line ends, header row, '.' decimal,
// UTF-8) plus a JSON run summary.  Rows are deterministic for a fixed
// config and seed — no timestamps or timings in the data files.

#include <filesystem>
#include <string>
#include <vector>

#include "hlab/status.hpp"

namespace hlab::rep {

struct Row {
  std::string tag;     // which statement this row verifies
  std::string params;  // "p=2;kappa=0;h=0.0078125"
  double value = 0.0;
  double tolerance = 0.0;
  Status status = Status::Inconclusive;
  double margin = 0.0;  // headroom inside the tolerance (NaN: not applicable)
  std::string note;
};

// shortest round-trip decimal form (locale-independent)
[[nodiscard]] std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add(const std::vector<std::string>& fields);
  void write(const std::filesystem::path& file) const;
  [[nodiscard]] std::string str() const;

 private:
  std::size_t width_;
  std::vector<std::string> lines_;
};

void write_rows(const std::filesystem::path& file, const std::vector<Row>& rows);

// one summary object per subcommand: pass counts and the worst margin
[[nodiscard]] std::string summary_json(
    const std::vector<std::pair<std::string, std::vector<Row>>>& sections);

// 0 all PASS (Skips allowed), 2 any FAIL, 3 inconclusive-only
[[nodiscard]] int exit_code(const std::vector<Row>& rows);

}  // namespace hlab::rep
