#include "hlab/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace hlab::rep {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

bool needs_quoting(const std::string& f) {
  return f.find_first_of(",\"\r\n") != std::string::npos;
}

std::string csv_field(const std::string& f) {
  if (!needs_quoting(f)) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_field(fields[i]);
  }
  line += "\r\n";
  return line;
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> header)
    : width_(header.size()) {
  if (header.empty()) throw std::invalid_argument("csv: empty header");
  lines_.push_back(join(header));
}

void CsvWriter::add(const std::vector<std::string>& fields) {
  if (fields.size() != width_)
    throw std::invalid_argument("csv: row width does not match header");
  lines_.push_back(join(fields));
}

std::string CsvWriter::str() const {
  std::string all;
  for (const std::string& l : lines_) all += l;
  return all;
}

void CsvWriter::write(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("csv: cannot write " + file.string());
  out << str();
}

void write_rows(const std::filesystem::path& file,
                const std::vector<Row>& rows) {
  CsvWriter csv({"tag", "params", "value", "tolerance", "status", "margin",
                 "note"});
  for (const Row& r : rows)
    csv.add({r.tag, r.params, format_double(r.value),
             format_double(r.tolerance), status_name(r.status),
             format_double(r.margin), r.note});
  csv.write(file);
}

std::string summary_json(
    const std::vector<std::pair<std::string, std::vector<Row>>>& sections) {
  nlohmann::json root;
  for (const auto& [name, rows] : sections) {
    int counts[4] = {0, 0, 0, 0};
    double worst = std::numeric_limits<double>::infinity();
    for (const Row& r : rows) {
      ++counts[static_cast<int>(r.status)];
      if (std::isfinite(r.margin)) worst = std::min(worst, r.margin);
    }
    nlohmann::json sec;
    sec["rows"] = rows.size();
    sec["pass"] = counts[static_cast<int>(Status::Pass)];
    sec["fail"] = counts[static_cast<int>(Status::Fail)];
    sec["inconclusive"] = counts[static_cast<int>(Status::Inconclusive)];
    sec["skip"] = counts[static_cast<int>(Status::Skip)];
    if (std::isfinite(worst))
      sec["worst_margin"] = worst;
    else
      sec["worst_margin"] = nullptr;
    root[name] = sec;
  }
  return root.dump(2) + "\n";
}

int exit_code(const std::vector<Row>& rows) {
  bool any_fail = false, any_inconclusive = false;
  for (const Row& r : rows) {
    any_fail |= r.status == Status::Fail;
    any_inconclusive |= r.status == Status::Inconclusive;
  }
  if (any_fail) return 2;
  if (any_inconclusive) return 3;
  return 0;
}

}  // namespace hlab::rep
