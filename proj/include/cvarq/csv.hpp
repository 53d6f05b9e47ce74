#ifndef CVARQ_CSV_HPP
#define CVARQ_CSV_HPP

// Minimal CSV emission: one comment line with run metadata, a header row,
// then data rows. Numbers are printed with %.10g.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvarq {

inline constexpr const char* kVersion = "1.0.0";

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

class CsvWriter {
 public:
  /// Writes the comment line. samples/seed are omitted for deterministic
  /// commands.
  CsvWriter(std::ostream& out, std::vector<std::string> columns,
            std::optional<std::uint64_t> seed = std::nullopt,
            std::optional<std::size_t> samples = std::nullopt)
      : out_(out), columns_(std::move(columns)) {
    out_ << "# version=" << kVersion;
    if (seed) out_ << ",seed=" << *seed;
    if (samples) out_ << ",samples=" << *samples;
    out_ << '\n';
    write_fields(columns_);
  }

  class Row {
   public:
    explicit Row(CsvWriter& w) : w_(w) {}
    Row& operator<<(double v) { return add(format_number(v)); }
    Row& operator<<(int v) { return add(std::to_string(v)); }
    Row& operator<<(long v) { return add(std::to_string(v)); }
    Row& operator<<(unsigned long v) { return add(std::to_string(v)); }
    Row& operator<<(unsigned long long v) { return add(std::to_string(v)); }
    Row& operator<<(bool v) { return add(v ? "1" : "0"); }
    Row& operator<<(const std::string& v) { return add(v); }
    Row& operator<<(const char* v) { return add(v); }
    ~Row() noexcept(false) {
      if (fields_.size() != w_.columns_.size()) {
        throw std::logic_error("CsvWriter: row width does not match header");
      }
      w_.write_fields(fields_);
    }

   private:
    Row& add(std::string s) {
      fields_.push_back(std::move(s));
      return *this;
    }
    CsvWriter& w_;
    std::vector<std::string> fields_;
  };

  Row row() { return Row(*this); }

 private:
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + '"';
  }
  void write_fields(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << quote(fields[i]);
    }
    out_ << '\n';
  }

  std::ostream& out_;
  std::vector<std::string> columns_;
};

}  // namespace cvarq

#endif  // CVARQ_CSV_HPP
