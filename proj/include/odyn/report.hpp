#ifndef ODYN_REPORT_HPP
#define ODYN_REPORT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace odyn {

// Minimal JSON writer with %.12g numeric formatting and LF line endings.
// Keys keep insertion order so outputs are byte-stable.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array(const std::string& key = "");
  JsonWriter& end_array();
  JsonWriter& field(const std::string& key, double v);
  JsonWriter& field(const std::string& key, std::int64_t v);
  JsonWriter& field(const std::string& key, int v) { return field(key, (std::int64_t)v); }
  JsonWriter& field(const std::string& key, bool v);
  JsonWriter& field(const std::string& key, const std::string& v);
  JsonWriter& field(const std::string& key, const char* v) { return field(key, std::string(v)); }
  JsonWriter& key(const std::string& k);  // for nested containers
  JsonWriter& value(double v);
  JsonWriter& value(const std::string& v);

  std::string str() const { return out_; }
  void write(const std::string& path) const;

 private:
  void comma();
  std::string out_;
  std::vector<bool> first_;
};

std::string format_g12(double v);

// CSV with a fixed header, %.12g cells, LF endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(std::initializer_list<double> values);
  void raw_row(const std::vector<std::string>& cells);
  void write(const std::string& path) const;

 private:
  std::string out_;
  std::size_t columns_;
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

}  // namespace odyn

#endif
