#pragma once
// Dataset and configuration plumbing: flat key=value config files, CSV and
// JSON dataset serialization with stable formatting, and file helpers.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace femtonet {
namespace io {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ConfigMap = std::map<std::string, std::string>;

// Flat `key = value` lines; '#' starts a comment; blank lines ignored.
// Duplicate keys: last one wins. Malformed lines raise ConfigError with the
// offending content.
ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_file(const std::string& path);

// Typed lookups with defaults; parse failures raise ConfigError naming the
// key.
double config_double(const ConfigMap& cfg, const std::string& key,
                     double fallback);
int config_int(const ConfigMap& cfg, const std::string& key, int fallback);
std::string config_string(const ConfigMap& cfg, const std::string& key,
                          const std::string& fallback);
bool config_has(const ConfigMap& cfg, const std::string& key);

// Numeric dataset: named columns, double cells.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::initializer_list<double> cells);
};

// Stable shortest-round-trip formatting used for every serialized number.
std::string format_double(double v);

std::string to_csv(const Table& t);
// JSON array of {column: value} records.
std::string to_json_records(const Table& t);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
void ensure_directory(const std::string& path);

}  // namespace io
}  // namespace femtonet
