#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace polelm {

// Flat "section.key = value" config file. Lines starting with '#' and blank
// lines are ignored.
class Config {
 public:
  Config() = default;

  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  // get_* throw std::invalid_argument naming the key when it is absent
  // (unless a fallback overload is used) or unparseable.
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace polelm
