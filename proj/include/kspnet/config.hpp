#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace kspnet {

/// Flat `key = value` configuration. Lines starting with '#' and blank lines
/// are ignored; later assignments override earlier ones.
class Config
{
public:
  static Config Parse(std::string const &text, std::string const &origin = "<string>");
  static Config Load(std::filesystem::path const &path);

  void set(std::string const &key, std::string const &value) { values_[key] = value; }
  bool has(std::string const &key) const { return values_.contains(key); }
  std::string const &at(std::string const &key) const { return values_.at(key); }
  std::map<std::string, std::string> const &values() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

/// Reads typed values out of a Config, collecting every problem (unknown keys,
/// unparsable values) so they can be reported together by finish().
class ConfigBinder
{
public:
  explicit ConfigBinder(Config const &cfg)
    : cfg_(cfg)
  {
  }

  void bind(std::string const &key, double &target);
  void bind(std::string const &key, long &target);
  void bind(std::string const &key, long long &target);
  void bind(std::string const &key, int &target);
  void bind(std::string const &key, unsigned long &target);
  void bind(std::string const &key, bool &target);
  void bind(std::string const &key, std::string &target);
  void bind(std::string const &key, std::vector<long> &target);

  void error(std::string const &message) { errors_.push_back(message); }

  /// Throws a config Error listing every offending key.
  void finish();

private:
  template <typename T, typename Parse>
  void bind_with(std::string const &key, T &target, Parse parse, char const *type);

  Config const &cfg_;
  std::set<std::string> known_;
  std::vector<std::string> errors_;
};

std::vector<long> ParseIndexList(std::string const &text);

} // namespace kspnet
