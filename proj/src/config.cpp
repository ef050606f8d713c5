#include "kspnet/config.hpp"
#include "kspnet/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace kspnet {

namespace {
std::string Trim(std::string const &s)
{
  auto const b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  auto const e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
bool ParseNumber(std::string const &s, T &out)
{
  auto const *end = s.data() + s.size();
  auto const [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}
} // namespace

Config Config::Parse(std::string const &text, std::string const &origin)
{
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<std::string> errors;
  while (std::getline(in, line)) {
    lineno++;
    auto const t = Trim(line);
    if (t.empty() || t[0] == '#') {
      continue;
    }
    auto const eq = t.find('=');
    if (eq == std::string::npos || Trim(t.substr(0, eq)).empty()) {
      errors.push_back(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
      continue;
    }
    cfg.values_[Trim(t.substr(0, eq))] = Trim(t.substr(eq + 1));
  }
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (auto const &e : errors) {
      msg += "\n  " + e;
    }
    throw Error(ErrorKind::Config, msg);
  }
  return cfg;
}

Config Config::Load(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Config, "cannot read config file '" + path.string() + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str(), path.string());
}

std::vector<long> ParseIndexList(std::string const &text)
{
  std::vector<long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    long v;
    if (!ParseNumber(Trim(item), v)) {
      throw Error(ErrorKind::Config, "'" + text + "' is not a comma-separated integer list");
    }
    out.push_back(v);
  }
  if (out.empty()) {
    throw Error(ErrorKind::Config, "empty integer list");
  }
  return out;
}

template <typename T, typename Parse>
void ConfigBinder::bind_with(std::string const &key, T &target, Parse parse, char const *type)
{
  known_.insert(key);
  if (!cfg_.has(key)) {
    return;
  }
  if (!parse(cfg_.at(key), target)) {
    errors_.push_back(key + ": '" + cfg_.at(key) + "' is not a valid " + type);
  }
}

void ConfigBinder::bind(std::string const &key, double &target)
{
  bind_with(key, target, [](std::string const &s, double &v) { return ParseNumber(s, v); }, "number");
}
void ConfigBinder::bind(std::string const &key, long &target)
{
  bind_with(key, target, [](std::string const &s, long &v) { return ParseNumber(s, v); }, "integer");
}
void ConfigBinder::bind(std::string const &key, long long &target)
{
  bind_with(key, target, [](std::string const &s, long long &v) { return ParseNumber(s, v); }, "integer");
}
void ConfigBinder::bind(std::string const &key, int &target)
{
  bind_with(key, target, [](std::string const &s, int &v) { return ParseNumber(s, v); }, "integer");
}
void ConfigBinder::bind(std::string const &key, unsigned long &target)
{
  bind_with(key, target, [](std::string const &s, unsigned long &v) { return ParseNumber(s, v); }, "unsigned integer");
}
void ConfigBinder::bind(std::string const &key, bool &target)
{
  bind_with(
    key,
    target,
    [](std::string const &s, bool &v) {
      if (s == "true" || s == "1" || s == "yes" || s == "on") {
        v = true;
        return true;
      }
      if (s == "false" || s == "0" || s == "no" || s == "off") {
        v = false;
        return true;
      }
      return false;
    },
    "boolean");
}
void ConfigBinder::bind(std::string const &key, std::string &target)
{
  bind_with(key, target, [](std::string const &s, std::string &v) { v = s; return true; }, "string");
}
void ConfigBinder::bind(std::string const &key, std::vector<long> &target)
{
  bind_with(
    key,
    target,
    [](std::string const &s, std::vector<long> &v) {
      try {
        v = ParseIndexList(s);
        return true;
      } catch (Error const &) {
        return false;
      }
    },
    "integer list");
}

void ConfigBinder::finish()
{
  for (auto const &[key, value] : cfg_.values()) {
    if (!known_.contains(key)) {
      errors_.push_back(key + ": unknown key");
    }
  }
  if (errors_.empty()) {
    return;
  }
  std::string msg = "invalid configuration (" + std::to_string(errors_.size()) + " problem" + (errors_.size() > 1 ? "s" : "") + "):";
  for (auto const &e : errors_) {
    msg += "\n  " + e;
  }
  throw Error(ErrorKind::Config, msg);
}

} // namespace kspnet
