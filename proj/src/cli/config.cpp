#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <string>

#include "onebit/cli.hpp"
#include "onebit/errors.hpp"

namespace onebit::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool flag_given(const std::vector<std::string>& args, const std::string& key) {
  const std::string flag = "--" + key;
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

}  // namespace

ConfigEntries parse_config(std::istream& in) {
  ConfigEntries entries;
  std::set<std::string> seen;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DomainError("config line " + std::to_string(number) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key.find_first_of(" \t") != std::string::npos) {
      throw DomainError("config line " + std::to_string(number) + ": malformed key");
    }
    if (!seen.insert(key).second) {
      throw DomainError("config line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

ConfigEntries load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DomainError("cannot open config file '" + path + "'");
  }
  return parse_config(in);
}

std::vector<std::string> resolve_arguments(std::vector<std::string> args,
                                           const std::optional<std::string>& env_default) {
  std::optional<std::string> path;
  for (auto it = args.begin(); it != args.end();) {
    if (*it == "--config") {
      if (it + 1 == args.end()) throw DomainError("--config needs a path");
      path = *(it + 1);
      it = args.erase(it, it + 2);
    } else if (it->rfind("--config=", 0) == 0) {
      path = it->substr(9);
      it = args.erase(it);
    } else {
      ++it;
    }
  }
  if (!path && env_default && !env_default->empty()) {
    path = env_default;
  }
  if (!path) return args;

  const ConfigEntries entries = load_config(*path);
  std::vector<std::string> extra;
  for (const auto& [key, value] : entries) {
    if (flag_given(args, key)) continue;
    extra.push_back("--" + key);
    extra.push_back(value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace onebit::cli
