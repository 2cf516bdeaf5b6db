#pragma once

// Command-line surface: generate, corpus, evaluate, validate, render-frames.

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace shipcast {

/// Stable exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFindings = 1,
  kExitInput = 2,
  kExitAlignment = 3,
};

/// Flat key/value settings. Sources, lowest precedence first: the config
/// file, FF_<KEY> environment variables, command-line flags.
class Config {
 public:
  /// Parses `key = value` lines; `[section]` headers prefix keys with
  /// `section.`; `#` starts a comment; values may be double-quoted.
  /// Relative paths are resolved against the file's directory.
  static Config from_text(std::string_view text, const std::filesystem::path& base_dir = {});
  static Config load(const std::filesystem::path& path);

  /// FF_<KEY> with dots turned into underscores and letters uppercased.
  void apply_env();
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  [[nodiscard]] std::optional<std::string> get(const std::string& key) const;
  [[nodiscard]] std::string get_or(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] double number(const std::string& key, double fallback) const;
  /// Resolved path for `key`, or `fallback` relative to the working directory.
  [[nodiscard]] std::filesystem::path path(const std::string& key, const std::filesystem::path& fallback) const;
  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }

  /// Keys whose values are filesystem paths.
  static bool is_path_key(std::string_view key);

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_;
};

/// Runs one invocation; returns the process exit code. Logs go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shipcast
