#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "scatterkit/scattering.hpp"

namespace scatterkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitValidation = 2;

/// Everything a subcommand may need; filled from an optional key=value
/// config file, then from flags.
struct RunConfig {
  ScatterConfig scatter;
  std::size_t k = 9;
  std::size_t workers = 1;
  int scale = 2;
  bool single_precision = false;
  std::filesystem::path corpus_dir;
  std::filesystem::path output_dir;
  std::vector<std::size_t> channels;
  std::string gallery;

  /// Throws ParameterError for anything ScatterConfig rejects, k = 0 or scale < 1.
  void validate() const;
  std::string canonical() const;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

/// Parses "64" or "64x48".
void parse_size(const std::string& text, std::size_t& rows, std::size_t& cols);

/// Applies key=value lines (blank lines and '#' comments ignored).
void apply_config_file(const std::filesystem::path& path, RunConfig& config);

/// Entry point shared by the scatterkit binary and the tests. args excludes
/// the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scatterkit::cli
