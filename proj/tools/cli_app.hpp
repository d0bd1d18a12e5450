#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace qlat::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kArtifactVersion = "qlat 1.0.0";

/// Runs one command line (without the program name). Data go to `out`,
/// diagnostics to `err`. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "3", "1,4,9", "0..12", "2..4,7" or "" (empty). Every value must lie in
/// [lo, hi]; throws std::invalid_argument otherwise.
std::vector<int> parse_index_list(const std::string& text, int lo, int hi);

/// "4x4", "2x2x2", "12".
std::vector<int> parse_extents(const std::string& text);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Path of the manifest written next to an output file.
std::filesystem::path manifest_path_for(const std::filesystem::path& out);

}  // namespace qlat::cli
