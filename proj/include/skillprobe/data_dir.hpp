#pragma once

#include <filesystem>

namespace skillprobe {

// Directory holding the bundled lexicons, wordlists, and fixtures.
// The SKILLPROBE_DATA environment variable overrides the compiled-in default.
std::filesystem::path default_data_dir();

}  // namespace skillprobe
