#pragma once

#include <map>
#include <string>

namespace rmg::cli {

// Preset run configurations compiled in from presets/*.ini, keyed by file stem.
const std::map<std::string, std::string>& presets();

}  // namespace rmg::cli
