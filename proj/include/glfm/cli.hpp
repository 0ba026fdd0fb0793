#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace glfm::cli {

// sysexits-style codes
inline constexpr int kOk = 0;
inline constexpr int kFatal = 1;
inline constexpr int kPartial = 2;
inline constexpr int kUsage = 64;
inline constexpr int kDataErr = 65;
inline constexpr int kNoInput = 66;

// Entry point of the `glfm` tool: simulate | fit | refine | evaluate | reproduce.
// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace glfm::cli
