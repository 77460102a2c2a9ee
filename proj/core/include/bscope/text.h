#pragma once

#include <string>
#include <string_view>

namespace bscope {

// ASCII lowercase; bytes >= 0x80 pass through untouched.
std::string to_lower(std::string_view s);

// Lowercase and collapse runs of whitespace to one space, trimmed.
std::string normalize_whitespace(std::string_view s);

// Lowercased ASCII letters and digits only ("State-of-the-Art" ->
// "stateoftheart").
std::string alnum_fold(std::string_view s);

// Decimal rendering rounded half away from zero on the exact binary value
// (0.125 -> "0.13", 0.825 stored as 0.8249999... -> "0.82").
std::string format_fixed(double value, int decimals = 2);

}  // namespace bscope
