#pragma once

#include <string>
#include <string_view>

namespace bscope {

// Porter (1980) suffix stripping over lowercase ASCII words. Words of one or
// two letters and words containing non-letters are returned unchanged.
std::string porter_stem(std::string_view word);

// Token normalization used for cue matching: alnum_fold then porter_stem.
// Empty for tokens with no letters or digits.
std::string stem(std::string_view token);

}  // namespace bscope
