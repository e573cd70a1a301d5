#pragma once

#include <string_view>

// Contents of the files under data/, compiled in at build time.
namespace stylo::data {

extern const std::string_view kAbbreviations;
extern const std::string_view kPrefixes;
extern const std::string_view kPrefixStoplist;
extern const std::string_view kRelativeMarkers;

}  // namespace stylo::data
