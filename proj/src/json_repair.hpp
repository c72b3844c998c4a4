#pragma once

#include <string>
#include <string_view>

namespace parsemble {

// Recovers the first top-level JSON object from raw model output: strips
// surrounding code fences and prose, removes trailing commas. Throws
// BackendError(kExtractionFailed) carrying the raw text when no object can
// be recovered.
std::string repair_json(std::string_view raw);

}  // namespace parsemble
