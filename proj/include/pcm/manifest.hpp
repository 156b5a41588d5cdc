#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcm/types.hpp"

namespace pcm {

using Json = nlohmann::ordered_json;

// One manifest record describing how `sample` was produced. label_weights
// maps class names to weights (all classes, dense).
Json sample_record(const MixedSample& sample, const std::vector<std::string>& classes, const std::string& output_file,
                   std::uint64_t seed);

}  // namespace pcm
