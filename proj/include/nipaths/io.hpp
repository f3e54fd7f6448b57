#pragma once

#include <string>

#include "json.hpp"
#include "nipaths/model.hpp"
#include "nipaths/tiling.hpp"

namespace nipaths::io {

using json = nlohmann::json;

// Shortest text that round-trips a double: 17 significant digits.
std::string fmt17(double v);

// {"n": int, "k": [int], "l": [int], "alpha": [float], "beta": [float]};
// extra keys are ignored. Malformed input throws InvalidParams.
ModelParams model_from_json(const json& j);
json model_to_json(const ModelParams& p);

json config_to_json(const PathConfig& c);
PathConfig config_from_json(const json& j);

// {"n": N, "k": [...], "height": H, "lozenges": [{"type": "a|b|c", "i": int, "j": int}, ...]}
json tiling_to_json(const Tiling& t);
Tiling tiling_from_json(const json& j);

json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
// Writes to path, or to stdout when path is empty or "-".
void write_text(const std::string& path, const std::string& text);

}  // namespace nipaths::io
