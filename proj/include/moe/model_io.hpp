#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "moe/model.hpp"

namespace moe {

nlohmann::json to_json(const MixingMeasure& G);
MixingMeasure measure_from_json(const nlohmann::json& j);

/// Header `x1,...,xd,y`; labels written one-based.
std::string dataset_to_csv(const Dataset& D);
Dataset dataset_from_csv(const std::string& text, int K);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

} // namespace moe
