#pragma once

// JSON views of reports; every document carries "schema": "margin-sparse/1".

#include "marginsparse/cross_validation.hpp"
#include "marginsparse/pipelines.hpp"

#include <json.hpp>

#include <string>

namespace marginsparse {

inline constexpr const char* kSchema = "margin-sparse/1";

nlohmann::json bound_json(const BoundReport& bounds);

/// Indices are 0-based; `features` repeats them 1-based as on disk.
nlohmann::json selection_json(const SelectionReport& report, const BoundReport& bounds, double wall_time_s);

nlohmann::json cv_json(const CvStats& stats);

nlohmann::json feature_frequency_json(const CvCell& cell, Index top);

nlohmann::json error_json(const std::string& kind, const std::string& message, int exit_code);

}  // namespace marginsparse
