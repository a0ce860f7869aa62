#pragma once

#include <filesystem>

#include "json.hpp"
#include "rainlane/rcflane.hpp"

namespace rainlane {

nlohmann::json to_json(const RcflaneConfig& cfg);

/// Missing keys keep the values already in `base`; unknown keys are rejected.
RcflaneConfig rcflane_from_json(const nlohmann::json& j, RcflaneConfig base = {});

RcflaneConfig load_rcflane_config(const std::filesystem::path& path, RcflaneConfig base = {});

}  // namespace rainlane
