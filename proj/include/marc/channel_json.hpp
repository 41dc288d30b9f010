#pragma once

#include "marc/channel.hpp"

#include <json.hpp>

#include <string>

namespace marc {

// Complex numbers are written as [re, im]. Field names: h_r, h_d, h, P, P_r, N0.
nlohmann::json to_json(const ChannelRealization& c);

/// Throws ValidationError on missing fields, wrong shapes or invalid values.
ChannelRealization realization_from_json(const nlohmann::json& j);

std::string dump_realization(const ChannelRealization& c, int indent = 2);
ChannelRealization read_realization_file(const std::string& path);
void write_realization_file(const ChannelRealization& c, const std::string& path);

} // namespace marc
