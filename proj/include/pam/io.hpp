#pragma once

#include <json.hpp>
#include <string>

#include "pam/map.hpp"

namespace pam {

using Json = nlohmann::json;

Json rat_to_json(const Rat& r);
Rat rat_from_json(const Json& j);
Json rats_to_json(const std::vector<Rat>& v);
std::vector<Rat> rats_from_json(const Json& j);

// {"breakpoints": [...], "values": [...]}; the loader rejects anything that
// is not already canonical.
Json map_to_json(const PAMap& f);
PAMap map_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

PAMap load_map(const std::string& path);
void save_map(const std::string& path, const PAMap& f);

}  // namespace pam
