#pragma once

// nlohmann-based helpers shared by the document readers. Private to the library.

#include "harmflow/error.hpp"
#include "harmflow/filter_design.hpp"

#include <json.hpp>

#include <initializer_list>
#include <string>
#include <string_view>

namespace harmflow::detail {

using json = nlohmann::json;

inline std::string join_path(const std::string& parent, std::string_view key) {
    return parent.empty() ? std::string(key) : parent + "." + std::string(key);
}

// Parses text, mapping syntax errors to ValidationError with line/column.
json parse_document(std::string_view text);

void require_object(const json& j, const std::string& path);
void reject_unknown_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed);
double require_number(const json& j, const std::string& path, std::string_view key);
double require_positive(const json& j, const std::string& path, std::string_view key);
int require_integer(const json& j, const std::string& path, std::string_view key);
std::string require_string(const json& j, const std::string& path, std::string_view key);

json bank_to_json(const FilterBank& bank);
FilterBank bank_from_json(const json& j, const std::string& path);

}  // namespace harmflow::detail
