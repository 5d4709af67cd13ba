#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace mgt::report {

// Formats a double with 17 significant digits, locale independent.
std::string num(double x);

// Deterministic JSON writer: preserves ordered_json key order and prints
// every number through num(). Output carries a trailing newline.
std::string dump_json(const nlohmann::ordered_json& j);

// Deterministic CSV: one header row, then rows of num()-formatted cells.
std::string csv(const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows,
                const std::vector<std::string>& row_labels = {});

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Minimal SVG polyline chart of sampled edge functions, one polyline per edge.
std::string svg_snapshot(const std::vector<std::pair<std::string, std::vector<double>>>& curves,
                         int width = 640, int height = 360);

}  // namespace mgt::report
