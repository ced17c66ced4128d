#pragma once

// File formats: JSON with 17-significant-digit numbers, nodal datasets, CSV tables.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdirac/conformable.hpp"
#include "fdirac/inverse.hpp"

namespace fdirac {

using Json = nlohmann::ordered_json;

/// Pretty-printed JSON (2-space indent, keys in insertion order, doubles as %.17g,
/// non-finite doubles as null). Output is a pure function of the value.
std::string dump_json(const Json& value);

/// Writes text atomically enough for batch use: to a temporary sibling, then renamed.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// {"alpha": a, "nodes": {"<n>": [x ascending]}}, indices in increasing numeric order.
Json nodal_dataset_to_json(const NodalDataset& data);
/// Parses and validates; throws ConfigError on malformed input.
NodalDataset nodal_dataset_from_json(const std::string& text);
void write_nodal_dataset(const std::filesystem::path& path, const NodalDataset& data);
NodalDataset read_nodal_dataset(const std::filesystem::path& path);

/// Plain CSV writer; doubles are formatted with 17 significant digits.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& row(const std::vector<double>& values);
  std::string str() const;

private:
  std::size_t width_;
  std::string text_;
};

/// Columns x, s, value.
std::string gridfn_csv(const GridFn& f);
/// Values at the grid points as a JSON array.
Json gridfn_values(const GridFn& f);

std::string format_double(double v);

}  // namespace fdirac
