#include "fdirac/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "fdirac/errors.hpp"

namespace fdirac {

namespace {

void dump_into(const Json& v, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner;
        out += Json(it.key()).dump();
        out += ": ";
        dump_into(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool scalars = true;
      for (const auto& item : v) scalars = scalars && !item.is_structured();
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) out += ", ";
          dump_into(v[i], out, indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        dump_into(v[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  return fmt::format("{:.17g}", v);
}

std::string dump_json(const Json& value) {
  std::string out;
  dump_into(value, out, 0);
  out += "\n";
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write '{}'", tmp.string()));
    out << text;
    if (!out) throw Error(fmt::format("write to '{}' failed", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json nodal_dataset_to_json(const NodalDataset& data) {
  Json nodes = Json::object();
  for (const auto& [n, xs] : data.nodes) {
    Json arr = Json::array();
    for (double x : xs) arr.push_back(x);
    nodes[std::to_string(n)] = std::move(arr);
  }
  Json out = Json::object();
  out["alpha"] = data.alpha.value();
  out["nodes"] = std::move(nodes);
  return out;
}

NodalDataset nodal_dataset_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("nodal dataset is not valid JSON: {}", e.what()));
  }
  if (!j.is_object() || !j.contains("alpha") || !j.contains("nodes")) {
    throw ConfigError("nodal dataset must be an object with \"alpha\" and \"nodes\"");
  }
  if (!j["alpha"].is_number()) throw ConfigError("nodal dataset: \"alpha\" must be a number");
  if (!j["nodes"].is_object()) throw ConfigError("nodal dataset: \"nodes\" must be an object");
  NodalDataset data;
  try {
    data.alpha = AlphaOrder(j["alpha"].get<double>());
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("nodal dataset: {}", e.what()));
  }
  for (const auto& [key, arr] : j["nodes"].items()) {
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("nodal dataset: index \"{}\" is not an integer", key));
    }
    if (!arr.is_array()) throw ConfigError(fmt::format("nodal dataset: index {} must map to a list", n));
    std::vector<double> xs;
    for (const auto& v : arr) {
      if (!v.is_number()) throw ConfigError(fmt::format("nodal dataset: index {} has a non-number", n));
      xs.push_back(v.get<double>());
    }
    if (!data.nodes.emplace(n, std::move(xs)).second) {
      throw ConfigError(fmt::format("nodal dataset: index {} appears twice", n));
    }
  }
  try {
    data.validate();
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("nodal dataset: {}", e.what()));
  }
  return data;
}

void write_nodal_dataset(const std::filesystem::path& path, const NodalDataset& data) {
  write_text(path, dump_json(nodal_dataset_to_json(data)));
}

NodalDataset read_nodal_dataset(const std::filesystem::path& path) {
  return nodal_dataset_from_json(read_text(path));
}

CsvTable::CsvTable(std::vector<std::string> header) : width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ",";
    text_ += header[i];
  }
  text_ += "\n";
}

CsvTable& CsvTable::row(const std::vector<double>& values) {
  if (values.size() != width_) {
    throw Error(fmt::format("CSV row has {} cells, header has {}", values.size(), width_));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ",";
    const double v = values[i];
    text_ += std::isfinite(v) ? format_double(v) : std::string("nan");
  }
  text_ += "\n";
  return *this;
}

std::string CsvTable::str() const { return text_; }

std::string gridfn_csv(const GridFn& f) {
  CsvTable t({"x", "s", "value"});
  const SGrid& g = f.grid();
  for (std::size_t k = 0; k < f.size(); ++k) t.row({g.x(k), g.s(k), f[k]});
  return t.str();
}

Json gridfn_values(const GridFn& f) {
  Json arr = Json::array();
  for (double v : f.values()) arr.push_back(v);
  return arr;
}

}  // namespace fdirac
