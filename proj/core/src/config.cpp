#include "fdirac/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "fdirac/errors.hpp"
#include "fdirac/expression.hpp"

namespace fdirac {

namespace {

struct Value {
  enum class Kind { Number, Bool, String, List } kind = Kind::Number;
  double number = 0.0;
  bool boolean = false;
  std::string text;
  std::vector<std::string> list;
  std::size_t line = 0;
};

using Section = std::map<std::string, Value>;
using Document = std::map<std::string, Section>;
using LineIndex = std::map<std::string, std::size_t>;

// ---- native text -------------------------------------------------------------------

class LineParser {
public:
  LineParser(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }
  bool at_end_or_comment() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(fmt::format("line {}, column {}: {}", line_, pos_ + 1, what), line_);
  }

  std::string parse_string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("unterminated escape");
        const char e = s_[pos_++];
        if (e == '"' || e == '\\') {
          out.push_back(e);
        } else if (e == 'n') {
          out.push_back('\n');
        } else if (e == 't') {
          out.push_back('\t');
        } else {
          fail(fmt::format("unknown escape '\\{}'", e));
        }
      } else {
        out.push_back(c);
      }
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  Value parse_value() {
    skip_ws();
    Value v;
    v.line = line_;
    if (pos_ >= s_.size()) fail("missing value");
    const char c = s_[pos_];
    if (c == '"') {
      v.kind = Value::Kind::String;
      v.text = parse_string();
    } else if (c == '[') {
      v.kind = Value::Kind::List;
      ++pos_;
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
      } else {
        for (;;) {
          skip_ws();
          if (pos_ >= s_.size() || s_[pos_] != '"') fail("list items must be strings");
          v.list.push_back(parse_string());
          skip_ws();
          if (pos_ < s_.size() && s_[pos_] == ',') {
            ++pos_;
            continue;
          }
          if (pos_ < s_.size() && s_[pos_] == ']') {
            ++pos_;
            break;
          }
          fail("expected ',' or ']' in list");
        }
      }
    } else if (s_.substr(pos_, 4) == "true") {
      v.kind = Value::Kind::Bool;
      v.boolean = true;
      pos_ += 4;
    } else if (s_.substr(pos_, 5) == "false") {
      v.kind = Value::Kind::Bool;
      v.boolean = false;
      pos_ += 5;
    } else {
      v.kind = Value::Kind::Number;
      const char* first = s_.data() + pos_;
      const char* last = s_.data() + s_.size();
      if (*first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, v.number);
      if (ec != std::errc() || !std::isfinite(v.number)) fail("expected a number, string, boolean or list");
      pos_ = static_cast<std::size_t>(ptr - s_.data());
    }
    if (!at_end_or_comment()) fail("unexpected text after value");
    return v;
  }

  std::string_view rest() const { return s_.substr(pos_); }
  std::size_t& pos() { return pos_; }
  std::string_view text() const { return s_; }

private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

bool is_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

Document parse_native(std::string_view text) {
  Document doc;
  Section* current = nullptr;
  std::string current_name;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    const std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;

    LineParser p(line, line_no);
    if (p.at_end_or_comment()) {
      if (end == text.size()) break;
      continue;
    }
    std::size_t& pos = p.pos();
    if (line[pos] == '[') {
      const std::size_t close = line.find(']', pos);
      if (close == std::string_view::npos) p.fail("unterminated section header");
      std::string name(line.substr(pos + 1, close - pos - 1));
      if (name.empty() || !std::all_of(name.begin(), name.end(), is_key_char)) {
        p.fail(fmt::format("invalid section name '{}'", name));
      }
      if (doc.count(name)) p.fail(fmt::format("duplicate section [{}]", name));
      pos = close + 1;
      if (!p.at_end_or_comment()) p.fail("unexpected text after section header");
      current = &doc[name];
      current_name = name;
    } else {
      const std::size_t key_start = pos;
      while (pos < line.size() && is_key_char(line[pos])) ++pos;
      const std::string key(line.substr(key_start, pos - key_start));
      if (key.empty()) p.fail("expected a key");
      p.skip_ws();
      if (pos >= line.size() || line[pos] != '=') p.fail("expected '=' after key");
      ++pos;
      if (!current) p.fail(fmt::format("key '{}' appears before any [section]", key));
      Value v = p.parse_value();
      if (current->count(key)) p.fail(fmt::format("duplicate key '{}' in [{}]", key, current_name));
      current->emplace(key, std::move(v));
    }
    if (end == text.size()) break;
  }
  return doc;
}

// ---- JSON --------------------------------------------------------------------------

Document parse_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line =
        1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
    throw ConfigError(fmt::format("line {}: invalid JSON: {}", line, e.what()), line);
  }
  if (!j.is_object()) throw ConfigError("JSON config must be an object of sections");
  Document doc;
  for (const auto& [sname, sval] : j.items()) {
    if (!sval.is_object()) throw ConfigError(fmt::format("section '{}' must be an object", sname));
    Section& sec = doc[sname];
    for (const auto& [key, val] : sval.items()) {
      Value v;
      if (val.is_number()) {
        v.kind = Value::Kind::Number;
        v.number = val.get<double>();
      } else if (val.is_boolean()) {
        v.kind = Value::Kind::Bool;
        v.boolean = val.get<bool>();
      } else if (val.is_string()) {
        v.kind = Value::Kind::String;
        v.text = val.get<std::string>();
      } else if (val.is_array()) {
        v.kind = Value::Kind::List;
        for (const auto& item : val) {
          if (!item.is_string()) {
            throw ConfigError(fmt::format("{}.{}: list items must be strings", sname, key));
          }
          v.list.push_back(item.get<std::string>());
        }
      } else {
        throw ConfigError(fmt::format("{}.{}: unsupported value type", sname, key));
      }
      sec.emplace(key, std::move(v));
    }
  }
  return doc;
}

// ---- document -> config ------------------------------------------------------------

[[noreturn]] void value_error(const std::string& where, const Value& v, const std::string& what) {
  if (v.line > 0) throw ConfigError(fmt::format("line {}: {}: {}", v.line, where, what), v.line);
  throw ConfigError(fmt::format("{}: {}", where, what));
}

double as_number(const std::string& where, const Value& v) {
  if (v.kind != Value::Kind::Number) value_error(where, v, "expected a number");
  return v.number;
}

long long as_integer(const std::string& where, const Value& v, long long lo, long long hi) {
  const double d = as_number(where, v);
  if (d != std::floor(d) || d < static_cast<double>(lo) || d > static_cast<double>(hi)) {
    value_error(where, v, fmt::format("expected an integer in [{}, {}]", lo, hi));
  }
  return static_cast<long long>(d);
}

std::string as_string(const std::string& where, const Value& v) {
  if (v.kind != Value::Kind::String) value_error(where, v, "expected a string");
  return v.text;
}

bool as_bool(const std::string& where, const Value& v) {
  if (v.kind != Value::Kind::Bool) value_error(where, v, "expected true or false");
  return v.boolean;
}

ExperimentConfig from_document(const Document& doc, LineIndex& lines) {
  ExperimentConfig c;
  constexpr long long int_max = 1'000'000'000;
  for (const auto& [sname, sec] : doc) {
    for (const auto& [key, v] : sec) {
      const std::string where = sname + "." + key;
      lines[where] = v.line;
      if (sname == "model") {
        if (key == "alpha") c.model.alpha = as_number(where, v);
        else if (key == "theta") c.model.theta = as_number(where, v);
        else if (key == "beta") c.model.beta = as_number(where, v);
        else if (key == "p") c.model.p = as_string(where, v);
        else if (key == "r") c.model.r = as_string(where, v);
        else if (key == "m11") c.model.m11 = as_string(where, v);
        else if (key == "m12") c.model.m12 = as_string(where, v);
        else if (key == "m21") c.model.m21 = as_string(where, v);
        else if (key == "m22") c.model.m22 = as_string(where, v);
        else value_error(where, v, "unknown key");
      } else if (sname == "solver") {
        if (key == "grid_points") c.solver.grid_points = static_cast<std::size_t>(as_integer(where, v, 3, int_max));
        else if (key == "picard_iterations") c.solver.picard_iterations = static_cast<int>(as_integer(where, v, 1, 10000));
        else value_error(where, v, "unknown key");
      } else if (sname == "spectrum") {
        if (key == "n_lo") c.spectrum.n_lo = static_cast<int>(as_integer(where, v, -int_max, int_max));
        else if (key == "n_hi") c.spectrum.n_hi = static_cast<int>(as_integer(where, v, -int_max, int_max));
        else value_error(where, v, "unknown key");
      } else if (sname == "inverse") {
        if (key == "n_max") c.inverse.n_max = static_cast<int>(as_integer(where, v, -int_max, int_max));
        else if (key == "known") c.inverse.known = as_string(where, v);
        else if (key == "smoothing") c.inverse.smoothing = static_cast<std::size_t>(as_integer(where, v, 0, int_max));
        else if (key == "extrapolation") c.inverse.extrapolation = as_string(where, v);
        else if (key == "transfer") c.inverse.transfer = as_string(where, v);
        else if (key == "compare_truth") c.inverse.compare_truth = as_bool(where, v);
        else value_error(where, v, "unknown key");
      } else if (sname == "output") {
        if (key == "directory") {
          c.output.directory = as_string(where, v);
        } else if (key == "formats") {
          if (v.kind != Value::Kind::List) value_error(where, v, "expected a list of strings");
          c.output.formats = v.list;
        } else {
          value_error(where, v, "unknown key");
        }
      } else {
        if (v.line > 0) {
          throw ConfigError(fmt::format("line {}: unknown section [{}]", v.line, sname), v.line);
        }
        throw ConfigError(fmt::format("unknown section '{}'", sname));
      }
    }
  }
  return c;
}

void validate_impl(const ExperimentConfig& c, const LineIndex* lines) {
  auto fail = [lines](const std::string& where, const std::string& what) {
    std::size_t line = 0;
    if (lines) {
      auto it = lines->find(where);
      if (it != lines->end()) line = it->second;
    }
    if (line > 0) throw ConfigError(fmt::format("line {}: {}: {}", line, where, what), line);
    throw ConfigError(fmt::format("{}: {}", where, what));
  };

  if (!(c.model.alpha > 0.0 && c.model.alpha <= 1.0)) {
    fail("model.alpha", fmt::format("must lie in (0, 1], got {}", c.model.alpha));
  }
  if (!std::isfinite(c.model.theta)) fail("model.theta", "must be finite");
  if (!std::isfinite(c.model.beta)) fail("model.beta", "must be finite");
  const std::pair<const char*, const std::string*> exprs[] = {
      {"model.p", &c.model.p},     {"model.r", &c.model.r},     {"model.m11", &c.model.m11},
      {"model.m12", &c.model.m12}, {"model.m21", &c.model.m21}, {"model.m22", &c.model.m22},
  };
  for (const auto& [where, src] : exprs) {
    try {
      const Expression e = Expression::parse(*src);
      if ((where == std::string("model.p") || where == std::string("model.r")) && e.uses_t()) {
        fail(where, "potentials may only depend on x");
      }
    } catch (const ParseError& e) {
      fail(where, fmt::format("{} (offset {})", e.what(), e.offset()));
    }
  }
  if (c.solver.grid_points < 3) fail("solver.grid_points", "must be at least 3");
  if (c.solver.picard_iterations < 1) fail("solver.picard_iterations", "must be positive");
  if (c.spectrum.n_lo < 1) fail("spectrum.n_lo", "must be at least 1");
  if (c.spectrum.n_hi < c.spectrum.n_lo) fail("spectrum.n_hi", "must not be below n_lo");
  if (c.inverse.n_max < 1) fail("inverse.n_max", "must be at least 1");
  if (c.inverse.known != "L" && c.inverse.known != "pr") {
    fail("inverse.known", fmt::format("must be \"L\" or \"pr\", got \"{}\"", c.inverse.known));
  }
  if (c.inverse.extrapolation != "richardson" && c.inverse.extrapolation != "largest") {
    fail("inverse.extrapolation", "must be \"richardson\" or \"largest\"");
  }
  if (c.inverse.transfer != "interpolate" && c.inverse.transfer != "nearest") {
    fail("inverse.transfer", "must be \"interpolate\" or \"nearest\"");
  }
  for (const auto& f : c.output.formats) {
    if (f != "json" && f != "csv") fail("output.formats", fmt::format("unknown format \"{}\"", f));
  }
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out.push_back('\\');
      out.push_back(c);
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\t') {
      out += "\\t";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string number(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

bool ExperimentConfig::wants(std::string_view format) const {
  return std::find(output.formats.begin(), output.formats.end(), format) != output.formats.end();
}

ExperimentConfig parse_config(std::string_view text) {
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  const bool json = first != std::string_view::npos && text[first] == '{';
  const Document doc = json ? parse_json(text) : parse_native(text);
  LineIndex lines;
  ExperimentConfig c = from_document(doc, lines);
  validate_impl(c, &lines);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()), e.line());
  }
}

void validate_config(const ExperimentConfig& config) { validate_impl(config, nullptr); }

std::string serialize_config(const ExperimentConfig& c) {
  std::string out;
  auto kv = [&out](const char* key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  out += "[model]\n";
  kv("alpha", number(c.model.alpha));
  kv("theta", number(c.model.theta));
  kv("beta", number(c.model.beta));
  kv("p", quote(c.model.p));
  kv("r", quote(c.model.r));
  kv("m11", quote(c.model.m11));
  kv("m12", quote(c.model.m12));
  kv("m21", quote(c.model.m21));
  kv("m22", quote(c.model.m22));
  out += "\n[solver]\n";
  kv("grid_points", std::to_string(c.solver.grid_points));
  kv("picard_iterations", std::to_string(c.solver.picard_iterations));
  out += "\n[spectrum]\n";
  kv("n_lo", std::to_string(c.spectrum.n_lo));
  kv("n_hi", std::to_string(c.spectrum.n_hi));
  out += "\n[inverse]\n";
  kv("n_max", std::to_string(c.inverse.n_max));
  kv("known", quote(c.inverse.known));
  kv("smoothing", std::to_string(c.inverse.smoothing));
  kv("extrapolation", quote(c.inverse.extrapolation));
  kv("transfer", quote(c.inverse.transfer));
  kv("compare_truth", c.inverse.compare_truth ? "true" : "false");
  out += "\n[output]\n";
  kv("directory", quote(c.output.directory));
  std::string formats = "[";
  for (std::size_t i = 0; i < c.output.formats.size(); ++i) {
    if (i) formats += ", ";
    formats += quote(c.output.formats[i]);
  }
  formats += "]";
  kv("formats", formats);
  return out;
}

}  // namespace fdirac
