#include "mvsvm/config.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

namespace mvsvm {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error("config: " + key + " expects an integer, got '" + value + "'");
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used == value.size() && value[0] != '-') return v;
  } catch (const std::exception&) {
  }
  throw Error("config: " + key + " expects a non-negative integer, got '" +
              value + "'");
}

double parse_float(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error("config: " + key + " expects a number, got '" + value + "'");
}

}  // namespace

void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value) {
  if (key == "task") config.task = task_from_name(value);
  else if (key == "views") config.views = parse_int(key, value);
  else if (key == "reg") config.reg = reg_from_name(value);
  else if (key == "C") config.C = parse_float(key, value);
  else if (key == "meta_reg") config.meta_reg = reg_from_name(value);
  else if (key == "meta_C") config.meta_C = parse_float(key, value);
  else if (key == "k_folds") config.k_folds = parse_int(key, value);
  else if (key == "min_df") config.min_df = parse_int(key, value);
  else if (key == "tol") config.tol = parse_float(key, value);
  else if (key == "max_iter") config.max_iter = parse_int(key, value);
  else if (key == "seed") config.seed = parse_u64(key, value);
  else if (key == "mode") config.mode = gate_mode_from_name(value);
  else if (key == "external_name") config.external_name = value;
  else if (key == "train") config.train = value;
  else if (key == "dev") config.dev = value;
  else if (key == "test") config.test = value;
  else if (key == "external_train") config.external_train = value;
  else if (key == "external_dev") config.external_dev = value;
  else if (key == "external_test") config.external_test = value;
  else if (key == "emoji_map") config.emoji_map = value;
  else if (key == "emoticons") config.emoticons = value;
  else if (key == "unigrams") config.unigrams = value;
  else if (key == "bigrams") config.bigrams = value;
  else if (key == "model_dir") config.model_dir = value;
  else throw Error("config: unknown key '" + key + "'");
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config: " + path);

  RunConfig config;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw Error(path + ": line " + std::to_string(lineno) +
                  ": expected key = value, got '" + stripped + "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw Error(path + ": line " + std::to_string(lineno) + ": empty key");
    try {
      apply_config_entry(config, key, value);
    } catch (const Error& e) {
      throw Error(path + ": line " + std::to_string(lineno) + ": " +
                  e.what());
    }
  }
  return config;
}

void RunConfig::validate() const {
  if (views < 0 || views > 6)
    throw Error("config: views must be between 0 and 6");
  if (views == 0 && external_name.empty())
    throw Error("config: views = 0 needs an external view (external_name)");
  if (C <= 0.0) throw Error("config: C must be positive");
  if (meta_C <= 0.0) throw Error("config: meta_C must be positive");
  if (tol <= 0.0) throw Error("config: tol must be positive");
  if (k_folds < 2) throw Error("config: k_folds must be >= 2");
  if (min_df < 1) throw Error("config: min_df must be >= 1");
  if (max_iter < 1) throw Error("config: max_iter must be >= 1");
}

}  // namespace mvsvm
