#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "phk/covering.hpp"

namespace phk {

// JSON output is assembled by hand so numbers are emitted with 17
// significant digits (lossless for 64-bit doubles) and key order is fixed,
// making reports byte-identical for identical inputs and seeds.

inline std::string json_num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string json_str(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += "\"";
  return out;
}

inline std::string json_bool(bool b) { return b ? "true" : "false"; }

inline std::string json_num_array(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += json_num(v[i]);
  }
  return out + "]";
}

// {"k":..,"ell":..,"epsilon":..,"h":..,"blocks":[["111",...],...]}
inline std::string cover_to_json(const CoverPartition& part) {
  std::string out = "{\"k\":" + std::to_string(part.k) + ",\"ell\":" + std::to_string(part.ell) +
                    ",\"epsilon\":" + json_num(part.epsilon) + ",\"h\":" + std::to_string(part.h) +
                    ",\"blocks\":[";
  for (std::size_t b = 0; b < part.blocks.size(); ++b) {
    if (b) out += ",";
    out += "[";
    for (std::size_t j = 0; j < part.blocks[b].size(); ++j) {
      if (j) out += ",";
      out += json_str(word_to_string(part.blocks[b][j], part.k, part.ell));
    }
    out += "]";
  }
  out += "]}";
  return out;
}

inline CoverPartition cover_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("cover_from_json: ") + e.what());
  }
  CoverPartition part;
  try {
    part.k = j.at("k").get<int>();
    part.ell = j.at("ell").get<int>();
    part.epsilon = j.at("epsilon").get<double>();
    part.h = j.at("h").get<std::uint64_t>();
    for (const auto& blk : j.at("blocks")) {
      std::vector<std::uint32_t> words;
      for (const auto& w : blk)
        words.push_back(word_from_string(w.get<std::string>(), part.k, part.ell));
      part.blocks.push_back(std::move(words));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("cover_from_json: malformed partition: ") + e.what());
  }
  return part;
}

}  // namespace phk
