#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "ngrem/model.hpp"

namespace ngrem {

namespace detail {

inline Rational json_to_rational(const nlohmann::json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number_unsigned()) return Rational(v.get<unsigned long long>());
  if (v.is_number_float()) return rational_from_double(v.get<double>());
  if (v.is_string()) return parse_rational(v.get<std::string>());
  throw Error(ErrorCode::ParseError, where + " must be a number or a \"p/q\" string");
}

}  // namespace detail

// Model file:
//   {"n": 3, "gamma": [..n reals..], "weights": [{"subset": [1, 2], "a": 0.8}, ...]}
// Reals may be JSON numbers or strings such as "1/3".
inline ModelInput parse_model_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "model file must be a JSON object");
  for (const char* key : {"n", "gamma", "weights"})
    if (!doc.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  if (!doc["n"].is_number_integer()) throw Error(ErrorCode::ParseError, "'n' must be an integer");
  if (!doc["gamma"].is_array()) throw Error(ErrorCode::ParseError, "'gamma' must be an array");
  if (!doc["weights"].is_array()) throw Error(ErrorCode::ParseError, "'weights' must be an array");

  ModelInput in;
  in.n = doc["n"].get<int>();
  for (std::size_t i = 0; i < doc["gamma"].size(); ++i)
    in.gamma.push_back(detail::json_to_rational(doc["gamma"][i], "gamma[" + std::to_string(i) + "]"));
  for (std::size_t k = 0; k < doc["weights"].size(); ++k) {
    const auto& w = doc["weights"][k];
    const std::string where = "weights[" + std::to_string(k) + "]";
    if (!w.is_object() || !w.contains("subset") || !w.contains("a"))
      throw Error(ErrorCode::ParseError, where + " must be an object with 'subset' and 'a'");
    if (!w["subset"].is_array()) throw Error(ErrorCode::ParseError, where + ".subset must be an array");
    WeightInput entry;
    for (const auto& idx : w["subset"]) {
      if (!idx.is_number_integer()) throw Error(ErrorCode::ParseError, where + ".subset must hold integers");
      entry.subset.push_back(idx.get<int>());
    }
    entry.a = detail::json_to_rational(w["a"], where + ".a");
    in.weights.push_back(std::move(entry));
  }
  return in;
}

inline ModelInput read_model_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw Error(ErrorCode::ParseError, "cannot open model file '" + path + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();
  return parse_model_json(buffer.str());
}

inline ModelSpec load_model(const std::string& path) { return validate_model(read_model_file(path)); }

inline nlohmann::json model_to_json(const ModelSpec& m) {
  nlohmann::json doc;
  doc["n"] = m.n();
  doc["gamma"] = nlohmann::json::array();
  for (double g : m.gamma()) doc["gamma"].push_back(g);
  doc["weights"] = nlohmann::json::array();
  for (const auto& w : m.weights()) doc["weights"].push_back({{"subset", w.subset.indices()}, {"a", w.a}});
  return doc;
}

}  // namespace ngrem
