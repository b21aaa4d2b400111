#include "cubsc/json_io.hpp"

#include <fstream>

namespace cubsc {

nlohmann::json complex_to_json(const CubeComplex& X) {
  nlohmann::json doc;
  doc["dim"] = X.dim();
  auto& cubes = doc["cubes"] = nlohmann::json::array();
  for (int d = 0; d <= X.dim(); ++d) {
    nlohmann::json layer = nlohmann::json::array();
    for (std::size_t c = 0; c < X.size(d); ++c) layer.push_back(X.faces(d, static_cast<int>(c)));
    cubes.push_back(std::move(layer));
  }
  bool any_label = false;
  for (int d = 0; d <= X.dim(); ++d)
    for (std::size_t c = 0; c < X.size(d); ++c)
      if (!X.label(d, static_cast<int>(c)).empty()) any_label = true;
  if (any_label) {
    auto& labels = doc["labels"] = nlohmann::json::array();
    for (int d = 0; d <= X.dim(); ++d) {
      nlohmann::json layer = nlohmann::json::array();
      for (std::size_t c = 0; c < X.size(d); ++c) layer.push_back(X.label(d, static_cast<int>(c)));
      labels.push_back(std::move(layer));
    }
  }
  return doc;
}

Result<CubeComplex> complex_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("cubes"))
    return Error{"ParseError", "document wants object keys dim, cubes"};
  if (!doc["dim"].is_number_integer() || !doc["cubes"].is_array())
    return Error{"ParseError", "dim must be an integer and cubes an array"};
  const int dim = doc["dim"].get<int>();
  const auto& cubes = doc["cubes"];
  if (dim < 0 || cubes.size() != static_cast<std::size_t>(dim) + 1)
    return Error{"ParseError", "cubes wants dim+1 dimension layers"};
  RawComplex raw;
  raw.cubes.resize(cubes.size());
  for (std::size_t d = 0; d < cubes.size(); ++d) {
    if (!cubes[d].is_array()) return Error{"ParseError", "dimension layer must be an array"};
    for (const auto& cell : cubes[d]) {
      if (!cell.is_array()) return Error{"ParseError", "cube must be a face array"};
      std::vector<int> faces;
      for (const auto& id : cell) {
        if (!id.is_number_integer()) return Error{"ParseError", "face id must be an integer"};
        faces.push_back(id.get<int>());
      }
      raw.cubes[d].push_back(std::move(faces));
    }
  }
  if (doc.contains("labels")) {
    if (!doc["labels"].is_array()) return Error{"ParseError", "labels must be an array"};
    for (const auto& layer : doc["labels"]) {
      std::vector<std::string> names;
      for (const auto& s : layer) {
        if (!s.is_string()) return Error{"ParseError", "label must be a string"};
        names.push_back(s.get<std::string>());
      }
      raw.labels.push_back(std::move(names));
    }
  }
  return validate_complex(raw);
}

std::string canonical_json(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

Result<CubeComplex> read_complex_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return Error{"ParseError", "cannot open " + path};
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    return Error{"ParseError", e.what()};
  }
  return complex_from_json(doc);
}

void write_complex_file(const std::string& path, const CubeComplex& X) {
  std::ofstream out(path);
  out << canonical_json(complex_to_json(X));
}

}  // namespace cubsc
