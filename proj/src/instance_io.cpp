#include "ucpm/instance_io.hpp"

#include <cmath>
#include <fstream>

namespace ucpm {

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j)
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  require(j.is_array() && !j.empty(), errc::invalid_instance,
          "matrix payload must be a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j.at(i);
    require(row.is_array() && static_cast<Index>(row.size()) == cols,
            errc::invalid_instance, "matrix rows must have equal length");
    for (Index c = 0; c < cols; ++c) {
      const Json& entry = row.at(c);
      require(entry.is_array() && entry.size() == 2,
              errc::invalid_instance,
              "matrix entries must be [re, im] pairs");
      m(i, c) = Complex(entry.at(0).get<double>(),
                        entry.at(1).get<double>());
    }
  }
  check_finite(m, "matrix payload");
  return m;
}

const CpMap& Instance::map(const std::string& name) const {
  const auto it = maps.find(name);
  require(it != maps.end(), errc::unknown_name, "no map named " + name);
  return it->second;
}

DiscreteMeasure Instance::measure(const std::string& name) const {
  const auto it = raw_measures.find(name);
  require(it != raw_measures.end(), errc::unknown_name,
          "no measure named " + name);
  std::vector<CpMap> atoms;
  for (const std::string& atom_name : it->second.atom_names)
    atoms.push_back(map(atom_name));
  return canonicalize(std::move(atoms), it->second.weights, tol,
                      opts.merge_tol)
      .measure;
}

AbelianSubalgebra Instance::subalgebra(const std::string& name,
                                       Index ambient_dim) const {
  const auto it = subalgebras.find(name);
  require(it != subalgebras.end(), errc::unknown_name,
          "no subalgebra named " + name);
  AbelianSubalgebra out;
  out.ambient_dim = ambient_dim;
  if (!it->second.projections.empty()) {
    out.min_projections = it->second.projections;
    for (std::size_t i = 0; i < out.min_projections.size(); ++i)
      out.labels.push_back(name + "." + std::to_string(i));
    return out;
  }
  return minimal_projections(it->second.generators, tol);
}

namespace {

template <typename T>
T field_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

CpMap parse_map(const Json& j, const AlgebraPtr& algebra,
                const Tolerance& tol) {
  require(j.contains("out_dim"), errc::invalid_instance,
          "map payload needs out_dim");
  CpMap out;
  out.algebra = algebra;
  out.out_dim = j.at("out_dim").get<Index>();

  const Index k = algebra->dim();
  if (j.contains("images")) {
    const Json& images = j.at("images");
    require(static_cast<Index>(images.size()) == k, errc::invalid_instance,
            "expected one image per algebra basis element");
    for (const Json& img : images)
      out.images.push_back(matrix_from_json(img));
  } else if (j.contains("matrix_unit_images")) {
    // Ergonomic form for full algebras: images on the plain matrix units
    // E_ij in row-major order. The stored basis is sqrt(d) E_ij.
    require(algebra->is_full(), errc::invalid_instance,
            "matrix_unit_images requires the full algebra");
    const Json& images = j.at("matrix_unit_images");
    require(static_cast<Index>(images.size()) == k, errc::invalid_instance,
            "expected one image per matrix unit");
    const double scale = std::sqrt(static_cast<double>(algebra->ambient_dim));
    for (const Json& img : images)
      out.images.push_back(scale * matrix_from_json(img));
  } else {
    fail(errc::invalid_instance,
         "map payload needs images or matrix_unit_images");
  }
  out.validate_structure(tol);
  return out;
}

}  // namespace

Instance parse_instance(const Json& j) {
  Instance inst;
  inst.schema_version = field_or<std::string>(j, "schema_version", "1");
  require(inst.schema_version == "1", errc::invalid_instance,
          "unsupported schema_version " + inst.schema_version);

  if (j.contains("tolerance")) {
    const Json& t = j.at("tolerance");
    inst.tol.atol = field_or(t, "atol", inst.tol.atol);
    inst.tol.rank_rtol = field_or(t, "rank_rtol", inst.tol.rank_rtol);
    inst.opts.ortho_tol = field_or(t, "ortho_tol", inst.opts.ortho_tol);
    inst.opts.exhaustive_cap =
        field_or(t, "exhaustive_cap", inst.opts.exhaustive_cap);
    inst.tol.validate();
  }

  require(j.contains("algebra"), errc::invalid_instance,
          "instance needs an algebra");
  const Json& alg = j.at("algebra");
  require(alg.contains("ambient_dim"), errc::invalid_instance,
          "algebra needs ambient_dim");
  const Index d = alg.at("ambient_dim").get<Index>();
  require(d >= 1, errc::invalid_instance, "ambient_dim must be >= 1");
  if (alg.contains("basis")) {
    std::vector<Matrix> basis;
    for (const Json& b : alg.at("basis"))
      basis.push_back(matrix_from_json(b));
    inst.algebra = algebra_from_basis(d, std::move(basis), inst.tol);
  } else if (!alg.contains("generators") ||
             (alg.at("generators").is_string() &&
              alg.at("generators").get<std::string>() == "full")) {
    inst.algebra = full_matrix_algebra(d);
  } else {
    std::vector<Matrix> generators;
    for (const Json& g : alg.at("generators"))
      generators.push_back(matrix_from_json(g));
    inst.algebra = close_star_algebra(d, generators, inst.tol);
  }

  const Json map_payloads = field_or(j, "maps", Json::object());
  for (const auto& [name, payload] : map_payloads.items())
    inst.maps.emplace(name, parse_map(payload, inst.algebra, inst.tol));

  const Json measure_payloads = field_or(j, "measures", Json::object());
  for (const auto& [name, payload] : measure_payloads.items()) {
    Instance::RawMeasure raw;
    require(payload.contains("atoms") && payload.contains("weights"),
            errc::invalid_instance, "measure needs atoms and weights");
    for (const Json& atom : payload.at("atoms"))
      raw.atom_names.push_back(atom.get<std::string>());
    for (const Json& w : payload.at("weights"))
      raw.weights.push_back(w.get<double>());
    require(raw.atom_names.size() == raw.weights.size(),
            errc::invalid_instance, "atom/weight count mismatch");
    for (const std::string& atom_name : raw.atom_names)
      require(inst.maps.count(atom_name) == 1, errc::unknown_name,
              "measure references unknown map " + atom_name);
    inst.raw_measures.emplace(name, std::move(raw));
  }

  const Json subalgebra_payloads = field_or(j, "subalgebras", Json::object());
  for (const auto& [name, payload] : subalgebra_payloads.items()) {
    Instance::RawSubalgebra raw;
    if (payload.contains("projections"))
      for (const Json& p : payload.at("projections"))
        raw.projections.push_back(matrix_from_json(p));
    if (payload.contains("generators"))
      for (const Json& g : payload.at("generators"))
        raw.generators.push_back(matrix_from_json(g));
    require(!raw.projections.empty() || !raw.generators.empty(),
            errc::invalid_instance,
            "subalgebra needs projections or generators");
    inst.subalgebras.emplace(name, std::move(raw));
  }
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::invalid_instance, "cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& err) {
    fail(errc::invalid_instance, std::string("JSON parse error: ") +
                                     err.what());
  }
  return parse_instance(j);
}

Json instance_to_json(const AlgebraPtr& algebra,
                      const std::map<std::string, CpMap>& maps,
                      const std::map<std::string, Instance::RawMeasure>&
                          measures) {
  Json j;
  j["schema_version"] = "1";
  j["algebra"]["ambient_dim"] = algebra->ambient_dim;
  if (algebra->is_full()) {
    j["algebra"]["generators"] = "full";
  } else {
    // Emit the closed orthonormal basis verbatim so map images stay aligned
    // on reload.
    Json basis = Json::array();
    for (const Matrix& b : algebra->basis) basis.push_back(matrix_to_json(b));
    j["algebra"]["basis"] = std::move(basis);
  }
  for (const auto& [name, map] : maps) {
    Json payload;
    payload["out_dim"] = map.out_dim;
    Json images = Json::array();
    for (const Matrix& img : map.images)
      images.push_back(matrix_to_json(img));
    payload["images"] = std::move(images);
    j["maps"][name] = std::move(payload);
  }
  for (const auto& [name, raw] : measures) {
    j["measures"][name]["atoms"] = raw.atom_names;
    j["measures"][name]["weights"] = raw.weights;
  }
  return j;
}

}  // namespace ucpm
