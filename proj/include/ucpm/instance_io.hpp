#ifndef UCPM_INSTANCE_IO_HPP
#define UCPM_INSTANCE_IO_HPP

#include <json.hpp>
#include <map>
#include <string>

#include "ucpm/correspondence.hpp"
#include "ucpm/measures.hpp"

namespace ucpm {

using Json = nlohmann::ordered_json;

//=========================================================================
// Matrix interchange: row-major nested arrays of [re, im] pairs
//=========================================================================

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

//=========================================================================
// Instance files
//=========================================================================

// A parsed instance file: one algebra, named maps, named measures over
// those maps, named projection families, optional tolerance overrides.
struct Instance {
  std::string schema_version = "1";
  AlgebraPtr algebra;
  Tolerance tol;
  MeasureOptions opts;
  std::map<std::string, CpMap> maps;

  struct RawMeasure {
    std::vector<std::string> atom_names;
    std::vector<double> weights;
  };
  std::map<std::string, RawMeasure> raw_measures;

  struct RawSubalgebra {
    std::vector<Matrix> projections;  // used directly when present
    std::vector<Matrix> generators;   // else minimal projections of these
  };
  std::map<std::string, RawSubalgebra> subalgebras;

  const CpMap& map(const std::string& name) const;
  DiscreteMeasure measure(const std::string& name) const;
  AbelianSubalgebra subalgebra(const std::string& name,
                               Index ambient_dim) const;
};

Instance parse_instance(const Json& j);
Instance load_instance(const std::string& path);

// Serialization helpers used by the gallery emitter and by tests.
Json instance_to_json(const AlgebraPtr& algebra,
                      const std::map<std::string, CpMap>& maps,
                      const std::map<std::string, Instance::RawMeasure>&
                          measures = {});

}  // namespace ucpm

#endif
