#pragma once

// JSON, CSV and SVG serialization. Floats are written with 17 significant
// digits so emitted files are deterministic and re-load exactly.

#include <json.hpp>
#include <string>
#include <vector>

#include "torus_vrep/spaces.hpp"

namespace tvr {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "torus-vrep/1";

std::string format_double(double x);
/// Serialize with fixed float formatting; non-finite numbers become null.
std::string dump_json(const Json& j, int indent = 2);

Json to_json(const TorusFunction& f);
Json density_to_json(const DensityField& rho, int grid = 0);
Json potential_to_json(const PotentialClass& v, int grid = 0);

/// Accepts coefficient arrays, or samples with grid when coefficients are absent.
DensityField density_from_json(const Json& j, const Numerics& num = default_numerics());
PotentialClass potential_from_json(const Json& j);

/// "-" reads stdin.
std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);
Json read_json(const std::string& path);

struct CsvColumn {
  std::string name;
  std::vector<double> values;
};

std::string csv_text(const std::vector<CsvColumn>& columns);
void write_csv(const std::string& path, const std::vector<CsvColumn>& columns);

/// Polyline plot of each series against x.
std::string svg_text(const std::string& title, const std::vector<double>& x, const std::vector<CsvColumn>& series);
void write_svg(const std::string& path, const std::string& title, const std::vector<double>& x,
               const std::vector<CsvColumn>& series);

}  // namespace tvr
