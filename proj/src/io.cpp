#include "torus_vrep/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace tvr {

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0.0) return std::signbit(x) ? "-0.0" : "0.0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace {

void dump(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const std::string sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += pad;
        out += Json(it.key()).dump();
        out += sep;
        dump(it.value(), indent, depth + 1, out);
      }
      out += close;
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += flat ? (indent > 0 ? ", " : ",") : ",";
        if (!flat) out += pad;
        dump(j[i], indent, depth + 1, out);
      }
      if (!flat) out += close;
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::vector<double> doubles(const Json& j, const char* field) {
  if (!j.contains(field)) throw std::invalid_argument(std::string("missing field '") + field + "'");
  const Json& a = j.at(field);
  if (!a.is_array()) throw std::invalid_argument(std::string("field '") + field + "' must be an array");
  std::vector<double> out;
  for (const auto& e : a) {
    if (e.is_null()) {
      out.push_back(std::nan(""));
    } else if (e.is_number()) {
      out.push_back(e.get<double>());
    } else {
      throw std::invalid_argument(std::string("field '") + field + "' must contain numbers");
    }
  }
  return out;
}

int integer(const Json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_number_integer()) {
    throw std::invalid_argument(std::string("field '") + field + "' must be an integer");
  }
  return j.at(field).get<int>();
}

void expect_kind(const Json& j, const char* kind) {
  if (!j.is_object()) throw std::invalid_argument("expected a JSON object");
  if (j.contains("kind") && j.at("kind") != kind) {
    throw std::invalid_argument(std::string("field 'kind' must be \"") + kind + "\"");
  }
}

TorusFunction coefficients_from_json(const Json& j) {
  if (j.contains("coeff_re")) {
    const int K = integer(j, "cutoff");
    if (K < 0) throw std::invalid_argument("field 'cutoff' must be nonnegative");
    const auto re = doubles(j, "coeff_re");
    const auto im = j.contains("coeff_im") ? doubles(j, "coeff_im") : std::vector<double>(re.size(), 0.0);
    if (re.size() != static_cast<std::size_t>(2 * K + 1) || im.size() != re.size()) {
      throw std::invalid_argument("field 'coeff_re' must have 2*cutoff+1 entries");
    }
    std::vector<cplx> c(re.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = {re[i], im[i]};
    return TorusFunction(std::move(c));
  }
  if (j.contains("samples")) {
    const auto s = doubles(j, "samples");
    const int grid = j.contains("grid") ? integer(j, "grid") : static_cast<int>(s.size());
    if (grid != static_cast<int>(s.size())) throw std::invalid_argument("field 'grid' disagrees with samples length");
    const int K = j.contains("cutoff") ? integer(j, "cutoff") : max_cutoff(grid);
    for (double x : s) {
      if (!std::isfinite(x)) throw std::invalid_argument("field 'samples' contains a non-finite value");
    }
    return transform(std::span<const double>(s), K);
  }
  throw std::invalid_argument("missing field 'coeff_re' or 'samples'");
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump(j, indent, 0, out);
  out += '\n';
  return out;
}

Json to_json(const TorusFunction& f) {
  Json re = Json::array(), im = Json::array();
  for (int k = -f.cutoff(); k <= f.cutoff(); ++k) {
    re.push_back(f[k].real());
    im.push_back(f[k].imag());
  }
  Json j;
  j["cutoff"] = f.cutoff();
  j["coeff_re"] = re;
  j["coeff_im"] = im;
  return j;
}

namespace {

Json with_samples(Json j, const TorusFunction& f, int grid) {
  const int m = grid > 0 ? grid : std::max(64, 2 * f.cutoff() + 1);
  j["grid"] = m;
  j["samples"] = f.real_samples(m);
  return j;
}

}  // namespace

Json density_to_json(const DensityField& rho, int grid) {
  Json j;
  j["kind"] = "density";
  j["n_particles"] = rho.n_particles();
  j.update(to_json(rho.profile()));
  return with_samples(std::move(j), rho.profile(), grid);
}

Json potential_to_json(const PotentialClass& v, int grid) {
  Json j;
  j["kind"] = "potential";
  j.update(to_json(v.coefficients()));
  return with_samples(std::move(j), v.coefficients(), grid);
}

DensityField density_from_json(const Json& j, const Numerics& num) {
  expect_kind(j, "density");
  const int n = integer(j, "n_particles");
  if (n < 1) throw std::invalid_argument("field 'n_particles' must be positive");
  return make_density(coefficients_from_json(j), n, num);
}

PotentialClass potential_from_json(const Json& j) {
  expect_kind(j, "potential");
  return PotentialClass(coefficients_from_json(j));
}

std::string read_text(const std::string& path) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in '" + path + "': " + e.what());
  }
}

std::string csv_text(const std::vector<CsvColumn>& columns) {
  std::string out;
  std::size_t rows = 0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out += (c ? "," : "") + columns[c].name;
    rows = std::max(rows, columns[c].values.size());
  }
  out += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      if (r < columns[c].values.size()) {
        const double x = columns[c].values[r];
        out += std::isfinite(x) ? format_double(x) : "nan";
      }
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<CsvColumn>& columns) { write_text(path, csv_text(columns)); }

std::string svg_text(const std::string& title, const std::vector<double>& x, const std::vector<CsvColumn>& series) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  const double width = 640, height = 400, margin = 40;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (!x.empty()) {
    xmin = *std::min_element(x.begin(), x.end());
    xmax = *std::max_element(x.begin(), x.end());
  }
  bool any = false;
  for (const auto& s : series) {
    for (double y : s.values) {
      if (!std::isfinite(y)) continue;
      if (!any) ymin = ymax = y;
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
      any = true;
    }
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  auto px = [&](double v) { return margin + (v - xmin) / (xmax - xmin) * (width - 2 * margin); };
  auto py = [&](double v) { return height - margin - (v - ymin) / (ymax - ymin) * (height - 2 * margin); };
  char buf[128];
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  out += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  out += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" + title +
         "</text>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"#888\"/>\n",
                margin, margin, width - 2 * margin, height - 2 * margin);
  out += buf;
  for (std::size_t s = 0; s < series.size(); ++s) {
    out += "<polyline fill=\"none\" stroke=\"";
    out += colors[s % 6];
    out += "\" stroke-width=\"1.5\" points=\"";
    const std::size_t n = std::min(x.size(), series[s].values.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(series[s].values[i])) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x[i]), py(series[s].values[i]));
      out += buf;
    }
    out += "\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"12\" fill=\"%s\">",
                  width - margin - 80, margin + 16.0 * static_cast<double>(s + 1), colors[s % 6]);
    out += buf + series[s].name + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void write_svg(const std::string& path, const std::string& title, const std::vector<double>& x,
               const std::vector<CsvColumn>& series) {
  write_text(path, svg_text(title, x, series));
}

}  // namespace tvr
