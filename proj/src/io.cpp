#include "ree/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ree {

using json = nlohmann::ordered_json;

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path.string());
  out << content;
}

LoadedState read_state_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("state file " + path.string() + ": " + e.what());
  }

  try {
    if (!doc.contains("dims") || !doc["dims"].is_array() || doc["dims"].size() != 2)
      throw ParseError("state file " + path.string() + ": missing or malformed \"dims\"");
    const std::size_t dim_a = doc["dims"][0].get<std::size_t>();
    const std::size_t dim_b = doc["dims"][1].get<std::size_t>();
    const std::size_t n = dim_a * dim_b;

    auto read_matrix_part = [&](const char* key, bool required) {
      std::vector<std::vector<double>> rows;
      if (!doc.contains(key)) {
        if (required) throw ParseError(std::string("state file missing \"") + key + "\"");
        rows.assign(n, std::vector<double>(n, 0.0));
        return rows;
      }
      rows = doc[key].get<std::vector<std::vector<double>>>();
      if (rows.size() != n)
        throw ParseError(std::string("field \"") + key + "\" must have " + std::to_string(n) +
                         " rows");
      for (const auto& row : rows)
        if (row.size() != n)
          throw ParseError(std::string("field \"") + key + "\" must have " + std::to_string(n) +
                           " columns per row");
      return rows;
    };

    const auto re = read_matrix_part("matrix_re", true);
    const auto im = read_matrix_part("matrix_im", false);

    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex(re[i][j], im[i][j]);

    LoadedState loaded{DensityMatrix(dim_a, dim_b, std::move(m)),
                       doc.value("label", std::string())};
    return loaded;
  } catch (const json::exception& e) {
    throw ParseError("state file " + path.string() + ": " + e.what());
  }
}

void write_state_file(const std::filesystem::path& path, const DensityMatrix& state,
                      const std::string& label) {
  const std::size_t n = state.total_dim();
  json doc;
  doc["dims"] = {state.dim_a(), state.dim_b()};
  if (!label.empty()) doc["label"] = label;
  json re = json::array();
  json im = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    json re_row = json::array();
    json im_row = json::array();
    for (std::size_t j = 0; j < n; ++j) {
      re_row.push_back(state.matrix()(i, j).real());
      im_row.push_back(state.matrix()(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  doc["matrix_re"] = std::move(re);
  doc["matrix_im"] = std::move(im);
  write_text_file(path, doc.dump(2) + "\n");
}

std::string sweep_csv(const SweepTable& table) {
  std::ostringstream out;
  out << "param,bound_nats,bound_bits";
  if (table.with_oracle) out << ",oracle_nats";
  out << ",filter_residual_A,filter_residual_B,unitary_residual_A,unitary_residual_B\n";
  for (const SweepRow& row : table.rows) {
    out << format_g17(row.param) << ',' << format_g17(row.bound_nats) << ','
        << format_g17(row.bound_bits);
    if (table.with_oracle) out << ',' << format_g17(row.oracle_nats.value_or(0.0));
    out << ',' << format_g17(row.filter_residual_a) << ',' << format_g17(row.filter_residual_b)
        << ',' << format_g17(row.unitary_residual_a) << ',' << format_g17(row.unitary_residual_b)
        << '\n';
  }
  return out.str();
}

}  // namespace ree
