#pragma once

#include <filesystem>
#include <string>

#include "ree/boundopt.hpp"

namespace ree {

// State files are JSON:
//   { "dims": [dA, dB], "label": "...", "matrix_re": [[...]], "matrix_im": [[...]] }
// label is optional; numbers carry full double precision. The writer is a
// fixpoint: write(parse(f)) reproduces f byte for byte for files it wrote.
struct LoadedState {
  DensityMatrix state;
  std::string label;
};

LoadedState read_state_file(const std::filesystem::path& path);
void write_state_file(const std::filesystem::path& path, const DensityMatrix& state,
                      const std::string& label = "");

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

// param,bound_nats,bound_bits[,oracle_nats],filter_residual_A,...
// 17 significant digits, '.' decimal point, no locale formatting.
std::string sweep_csv(const SweepTable& table);

std::string format_g17(double value);

}  // namespace ree
