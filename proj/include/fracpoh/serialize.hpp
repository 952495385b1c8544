#pragma once

#include "fracpoh/config.hpp"
#include "fracpoh/nonlocal_op.hpp"

#include <json.hpp>

#include <string>

namespace fracpoh {

// Solution files: magic + JSON header (grid/kernel spec, checksum, caller
// metadata) + flat little-endian array of node values in grid order.
// Writes are atomic (temp file + rename); round trips are bit exact.
void save_solution(const GridFunction& u, const ExperimentConfig& spec,
                   const std::string& path,
                   const nlohmann::json& meta = nlohmann::json::object());

struct LoadedSolution {
  GridFunction u;
  ExperimentConfig spec;   // kernel/domain/grid blocks reconstructed
  nlohmann::json meta;
};

// expected_dim = 0 accepts any dimension; a mismatch raises the
// compatibility error.
LoadedSolution load_solution(const std::string& path, int expected_dim = 0);

}  // namespace fracpoh
