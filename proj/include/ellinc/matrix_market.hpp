#pragma once

#include <filesystem>
#include <istream>
#include <ostream>

#include "ellinc/linear_map.hpp"

namespace ellinc {

/// Reads a Matrix Market `coordinate real general` (or `integer general`)
/// file. Duplicate entries are summed, as in the reference reader.
LinearMap read_matrix_market(std::istream& in);
LinearMap read_matrix_market(const std::filesystem::path& path);

/// Writes the nonzeros of `map` in coordinate real general form.
void write_matrix_market(std::ostream& out, const LinearMap& map);

}  // namespace ellinc
