#pragma once

#include <istream>
#include <string>
#include <vector>

#include "idseries/levy.hpp"
#include "idseries/matrix.hpp"
#include "idseries/optimization.hpp"

namespace idseries {

/// Model text: `sigma2 = <real>` once, `atom = <u>,<w>` any number of times.
/// `#` starts a comment.
IdModel parse_model(std::istream& in, const std::string& source = "<model>");
IdModel read_model(const std::string& path);

/// Matrix text: a header line `d` (square) or `M N`, then the rows.
/// A series file is a sequence of such blocks.
std::vector<Matrix> parse_matrices(std::istream& in, const std::string& source = "<matrices>");
std::vector<Matrix> read_matrices(const std::string& path);
std::vector<SymMatrix> read_symmetric_series(const std::string& path);

/// `dims M N`, then `objective`, repeated `B` and an optional `C`, each
/// keyword followed by one matrix block.
QuadProblem parse_quad_problem(std::istream& in, const std::string& source = "<problem>");
QuadProblem read_quad_problem(const std::string& path);

/// `base` followed by one matrix block, then one `term` block per A_k.
ChanceProblem parse_chance_problem(std::istream& in, const std::string& source = "<problem>");
ChanceProblem read_chance_problem(const std::string& path);

/// Fixed 17-significant-digit formatting shared by every CSV writer.
std::string format_real(double x);

}  // namespace idseries
