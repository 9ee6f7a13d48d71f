#pragma once

#include <vector>

#include "vscreen/stats.hpp"

namespace vscreen::stats {

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // column i pairs with values[i]
};

// Cyclic Jacobi rotations. Intended for the small (<= 32) correlation
// matrices the PCA works with.
EigenDecomposition symmetric_eigen(const Matrix& a);

}  // namespace vscreen::stats
