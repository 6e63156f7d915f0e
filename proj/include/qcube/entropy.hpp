#pragma once

#include <qcube/error.hpp>

#include <cmath>
#include <string>

namespace qcube {

/// H(p) = -p log2 p - (1-p) log2 (1-p), with 0 log 0 = 0.
inline double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::DomainError, "entropy argument " + std::to_string(p) + " outside [0,1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace qcube
