// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace chibar {

struct NotPositiveDefinite : std::runtime_error {
  explicit NotPositiveDefinite(const std::string& what)
      : std::runtime_error("not positive definite: " + what) {}
};

struct NoConvergence : std::runtime_error {
  explicit NoConvergence(const std::string& what)
      : std::runtime_error("no convergence: " + what) {}
};

struct NegativeCorrelation : std::runtime_error {
  explicit NegativeCorrelation(const std::string& what)
      : std::runtime_error("negative correlation: " + what) {}
};

struct InvalidPartition : std::runtime_error {
  explicit InvalidPartition(const std::string& what)
      : std::runtime_error("invalid partition: " + what) {}
};

struct DimensionTooLarge : std::runtime_error {
  explicit DimensionTooLarge(const std::string& what)
      : std::runtime_error("dimension too large: " + what) {}
};

struct GenerationFailed : std::runtime_error {
  explicit GenerationFailed(const std::string& what)
      : std::runtime_error("covariance generation failed: " + what) {}
};

}  // namespace chibar
