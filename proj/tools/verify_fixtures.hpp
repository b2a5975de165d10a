#pragma once

#include <functional>
#include <string>
#include <vector>

namespace ads::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  std::string note;
};

using Fixture = std::function<std::vector<CheckResult>()>;

/// Bundled micro-fixtures by name: toy, random, ds-special, lemma1, lemma2, knn-oracle.
const std::vector<std::pair<std::string, Fixture>>& fixtures();

}  // namespace ads::cli
