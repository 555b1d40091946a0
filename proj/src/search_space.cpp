#include "agto/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "agto/errors.hpp"

namespace agto {

SearchSpace::SearchSpace(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty())
    throw ConfigError("search space must have at least one dimension");
  if (lower_.size() != upper_.size())
    throw ConfigError("lower and upper bounds differ in length");
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (!std::isfinite(lower_[j]) || !std::isfinite(upper_[j]) || !(lower_[j] < upper_[j]))
      throw ConfigError("invalid bounds on dimension " + std::to_string(j) + ": [" +
                        std::to_string(lower_[j]) + ", " + std::to_string(upper_[j]) + "]");
  }
}

SearchSpace SearchSpace::cube(std::size_t dims, double lower, double upper) {
  return SearchSpace(std::vector<double>(dims, lower), std::vector<double>(dims, upper));
}

bool SearchSpace::contains(std::span<const double> x) const {
  if (x.size() != dims())
    return false;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (!(x[j] >= lower_[j] && x[j] <= upper_[j]))
      return false;
  return true;
}

void SearchSpace::clamp(std::span<double> x) const {
  for (std::size_t j = 0; j < x.size(); ++j)
    x[j] = std::clamp(x[j], lower_[j], upper_[j]);
}

} // namespace agto
