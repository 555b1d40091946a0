#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace agto {

/// Axis-aligned feasible box. Construction validates lower[j] < upper[j].
class SearchSpace {
public:
  SearchSpace(std::vector<double> lower, std::vector<double> upper);

  static SearchSpace cube(std::size_t dims, double lower, double upper);

  std::size_t dims() const { return lower_.size(); }
  std::span<const double> lower() const { return lower_; }
  std::span<const double> upper() const { return upper_; }

  bool contains(std::span<const double> x) const;
  void clamp(std::span<double> x) const;

private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

} // namespace agto
