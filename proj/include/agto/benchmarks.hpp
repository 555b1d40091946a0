#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agto/random.hpp"
#include "agto/search_space.hpp"

namespace agto::bench {

// The classical 23-function suite: F1-F7 unimodal, F8-F13 multimodal,
// F14-F23 fixed-dimension multimodal.
enum class FunctionId : int {
  F1 = 1, F2, F3, F4, F5, F6, F7, F8, F9, F10, F11, F12,
  F13, F14, F15, F16, F17, F18, F19, F20, F21, F22, F23
};

enum class Category { Unimodal, Multimodal, FixedDimensionMultimodal };

struct Descriptor {
  FunctionId id;
  std::string_view name;
  Category category;
  double lower;
  double upper;
  std::size_t dims;
  double global_optimum;

  SearchSpace space() const { return SearchSpace::cube(dims, lower, upper); }
};

inline constexpr std::size_t kSuiteSize = 23;

const Descriptor& descriptor(FunctionId id);
const std::array<Descriptor, kSuiteSize>& suite();

// "F7" / "f7" / "7" -> F7. Throws LookupError.
FunctionId parse_id(std::string_view text);
std::string to_string(FunctionId id);
std::string_view to_string(Category c);

// Throws DimensionError when x.size() differs from the descriptor's dims.
// Only F7 draws from `rng` (one uniform per call).
double evaluate(FunctionId id, std::span<const double> x, Rng& rng);

} // namespace agto::bench
