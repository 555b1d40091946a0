#include "agto/benchmarks.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "agto/errors.hpp"

namespace agto::bench {

namespace {

using std::numbers::pi;

constexpr std::array<Descriptor, kSuiteSize> kSuite{{
    {FunctionId::F1, "Sphere", Category::Unimodal, -100, 100, 30, 0.0},
    {FunctionId::F2, "Schwefel 2.22", Category::Unimodal, -10, 10, 30, 0.0},
    {FunctionId::F3, "Schwefel 1.2", Category::Unimodal, -100, 100, 30, 0.0},
    {FunctionId::F4, "Schwefel 2.21", Category::Unimodal, -100, 100, 30, 0.0},
    {FunctionId::F5, "Rosenbrock", Category::Unimodal, -30, 30, 30, 0.0},
    {FunctionId::F6, "Step", Category::Unimodal, -100, 100, 30, 0.0},
    {FunctionId::F7, "Quartic", Category::Unimodal, -1.28, 1.28, 30, 0.0},
    {FunctionId::F8, "Schwefel", Category::Multimodal, -500, 500, 30, -418.9829 * 30},
    {FunctionId::F9, "Rastrigin", Category::Multimodal, -5.12, 5.12, 30, 0.0},
    {FunctionId::F10, "Ackley", Category::Multimodal, -32, 32, 30, 0.0},
    {FunctionId::F11, "Griewank", Category::Multimodal, -600, 600, 30, 0.0},
    {FunctionId::F12, "Penalized", Category::Multimodal, -50, 50, 30, 0.0},
    {FunctionId::F13, "Penalized 2", Category::Multimodal, -50, 50, 30, 0.0},
    {FunctionId::F14, "Foxholes", Category::FixedDimensionMultimodal, -65, 65, 2, 0.998004},
    {FunctionId::F15, "Kowalik", Category::FixedDimensionMultimodal, -5, 5, 4, 0.0003075},
    {FunctionId::F16, "Six-hump Camel-Back", Category::FixedDimensionMultimodal, -5, 5, 2, -1.03163},
    {FunctionId::F17, "Branin", Category::FixedDimensionMultimodal, -5, 5, 2, 0.398},
    {FunctionId::F18, "Goldstein-Price", Category::FixedDimensionMultimodal, -2, 2, 2, 3.0},
    // Printed as [-1, 2] in some tables; the listed optimum needs the usual [0, 1].
    {FunctionId::F19, "Hartman3", Category::FixedDimensionMultimodal, 0, 1, 3, -3.8628},
    {FunctionId::F20, "Hartman6", Category::FixedDimensionMultimodal, 0, 1, 6, -3.322},
    {FunctionId::F21, "Shekel 5", Category::FixedDimensionMultimodal, 0, 10, 4, -10.1532},
    {FunctionId::F22, "Shekel 7", Category::FixedDimensionMultimodal, 0, 10, 4, -10.4028},
    {FunctionId::F23, "Shekel 10", Category::FixedDimensionMultimodal, 0, 10, 4, -10.5363},
}};

double sphere(std::span<const double> x) {
  double s = 0.0;
  for (double v : x)
    s += v * v;
  return s;
}

double schwefel_222(std::span<const double> x) {
  double sum = 0.0, prod = 1.0;
  for (double v : x) {
    sum += std::abs(v);
    prod *= std::abs(v);
  }
  return sum + prod;
}

double schwefel_12(std::span<const double> x) {
  double total = 0.0, prefix = 0.0;
  for (double v : x) {
    prefix += v;
    total += prefix * prefix;
  }
  return total;
}

double schwefel_221(std::span<const double> x) {
  double m = 0.0;
  for (double v : x)
    m = std::max(m, std::abs(v));
  return m;
}

double rosenbrock(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = x[i] - 1.0;
    s += 100.0 * a * a + b * b;
  }
  return s;
}

double step(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) {
    const double f = std::floor(v + 0.5);
    s += f * f;
  }
  return s;
}

double quartic(std::span<const double> x, Rng& rng) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v2 = x[i] * x[i];
    s += static_cast<double>(i + 1) * v2 * v2;
  }
  return s + rng.uniform();
}

double schwefel(std::span<const double> x) {
  double s = 0.0;
  for (double v : x)
    s -= v * std::sin(std::sqrt(std::abs(v)));
  return s;
}

double rastrigin(std::span<const double> x) {
  double s = 0.0;
  for (double v : x)
    s += v * v - 10.0 * std::cos(2.0 * pi * v) + 10.0;
  return s;
}

double ackley(std::span<const double> x) {
  double sq = 0.0, cs = 0.0;
  for (double v : x) {
    sq += v * v;
    cs += std::cos(2.0 * pi * v);
  }
  const double n = static_cast<double>(x.size());
  return -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 + std::numbers::e;
}

double griewank(std::span<const double> x) {
  double sum = 0.0, prod = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += x[i] * x[i];
    prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return sum / 4000.0 - prod + 1.0;
}

double penalty(double x, double a, double k, int m) {
  if (x > a)
    return k * std::pow(x - a, m);
  if (x < -a)
    return k * std::pow(-x - a, m);
  return 0.0;
}

double penalized1(std::span<const double> x) {
  const std::size_t n = x.size();
  auto y = [&](std::size_t i) { return 1.0 + (x[i] + 1.0) / 4.0; };
  const double s0 = std::sin(pi * y(0));
  double s = 10.0 * s0 * s0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double si = std::sin(pi * y(i + 1));
    const double d = y(i) - 1.0;
    s += d * d * (1.0 + 10.0 * si * si);
  }
  const double dn = y(n - 1) - 1.0;
  s += dn * dn;
  double pen = 0.0;
  for (double v : x)
    pen += penalty(v, 10.0, 100.0, 4);
  return pi / static_cast<double>(n) * s + pen;
}

double penalized2(std::span<const double> x) {
  const std::size_t n = x.size();
  const double s0 = std::sin(3.0 * pi * x[0]);
  double s = s0 * s0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double si = std::sin(3.0 * pi * x[i + 1]);
    const double d = x[i] - 1.0;
    s += d * d * (1.0 + si * si);
  }
  const double sn = std::sin(2.0 * pi * x[n - 1]);
  const double dn = x[n - 1] - 1.0;
  s += dn * dn * (1.0 + sn * sn);
  double pen = 0.0;
  for (double v : x)
    pen += penalty(v, 5.0, 100.0, 4);
  return 0.1 * s + pen;
}

double foxholes(std::span<const double> x) {
  static constexpr std::array<double, 5> grid{-32, -16, 0, 16, 32};
  double s = 0.0;
  for (int j = 0; j < 25; ++j) {
    const double a0 = grid[j % 5];
    const double a1 = grid[j / 5];
    s += 1.0 / (j + 1 + std::pow(x[0] - a0, 6) + std::pow(x[1] - a1, 6));
  }
  return 1.0 / (1.0 / 500.0 + s);
}

double kowalik(std::span<const double> x) {
  static constexpr std::array<double, 11> a{0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627,
                                            0.0456, 0.0342, 0.0323, 0.0235, 0.0246};
  static constexpr std::array<double, 11> b_inv{0.25, 0.5, 1, 2, 4, 6, 8, 10, 12, 14, 16};
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double b = 1.0 / b_inv[i];
    const double r = a[i] - x[0] * (b * b + b * x[1]) / (b * b + b * x[2] + x[3]);
    s += r * r;
  }
  return s;
}

double six_hump_camel(std::span<const double> x) {
  const double a = x[0], b = x[1];
  return 4 * a * a - 2.1 * std::pow(a, 4) + std::pow(a, 6) / 3 + a * b - 4 * b * b + 4 * std::pow(b, 4);
}

double branin(std::span<const double> x) {
  const double t = x[1] - 5.1 / (4 * pi * pi) * x[0] * x[0] + 5 / pi * x[0] - 6;
  return t * t + 10 * (1 - 1 / (8 * pi)) * std::cos(x[0]) + 10;
}

double goldstein_price(std::span<const double> x) {
  const double a = x[0], b = x[1];
  const double s1 = a + b + 1;
  const double s2 = 2 * a - 3 * b;
  return (1 + s1 * s1 * (19 - 14 * a + 3 * a * a - 14 * b + 6 * a * b + 3 * b * b)) *
         (30 + s2 * s2 * (18 - 32 * a + 12 * a * a + 48 * b - 36 * a * b + 27 * b * b));
}

constexpr std::array<double, 4> kHartmanC{1.0, 1.2, 3.0, 3.2};

template <std::size_t D>
double hartman(std::span<const double> x, const std::array<std::array<double, D>, 4>& a,
               const std::array<std::array<double, D>, 4>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (std::size_t j = 0; j < D; ++j) {
      const double d = x[j] - p[i][j];
      inner += a[i][j] * d * d;
    }
    s -= kHartmanC[i] * std::exp(-inner);
  }
  return s;
}

double hartman3(std::span<const double> x) {
  static constexpr std::array<std::array<double, 3>, 4> a{{
      {3, 10, 30}, {0.1, 10, 35}, {3, 10, 30}, {0.1, 10, 35}}};
  static constexpr std::array<std::array<double, 3>, 4> p{{
      {0.3689, 0.1170, 0.2673},
      {0.4699, 0.4387, 0.7470},
      {0.1091, 0.8732, 0.5547},
      {0.03815, 0.5743, 0.8828}}};
  return hartman<3>(x, a, p);
}

double hartman6(std::span<const double> x) {
  static constexpr std::array<std::array<double, 6>, 4> a{{
      {10, 3, 17, 3.5, 1.7, 8},
      {0.05, 10, 17, 0.1, 8, 14},
      {3, 3.5, 1.7, 10, 17, 8},
      {17, 8, 0.05, 10, 0.1, 14}}};
  static constexpr std::array<std::array<double, 6>, 4> p{{
      {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
      {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
      {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
      {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}}};
  return hartman<6>(x, a, p);
}

double shekel(std::span<const double> x, std::size_t m) {
  static constexpr std::array<std::array<double, 4>, 10> a{{
      {4, 4, 4, 4}, {1, 1, 1, 1}, {8, 8, 8, 8}, {6, 6, 6, 6}, {3, 7, 3, 7},
      {2, 9, 2, 9}, {5, 5, 3, 3}, {8, 1, 8, 1}, {6, 2, 6, 2}, {7, 3.6, 7, 3.6}}};
  static constexpr std::array<double, 10> c{0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5};
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < 4; ++j)
      d += (x[j] - a[i][j]) * (x[j] - a[i][j]);
    s -= 1.0 / (d + c[i]);
  }
  return s;
}

} // namespace

const std::array<Descriptor, kSuiteSize>& suite() { return kSuite; }

const Descriptor& descriptor(FunctionId id) {
  const int k = static_cast<int>(id);
  if (k < 1 || k > static_cast<int>(kSuiteSize))
    throw LookupError("unknown benchmark id " + std::to_string(k));
  return kSuite[static_cast<std::size_t>(k - 1)];
}

FunctionId parse_id(std::string_view text) {
  std::string_view digits = text;
  if (!digits.empty() && (digits.front() == 'F' || digits.front() == 'f'))
    digits.remove_prefix(1);
  int k = 0;
  if (digits.empty() || digits.size() > 2)
    throw LookupError("unknown benchmark id '" + std::string(text) + "'");
  for (char ch : digits) {
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw LookupError("unknown benchmark id '" + std::string(text) + "'");
    k = k * 10 + (ch - '0');
  }
  if (k < 1 || k > static_cast<int>(kSuiteSize))
    throw LookupError("unknown benchmark id '" + std::string(text) + "'");
  return static_cast<FunctionId>(k);
}

std::string to_string(FunctionId id) { return "F" + std::to_string(static_cast<int>(id)); }

std::string_view to_string(Category c) {
  switch (c) {
  case Category::Unimodal:
    return "unimodal";
  case Category::Multimodal:
    return "multimodal";
  case Category::FixedDimensionMultimodal:
    return "fixed-dimensional-multimodal";
  }
  return "?";
}

double evaluate(FunctionId id, std::span<const double> x, Rng& rng) {
  const Descriptor& d = descriptor(id);
  if (x.size() != d.dims)
    throw DimensionError(to_string(id) + " expects " + std::to_string(d.dims) + " dimensions, got " +
                         std::to_string(x.size()));
  switch (id) {
  case FunctionId::F1: return sphere(x);
  case FunctionId::F2: return schwefel_222(x);
  case FunctionId::F3: return schwefel_12(x);
  case FunctionId::F4: return schwefel_221(x);
  case FunctionId::F5: return rosenbrock(x);
  case FunctionId::F6: return step(x);
  case FunctionId::F7: return quartic(x, rng);
  case FunctionId::F8: return schwefel(x);
  case FunctionId::F9: return rastrigin(x);
  case FunctionId::F10: return ackley(x);
  case FunctionId::F11: return griewank(x);
  case FunctionId::F12: return penalized1(x);
  case FunctionId::F13: return penalized2(x);
  case FunctionId::F14: return foxholes(x);
  case FunctionId::F15: return kowalik(x);
  case FunctionId::F16: return six_hump_camel(x);
  case FunctionId::F17: return branin(x);
  case FunctionId::F18: return goldstein_price(x);
  case FunctionId::F19: return hartman3(x);
  case FunctionId::F20: return hartman6(x);
  case FunctionId::F21: return shekel(x, 5);
  case FunctionId::F22: return shekel(x, 7);
  case FunctionId::F23: return shekel(x, 10);
  }
  throw LookupError("unknown benchmark id");
}

} // namespace agto::bench
