#include "ree/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ree {

namespace {

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          const std::vector<double>& start, const SimplexOptions& options) {
  const std::size_t dim = start.size();
  const std::size_t count = dim + 1;

  std::vector<std::vector<double>> xs(count, start);
  for (std::size_t k = 0; k < dim; ++k) xs[k + 1][k] += options.initial_step;
  std::vector<double> fs(count);
  for (std::size_t i = 0; i < count; ++i) fs[i] = objective(xs[i]);

  std::vector<std::size_t> order(count);
  auto sort_order = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
  };

  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  SimplexResult result;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    sort_order();
    const std::size_t best = order[0];
    const std::size_t worst = order[count - 1];
    const std::size_t second_worst = order[count - 2];

    double diameter = 0.0;
    for (std::size_t i = 0; i < count; ++i)
      diameter = std::max(diameter, distance(xs[i], xs[best]));
    if (diameter <= options.diameter_tol) {
      result.converged = true;
      result.diameter = diameter;
      break;
    }
    result.diameter = diameter;

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += xs[i][k];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    std::vector<double> reflected(dim);
    for (std::size_t k = 0; k < dim; ++k)
      reflected[k] = centroid[k] + kReflect * (centroid[k] - xs[worst][k]);
    const double f_reflected = objective(reflected);

    if (f_reflected < fs[best]) {
      std::vector<double> expanded(dim);
      for (std::size_t k = 0; k < dim; ++k)
        expanded[k] = centroid[k] + kExpand * (centroid[k] - xs[worst][k]);
      const double f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        xs[worst] = std::move(expanded);
        fs[worst] = f_expanded;
      } else {
        xs[worst] = std::move(reflected);
        fs[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < fs[second_worst]) {
      xs[worst] = std::move(reflected);
      fs[worst] = f_reflected;
      continue;
    }

    std::vector<double> contracted(dim);
    if (f_reflected < fs[worst]) {
      for (std::size_t k = 0; k < dim; ++k)
        contracted[k] = centroid[k] + kContract * (reflected[k] - centroid[k]);
      const double f_contracted = objective(contracted);
      if (f_contracted <= f_reflected) {
        xs[worst] = std::move(contracted);
        fs[worst] = f_contracted;
        continue;
      }
    } else {
      for (std::size_t k = 0; k < dim; ++k)
        contracted[k] = centroid[k] + kContract * (xs[worst][k] - centroid[k]);
      const double f_contracted = objective(contracted);
      if (f_contracted < fs[worst]) {
        xs[worst] = std::move(contracted);
        fs[worst] = f_contracted;
        continue;
      }
    }

    for (std::size_t i = 0; i < count; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < dim; ++k)
        xs[i][k] = xs[best][k] + kShrink * (xs[i][k] - xs[best][k]);
      fs[i] = objective(xs[i]);
    }
  }

  sort_order();
  result.x = xs[order[0]];
  result.value = fs[order[0]];
  result.iterations = iter;
  return result;
}

}  // namespace ree
