#pragma once

#include <functional>
#include <vector>

namespace ree {

// Derivative-free Nelder-Mead descent. Infeasible points signal +infinity;
// candidate ordering breaks ties by insertion index, so runs are
// deterministic for identical inputs.
struct SimplexOptions {
  int max_iterations = 2000;
  double diameter_tol = 1e-9;
  double initial_step = 0.1;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  double diameter = 0.0;
  bool converged = false;
};

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          const std::vector<double>& start, const SimplexOptions& options);

}  // namespace ree
