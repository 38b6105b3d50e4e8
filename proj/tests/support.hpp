#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace logan::testing {

using Matrix = Eigen::MatrixXd;

/// Random DAG on dim nodes with weights in +-[0.2, 2], under a random node
/// permutation so that the support is not always lower-triangular.
inline Matrix random_dag(std::mt19937_64& rng, int dim, double density, bool permute = true) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> size(0.2, 2.0);
  std::vector<int> order(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) order[static_cast<std::size_t>(i)] = i;
  if (permute) std::shuffle(order.begin(), order.end(), rng);
  Matrix w = Matrix::Zero(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < a; ++b)
      if (unit(rng) < density) {
        const double s = unit(rng) < 0.5 ? -1.0 : 1.0;
        w(order[static_cast<std::size_t>(a)], order[static_cast<std::size_t>(b)]) = s * size(rng);
      }
  return w;
}

/// Signed effects cancel, max-min paths do not: E=0, M1..M3, Y=4 with edges
/// 0->2 (1), 2->3 (-1), 2->4 (-1), 3->4 (-1). M1 is isolated.
inline Matrix cancelling_graph() {
  Matrix w = Matrix::Zero(5, 5);
  w(2, 0) = 1.0;
  w(3, 2) = -1.0;
  w(4, 2) = -1.0;
  w(4, 3) = -1.0;
  return w;
}

/// Sets an environment variable for the lifetime of the guard.
class EnvGuard {
 public:
  EnvGuard(const char* name, const std::string& value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old, had_ = true;
    ::setenv(name, value.c_str(), 1);
  }
  ~EnvGuard() {
    if (had_) ::setenv(name_, old_.c_str(), 1);
    else ::unsetenv(name_);
  }
  EnvGuard(const EnvGuard&) = delete;
  EnvGuard& operator=(const EnvGuard&) = delete;

 private:
  const char* name_;
  std::string old_;
  bool had_ = false;
};

}  // namespace logan::testing

namespace logan::testing {

struct OraclePaths {
  bool exists = false;
  double bottleneck = 0.0;  // max over paths of min |edge|
  std::vector<std::vector<int>> paths;
};

/// Iterative enumeration of simple paths src -> dst; edge a -> b iff w(b, a) != 0.
inline OraclePaths enumerate_paths(const Matrix& w, int src, int dst) {
  OraclePaths out;
  const int dim = static_cast<int>(w.rows());
  if (src == dst) return out;
  struct Frame {
    std::vector<int> path;
    double weakest;
  };
  std::vector<Frame> stack{{{src}, 1e300}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const int at = f.path.back();
    if (at == dst) {
      out.exists = true;
      out.bottleneck = std::max(out.bottleneck, f.weakest);
      out.paths.push_back(f.path);
      continue;
    }
    for (int next = 0; next < dim; ++next) {
      if (w(next, at) == 0.0) continue;
      if (std::find(f.path.begin(), f.path.end(), next) != f.path.end()) continue;
      Frame g{f.path, std::min(f.weakest, std::abs(w(next, at)))};
      g.path.push_back(next);
      stack.push_back(std::move(g));
    }
  }
  return out;
}

}  // namespace logan::testing
