#include "martvar/common.hpp"

#include <cmath>
#include <cstdio>

namespace martvar {

double stable_sum(const double* data, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  std::size_t half = n / 2;
  return stable_sum(data, half) + stable_sum(data + half, n - half);
}

double stable_sum(const std::vector<double>& v) { return stable_sum(v.data(), v.size()); }

double Rng::exponential() {
  // 1 - uniform() is in (0,1], so the log is finite.
  return -std::log(1.0 - uniform());
}

std::vector<double> Rng::dirichlet(std::size_t n) {
  std::vector<double> out(n);
  double total = 0.0;
  for (auto& x : out) {
    x = exponential();
    total += x;
  }
  for (auto& x : out) x /= total;
  return out;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace martvar
