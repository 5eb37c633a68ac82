// Serial, table-free versions of the kernels. They compute the same numbers
// by a different route (dynamic programming over the walk instead of the
// reflection count) and stay deliberately naive.

#include <vector>

#include "bsc/kernels.hpp"

namespace bsc::kernels::reference {

std::vector<double> first_passage(int length, int level, const Walk& walk) {
  std::vector<double> g(static_cast<std::size_t>(std::max(length, 0)), 0.0);
  for (int m = 0; m < length; ++m) g[m] = first_emptiness_prob(m, level, walk.p, walk.q);
  return g;
}

std::vector<double> conditioned_early_row(int file_size, int offset, int arrivals, int departures,
                                          const Walk& walk) {
  std::vector<double> row(static_cast<std::size_t>(file_size) + 1, 0.0);
  const int level = arrivals - departures;
  const int missing = offset - 1 - arrivals;
  if (level < 1 || missing < 1) return row;

  // alive[u][d]: probability of u arrivals and d departures with the buffer
  // never emptied (and fewer than `missing` arrivals so far).
  const int max_d = level + missing - 1;
  std::vector<std::vector<double>> alive(missing, std::vector<double>(max_d + 1, 0.0));
  alive[0][0] = 1.0;
  for (int u = 0; u < missing; ++u) {
    for (int d = 0; d <= max_d; ++d) {
      const double mass = alive[u][d];
      if (mass == 0.0) continue;
      if (u + 1 < missing) alive[u + 1][d] += mass * walk.p;
      if (level + u - (d + 1) >= 1 && d + 1 <= max_d) alive[u][d + 1] += mass * walk.q;
    }
  }

  for (int to = departures + 1; to < file_size; ++to) {
    if (to <= offset - 2) {
      row[to] = first_emptiness_prob(to - departures, level, walk.p, walk.q);
    } else if (to >= 2 * offset - 2) {
      double acc = 0.0;
      for (int i = 0; i <= max_d; ++i) {
        const double reach = alive[missing - 1][i] * walk.p;
        if (reach == 0.0) continue;
        acc += reach * first_emptiness_prob(to - departures - i, 2 * offset - 2 - departures - i,
                                            walk.p, walk.q);
      }
      row[to] = acc;
    }
  }
  return row;
}

void propagate(std::span<const double> in, const TransitionKernel& kernel, std::span<double> out) {
  const int n = kernel.file_size();
  for (int to = 0; to <= n; ++to) {
    double acc = 0.0;
    for (int from = 0; from <= n; ++from) acc += in[from] * kernel.at(from, to);
    out[to] = acc;
  }
}

}  // namespace bsc::kernels::reference
