#include "minipic/load_balance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "minipic/domain.hpp"

namespace minipic {

std::uint64_t hilbert_index(std::uint32_t side, std::uint32_t x, std::uint32_t y) {
  std::uint64_t d = 0;
  for (std::uint32_t s = side / 2; s > 0; s /= 2) {
    const std::uint32_t rx = (x & s) ? 1 : 0;
    const std::uint32_t ry = (y & s) ? 1 : 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = side - 1 - x;
        y = side - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

std::vector<int> hilbert_patch_order(int patches_x, int patches_y) {
  std::uint32_t side = 1;
  while (side < static_cast<std::uint32_t>(std::max(patches_x, patches_y))) side *= 2;
  std::vector<std::pair<std::uint64_t, int>> keyed;
  keyed.reserve(static_cast<std::size_t>(patches_x) * patches_y);
  for (int iy = 0; iy < patches_y; ++iy)
    for (int ix = 0; ix < patches_x; ++ix)
      keyed.emplace_back(hilbert_index(side, ix, iy), iy * patches_x + ix);
  std::sort(keyed.begin(), keyed.end());
  std::vector<int> order;
  order.reserve(keyed.size());
  for (const auto& [key, id] : keyed) order.push_back(id);
  return order;
}

std::vector<int> greedy_prefix_partition(const std::vector<double>& loads, int n_parts) {
  const std::size_t n = loads.size();
  std::vector<int> part(n, 0);
  if (n_parts <= 1 || n == 0) return part;

  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + loads[i];
  const double total = prefix[n];
  const bool need_nonempty = n >= static_cast<std::size_t>(n_parts);

  // cut[k] = first element of segment k
  std::vector<std::size_t> cut(static_cast<std::size_t>(n_parts) + 1, 0);
  cut[n_parts] = n;
  for (int k = 1; k < n_parts; ++k) {
    const double target = total * k / n_parts;
    // first prefix index whose value reaches the target
    std::size_t c = static_cast<std::size_t>(
        std::lower_bound(prefix.begin(), prefix.end(), target) - prefix.begin());
    c = std::min(c, n);
    if (c > 0 && std::abs(prefix[c - 1] - target) <= std::abs(prefix[c] - target)) --c;
    if (need_nonempty) {
      const std::size_t lo = cut[k - 1] + 1;
      const std::size_t hi = n - static_cast<std::size_t>(n_parts - k);
      c = std::clamp(c, lo, hi);
    } else {
      c = std::max(c, cut[k - 1]);
    }
    cut[k] = c;
  }
  for (int k = 0; k < n_parts; ++k)
    for (std::size_t i = cut[k]; i < cut[k + 1]; ++i) part[i] = k;
  return part;
}

double LoadReport::imbalance() const {
  if (collection_load.empty()) return 1.0;
  const double total = std::accumulate(collection_load.begin(), collection_load.end(), 0.0);
  const double mean = total / static_cast<double>(collection_load.size());
  if (mean <= 0.0) return 1.0;
  return *std::max_element(collection_load.begin(), collection_load.end()) / mean;
}

double imbalance_for(const std::vector<double>& patch_load, const std::vector<int>& owner,
                     int n_collections) {
  LoadReport r;
  r.collection_load.assign(static_cast<std::size_t>(n_collections), 0.0);
  for (std::size_t p = 0; p < patch_load.size(); ++p) r.collection_load[owner[p]] += patch_load[p];
  return r.imbalance();
}

LoadReport compute_loads(const Domain& domain, double cell_weight) {
  LoadReport r;
  r.cell_weight = cell_weight;
  r.patch_load.resize(static_cast<std::size_t>(domain.n_patches()));
  r.collection_load.assign(static_cast<std::size_t>(domain.n_collections()), 0.0);
  for (int id = 0; id < domain.n_patches(); ++id) {
    const Patch& p = domain.patch(id);
    const double load = static_cast<double>(p.particle_count()) +
                        cell_weight * static_cast<double>(p.geom.nx) * p.geom.ny;
    r.patch_load[id] = load;
    r.collection_load[p.owner_collection] += load;
  }
  return r;
}

std::vector<int> rebalance(Domain& domain, const LoadReport& report) {
  const int n_coll = domain.n_collections();
  std::vector<int> current = domain.owners();
  if (n_coll < 2) return current;

  const auto& curve = domain.curve();
  std::vector<double> along(curve.size());
  for (std::size_t k = 0; k < curve.size(); ++k) along[k] = report.patch_load[curve[k]];
  const std::vector<int> segment = greedy_prefix_partition(along, n_coll);

  std::vector<int> proposed(current.size());
  for (std::size_t k = 0; k < curve.size(); ++k) proposed[curve[k]] = segment[k];

  if (imbalance_for(report.patch_load, proposed, n_coll) <=
      imbalance_for(report.patch_load, current, n_coll)) {
    domain.assign_owners(proposed);
    return proposed;
  }
  return current;
}

}  // namespace minipic
