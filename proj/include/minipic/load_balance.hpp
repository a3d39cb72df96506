#pragma once

#include <cstdint>
#include <vector>

namespace minipic {

class Domain;

/// Position of (x, y) along the Hilbert curve filling a side x side square;
/// side must be a power of two.
std::uint64_t hilbert_index(std::uint32_t side, std::uint32_t x, std::uint32_t y);

/// Patch ids (iy * patches_x + ix) sorted along the Hilbert curve of the
/// smallest enclosing power-of-two square.
std::vector<int> hilbert_patch_order(int patches_x, int patches_y);

/// Cuts a sequence of loads into n_parts contiguous segments, placing each cut
/// at the prefix sum closest to k / n_parts of the total. Every segment gets at
/// least one element when loads.size() >= n_parts. Returns the segment index of
/// every element.
std::vector<int> greedy_prefix_partition(const std::vector<double>& loads, int n_parts);

struct LoadReport {
  std::vector<double> patch_load;       // indexed by patch id
  std::vector<double> collection_load;  // indexed by collection
  double cell_weight = 0.0;

  double imbalance() const;  // max / mean over collections
};

/// Load of a patch = macro-particle count + cell_weight * cells.
LoadReport compute_loads(const Domain& domain, double cell_weight);

/// max / mean of the per-collection totals implied by owner[] on the given patch loads.
double imbalance_for(const std::vector<double>& patch_load, const std::vector<int>& owner,
                     int n_collections);

/// Re-partitions patches along the Hilbert curve so that collection loads are
/// as equal as the greedy cut allows. The new partition is only adopted when
/// its imbalance does not exceed the current one. Returns the owner of every
/// patch after the call.
std::vector<int> rebalance(Domain& domain, const LoadReport& report);

}  // namespace minipic
