#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "minipic/grid.hpp"

namespace minipic {

/// A particle state violated an internal invariant (e.g. a missed exchange).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Where a particle sits relative to its patch after the push.
enum class ExchangeFlag : std::uint8_t {
  Stay,
  CrossXNeg,
  CrossXPos,
  CrossYNeg,
  CrossYPos,
  CrossCornerNegNeg,
  CrossCornerNegPos,
  CrossCornerPosNeg,
  CrossCornerPosPos,
};

/// sx, sy in {-1, 0, 1}.
ExchangeFlag exchange_flag(int sx, int sy);
int flag_dx(ExchangeFlag flag);
int flag_dy(ExchangeFlag flag);

struct ParticleRecord {
  double x = 0, y = 0;
  double px = 0, py = 0, pz = 0;  // gamma v, momentum per unit species mass [c]
  double weight = 0;
  std::uint64_t id = 0;

  friend bool operator==(const ParticleRecord&, const ParticleRecord&) = default;
};

/// Structure-of-arrays store for one species in one patch. Particles are kept
/// bin-major; within a bin they are ordered by ascending id.
struct ParticleArena {
  double charge = -1.0;
  double mass = 1.0;

  std::vector<double> x, y;
  std::vector<double> px, py, pz;
  std::vector<double> weight;
  std::vector<std::uint64_t> id;
  std::vector<ExchangeFlag> flag;
  std::vector<std::size_t> bin_offsets;  // n_bins + 1 entries

  std::size_t size() const { return x.size(); }
  bool empty() const { return x.empty(); }
  std::size_t n_bins() const { return bin_offsets.empty() ? 0 : bin_offsets.size() - 1; }
  std::size_t bin_begin(std::size_t ibin) const { return bin_offsets[ibin]; }
  std::size_t bin_end(std::size_t ibin) const { return bin_offsets[ibin + 1]; }

  void reserve(std::size_t n);
  void push_back(const ParticleRecord& p);
  ParticleRecord record(std::size_t i) const;
  void clear();

  /// Reorders all per-particle arrays so that new position k holds old perm[k].
  void apply_permutation(const std::vector<std::size_t>& perm);
  /// Keeps only particles with keep[i] true, preserving order. Bin offsets are not updated.
  void compact(const std::vector<std::uint8_t>& keep);
};

/// Geometry needed to bin particles along x inside a patch.
struct BinLayout {
  int cell_x0 = 0;      // first global cell of the patch along x
  int cells_x = 0;      // patch x-extent in cells
  int bin_size = 1;     // bin width in cells
  double inv_dx = 1.0;

  int n_bins() const { return cells_x / bin_size; }
  /// Bin of a particle at x; may lie outside [0, n_bins) for escaped particles.
  int bin_of(double x) const;
};

/// Global cell index containing coordinate x.
inline int cell_of(double x, double inv_dx) { return floor_int(x * inv_dx); }

/// Sorts an arena into bins (bin-major, ascending id within each bin) and
/// rebuilds bin_offsets. Throws InvariantViolation if a particle lies outside
/// the patch x-range.
void sort_into_bins(ParticleArena& arena, const BinLayout& layout);

}  // namespace minipic
