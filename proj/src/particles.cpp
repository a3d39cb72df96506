#include "minipic/particles.hpp"

#include <algorithm>
#include <sstream>

namespace minipic {

ExchangeFlag exchange_flag(int sx, int sy) {
  if (sx == 0 && sy == 0) return ExchangeFlag::Stay;
  if (sy == 0) return sx < 0 ? ExchangeFlag::CrossXNeg : ExchangeFlag::CrossXPos;
  if (sx == 0) return sy < 0 ? ExchangeFlag::CrossYNeg : ExchangeFlag::CrossYPos;
  if (sx < 0) return sy < 0 ? ExchangeFlag::CrossCornerNegNeg : ExchangeFlag::CrossCornerNegPos;
  return sy < 0 ? ExchangeFlag::CrossCornerPosNeg : ExchangeFlag::CrossCornerPosPos;
}

int flag_dx(ExchangeFlag flag) {
  switch (flag) {
    case ExchangeFlag::CrossXNeg:
    case ExchangeFlag::CrossCornerNegNeg:
    case ExchangeFlag::CrossCornerNegPos:
      return -1;
    case ExchangeFlag::CrossXPos:
    case ExchangeFlag::CrossCornerPosNeg:
    case ExchangeFlag::CrossCornerPosPos:
      return 1;
    default:
      return 0;
  }
}

int flag_dy(ExchangeFlag flag) {
  switch (flag) {
    case ExchangeFlag::CrossYNeg:
    case ExchangeFlag::CrossCornerNegNeg:
    case ExchangeFlag::CrossCornerPosNeg:
      return -1;
    case ExchangeFlag::CrossYPos:
    case ExchangeFlag::CrossCornerNegPos:
    case ExchangeFlag::CrossCornerPosPos:
      return 1;
    default:
      return 0;
  }
}

void ParticleArena::reserve(std::size_t n) {
  x.reserve(n);
  y.reserve(n);
  px.reserve(n);
  py.reserve(n);
  pz.reserve(n);
  weight.reserve(n);
  id.reserve(n);
  flag.reserve(n);
}

void ParticleArena::push_back(const ParticleRecord& p) {
  x.push_back(p.x);
  y.push_back(p.y);
  px.push_back(p.px);
  py.push_back(p.py);
  pz.push_back(p.pz);
  weight.push_back(p.weight);
  id.push_back(p.id);
  flag.push_back(ExchangeFlag::Stay);
}

ParticleRecord ParticleArena::record(std::size_t i) const {
  return {x[i], y[i], px[i], py[i], pz[i], weight[i], id[i]};
}

void ParticleArena::clear() {
  x.clear();
  y.clear();
  px.clear();
  py.clear();
  pz.clear();
  weight.clear();
  id.clear();
  flag.clear();
  std::fill(bin_offsets.begin(), bin_offsets.end(), 0);
}

namespace {

template <class T>
void permute(std::vector<T>& v, const std::vector<std::size_t>& perm, std::vector<T>& scratch) {
  scratch.resize(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) scratch[k] = v[perm[k]];
  v.swap(scratch);
}

template <class T>
void keep_if(std::vector<T>& v, const std::vector<std::uint8_t>& keep, std::size_t first) {
  std::size_t out = first;
  for (std::size_t i = first; i < v.size(); ++i)
    if (keep[i]) v[out++] = v[i];
  v.resize(out);
}

}  // namespace

void ParticleArena::apply_permutation(const std::vector<std::size_t>& perm) {
  std::vector<double> scratch;
  permute(x, perm, scratch);
  permute(y, perm, scratch);
  permute(px, perm, scratch);
  permute(py, perm, scratch);
  permute(pz, perm, scratch);
  permute(weight, perm, scratch);
  std::vector<std::uint64_t> ids;
  permute(id, perm, ids);
  std::vector<ExchangeFlag> flags;
  permute(flag, perm, flags);
}

void ParticleArena::compact(const std::vector<std::uint8_t>& keep) {
  const std::size_t first =
      static_cast<std::size_t>(std::find(keep.begin(), keep.end(), 0) - keep.begin());
  keep_if(x, keep, first);
  keep_if(y, keep, first);
  keep_if(px, keep, first);
  keep_if(py, keep, first);
  keep_if(pz, keep, first);
  keep_if(weight, keep, first);
  keep_if(id, keep, first);
  keep_if(flag, keep, first);
}

int BinLayout::bin_of(double xpos) const {
  const int local = cell_of(xpos, inv_dx) - cell_x0;
  // floor division so that escaped particles left of the patch map to negative bins
  return local >= 0 ? local / bin_size : -((-local + bin_size - 1) / bin_size);
}

void sort_into_bins(ParticleArena& arena, const BinLayout& layout) {
  const int n_bins = layout.n_bins();
  const std::size_t n = arena.size();
  arena.bin_offsets.assign(static_cast<std::size_t>(n_bins) + 1, 0);

  std::vector<int> bin(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int b = layout.bin_of(arena.x[i]);
    if (b < 0 || b >= n_bins) {
      std::ostringstream os;
      os << "particle " << arena.id[i] << " at x=" << arena.x[i]
         << " lies outside the patch x-range (missed exchange)";
      throw InvariantViolation(os.str());
    }
    bin[i] = b;
    ++arena.bin_offsets[static_cast<std::size_t>(b) + 1];
  }
  for (int b = 0; b < n_bins; ++b) arena.bin_offsets[b + 1] += arena.bin_offsets[b];

  // Stable counting sort by bin.
  std::vector<std::size_t> cursor(arena.bin_offsets.begin(), arena.bin_offsets.end() - 1);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[cursor[bin[i]]++] = i;

  // Each bin is now a concatenation of a few id-ascending runs; merge them.
  bool identity = true;
  const auto by_id = [&](std::size_t a, std::size_t b) { return arena.id[a] < arena.id[b]; };
  for (int b = 0; b < n_bins; ++b) {
    const auto first = perm.begin() + static_cast<std::ptrdiff_t>(arena.bin_offsets[b]);
    const auto last = perm.begin() + static_cast<std::ptrdiff_t>(arena.bin_offsets[b + 1]);
    auto run_start = first;
    for (auto it = first; it != last;) {
      auto run_end = std::is_sorted_until(it, last, by_id);
      if (run_start != it) std::inplace_merge(run_start, it, run_end, by_id);
      it = run_end;
    }
  }
  for (std::size_t k = 0; k < n && identity; ++k) identity = perm[k] == k;
  if (!identity) arena.apply_permutation(perm);
}

}  // namespace minipic
