#pragma once

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "levyrd/spectral.hpp"

namespace levyrd {

// Cadlag trajectory sampled at grid times plus jump times.  The stored state
// at a jump time is the right limit; between records the path is treated as
// constant (step interpolation), which is exact for the frozen-coefficient
// scheme up to the recording resolution.
struct PathRecord {
  std::vector<double> times;
  std::vector<SpectralField> states;
  bool cadlag = true;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  double horizon() const { return times.empty() ? 0.0 : times.back(); }

  void push(double t, SpectralField s) {
    if (!times.empty() && !(t > times.back()))
      throw std::invalid_argument("PathRecord: times must be strictly increasing");
    times.push_back(t);
    states.push_back(std::move(s));
  }

  // Replace the state at an existing time (used when a jump lands exactly on
  // a recorded grid time: the grid state is recorded first, then the jump
  // overwrites it with the right limit).
  void replace_back(SpectralField s) { states.back() = std::move(s); }

  // Index of the last record with time <= t.
  std::size_t index_at(double t) const {
    if (empty() || t < times.front())
      throw std::out_of_range("PathRecord: time before first record");
    auto it = std::upper_bound(times.begin(), times.end(), t);
    return static_cast<std::size_t>(it - times.begin()) - 1;
  }

  const SpectralField& state_at(double t) const { return states[index_at(t)]; }

  void write_csv(std::ostream& os) const {
    os.precision(17);
    os << "t";
    int n = states.empty() ? 0 : states.front().modes();
    for (int i = 1; i <= n; ++i) os << ",c_" << i;
    os << '\n';
    for (std::size_t k = 0; k < times.size(); ++k) {
      os << times[k];
      for (double c : states[k].c) os << ',' << c;
      os << '\n';
    }
  }
};

// Pointwise difference path on the merged time partition of two records.
inline PathRecord path_difference(const PathRecord& a, const PathRecord& b) {
  PathRecord d;
  std::vector<double> merged;
  merged.reserve(a.times.size() + b.times.size());
  merged.insert(merged.end(), a.times.begin(), a.times.end());
  merged.insert(merged.end(), b.times.begin(), b.times.end());
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  for (double t : merged) {
    if (t < a.times.front() || t < b.times.front()) continue;
    d.push(t, a.state_at(t) - b.state_at(t));
  }
  return d;
}

}  // namespace levyrd
