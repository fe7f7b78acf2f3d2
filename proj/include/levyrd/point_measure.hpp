#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "levyrd/util.hpp"

namespace levyrd {

struct ScalarMark {
  double z;
};
struct SpectralMark {
  int mode;  // 1-based eigenmode index
  double z;
};
struct SpaceTimeMark {
  double xi;
  double zeta;
};

inline void write_mark_header(std::ostream& os, ScalarMark) { os << "t,z\n"; }
inline void write_mark_header(std::ostream& os, SpectralMark) { os << "t,i,z\n"; }
inline void write_mark_header(std::ostream& os, SpaceTimeMark) { os << "t,xi,zeta\n"; }

inline void write_mark(std::ostream& os, const ScalarMark& m) { os << m.z; }
inline void write_mark(std::ostream& os, const SpectralMark& m) {
  os << m.mode << ',' << m.z;
}
inline void write_mark(std::ostream& os, const SpaceTimeMark& m) {
  os << m.xi << ',' << m.zeta;
}

// Finite realization of a Poisson random measure on a time window (0, T]:
// atoms (t_k, z_k) with strictly increasing times.
template <class Mark>
struct PointMeasure {
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::string measure_descriptor;
  std::vector<std::pair<double, Mark>> atoms;

  std::size_t size() const { return atoms.size(); }

  // Number of atoms with time in (a, b] and mark satisfying pred.
  template <class Pred>
  std::size_t count(double a, double b, Pred&& pred) const {
    std::size_t n = 0;
    for (const auto& [t, m] : atoms)
      if (t > a && t <= b && pred(m)) ++n;
    return n;
  }
  std::size_t count(double a, double b) const {
    return count(a, b, [](const Mark&) { return true; });
  }

  void validate() const {
    double prev = 0.0;
    for (const auto& [t, m] : atoms) {
      if (!(t > prev))
        throw NumericError("PointMeasure: atom times must be strictly increasing in (0,T]");
      if (t > horizon) throw NumericError("PointMeasure: atom beyond horizon");
      prev = t;
    }
  }

  void write_csv(std::ostream& os) const {
    os.precision(17);
    os << "# levyrd point-measure v1 nu=" << measure_descriptor
       << " T=" << horizon << " seed=" << seed << "\n";
    write_mark_header(os, Mark{});
    for (const auto& [t, m] : atoms) {
      os << t << ',';
      write_mark(os, m);
      os << '\n';
    }
  }
};

}  // namespace levyrd
