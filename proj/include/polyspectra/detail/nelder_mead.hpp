#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace polyspectra {

template <typename F>
Complex nelder_mead(F&& f, Complex start, double size, int max_iterations) {
  struct Vertex {
    Complex z;
    double v;
  };
  std::array<Vertex, 3> s{{{start, f(start)},
                           {start + Complex(size, 0.0), f(start + Complex(size, 0.0))},
                           {start + Complex(0.0, size), f(start + Complex(0.0, size))}}};
  auto by_value = [](const Vertex& a, const Vertex& b) { return a.v < b.v; };

  for (int it = 0; it < max_iterations; ++it) {
    std::sort(s.begin(), s.end(), by_value);
    const double extent = std::max(std::abs(s[1].z - s[0].z), std::abs(s[2].z - s[0].z));
    if (extent <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(s[0].z))) break;

    const Complex centroid = 0.5 * (s[0].z + s[1].z);
    const Complex r = centroid + (centroid - s[2].z);
    const double fr = f(r);
    if (fr < s[0].v) {
      const Complex e = centroid + 2.0 * (centroid - s[2].z);
      const double fe = f(e);
      s[2] = fe < fr ? Vertex{e, fe} : Vertex{r, fr};
    } else if (fr < s[1].v) {
      s[2] = {r, fr};
    } else {
      const bool outside = fr < s[2].v;
      const Complex c = outside ? centroid + 0.5 * (r - centroid) : centroid + 0.5 * (s[2].z - centroid);
      const double fc = f(c);
      if (fc < std::min(fr, s[2].v)) {
        s[2] = {c, fc};
      } else {
        for (int k = 1; k < 3; ++k) {
          s[k].z = s[0].z + 0.5 * (s[k].z - s[0].z);
          s[k].v = f(s[k].z);
        }
      }
    }
  }
  return std::min_element(s.begin(), s.end(), by_value)->z;
}

}  // namespace polyspectra
