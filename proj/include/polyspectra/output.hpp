#pragma once

#include <map>
#include <string>
#include <vector>

#include "polyspectra/pseudospectrum.hpp"

namespace polyspectra {

/// `x,y,value` rows in field order, 17 significant digits.
std::string field_csv(const ScalarField& field);

/// `curve_id,x,y` rows, curves numbered from 0.
std::string curves_csv(const std::vector<std::vector<Complex>>& curves);

/// Minimal SVG canvas over a window; y grows upwards as in the complex plane.
class SvgPlot {
 public:
  explicit SvgPlot(const Window& window, int width_px = 640);

  void segments(const std::vector<Segment>& segs, const std::string& colour, const std::string& label);
  void polyline(const std::vector<Complex>& points, bool closed, const std::string& colour);
  void plus_markers(const std::vector<Complex>& points);
  void dots(const std::vector<Complex>& points, const std::string& colour);

  std::string str() const;

 private:
  std::string xy(Complex z) const;

  Window window_;
  int width_;
  int height_;
  std::string body_;
};

/// Stroke colour for layer k of a multi-ε plot.
std::string layer_colour(size_t k);

/// Writes every file through a sibling temporary and a rename.
void write_files_atomically(const std::map<std::string, std::string>& files);

}  // namespace polyspectra
