#include "polyspectra/output.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace polyspectra {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string field_csv(const ScalarField& field) {
  const GridSpec& g = field.grid;
  std::string out = "x,y,value\n";
  out.reserve(out.size() + g.size() * 64);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Complex z = g.point(i, j);
      out += fmt17(z.real()) + "," + fmt17(z.imag()) + "," + fmt17(field.at(i, j)) + "\n";
    }
  }
  return out;
}

std::string curves_csv(const std::vector<std::vector<Complex>>& curves) {
  std::string out = "curve_id,x,y\n";
  for (size_t c = 0; c < curves.size(); ++c) {
    for (auto z : curves[c]) out += std::to_string(c) + "," + fmt17(z.real()) + "," + fmt17(z.imag()) + "\n";
  }
  return out;
}

SvgPlot::SvgPlot(const Window& window, int width_px) : window_(window), width_(width_px) {
  window_.validate();
  const double aspect = (window.y_max - window.y_min) / (window.x_max - window.x_min);
  height_ = std::max(1, static_cast<int>(std::lround(width_px * aspect)));
}

std::string SvgPlot::xy(Complex z) const {
  const double x = (z.real() - window_.x_min) / (window_.x_max - window_.x_min) * width_;
  const double y = (window_.y_max - z.imag()) / (window_.y_max - window_.y_min) * height_;
  return fmt6(x) + " " + fmt6(y);
}

void SvgPlot::segments(const std::vector<Segment>& segs, const std::string& colour, const std::string& label) {
  body_ += "<path class=\"contour\" data-label=\"" + label + "\" fill=\"none\" stroke=\"" + colour +
           "\" stroke-width=\"1\" d=\"";
  for (const auto& s : segs) body_ += "M" + xy(s.a) + "L" + xy(s.b);
  body_ += "\"/>\n";
}

void SvgPlot::polyline(const std::vector<Complex>& points, bool closed, const std::string& colour) {
  if (points.empty()) return;
  body_ += std::string("<") + (closed ? "polygon" : "polyline") + " fill=\"none\" stroke=\"" + colour +
           "\" stroke-width=\"1\" points=\"";
  for (size_t k = 0; k < points.size(); ++k) body_ += (k ? " " : "") + xy(points[k]);
  body_ += "\"/>\n";
}

void SvgPlot::plus_markers(const std::vector<Complex>& points) {
  constexpr double kArm = 5.0;
  for (auto z : points) {
    const double x = (z.real() - window_.x_min) / (window_.x_max - window_.x_min) * width_;
    const double y = (window_.y_max - z.imag()) / (window_.y_max - window_.y_min) * height_;
    body_ += "<path class=\"eigenvalue\" stroke=\"black\" stroke-width=\"1.5\" d=\"M" + fmt6(x - kArm) + " " +
             fmt6(y) + "H" + fmt6(x + kArm) + "M" + fmt6(x) + " " + fmt6(y - kArm) + "V" + fmt6(y + kArm) +
             "\"/>\n";
  }
}

void SvgPlot::dots(const std::vector<Complex>& points, const std::string& colour) {
  for (auto z : points) {
    const std::string p = xy(z);
    const auto space = p.find(' ');
    body_ += "<circle cx=\"" + p.substr(0, space) + "\" cy=\"" + p.substr(space + 1) + "\" r=\"1.5\" fill=\"" +
             colour + "\"/>\n";
  }
}

std::string SvgPlot::str() const {
  const std::string w = std::to_string(width_);
  const std::string h = std::to_string(height_);
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!-- polyspectra " POLYSPECTRA_VERSION
         " -->\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         w + "\" height=\"" + h + "\" viewBox=\"0 0 " + w + " " + h +
         "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
}

std::string layer_colour(size_t k) {
  static const std::array<const char*, 8> palette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                  "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  return palette[k % palette.size()];
}

void write_files_atomically(const std::map<std::string, std::string>& files) {
  namespace fs = std::filesystem;
  std::vector<std::pair<fs::path, fs::path>> staged;
  for (const auto& [path, content] : files) {
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    staged.emplace_back(tmp, target);
  }
  for (const auto& [tmp, target] : staged) fs::rename(tmp, target);
}

}  // namespace polyspectra
