// Copyright 2026 The AAI Toolkit Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "svg_plot.hpp"

#include <algorithm>
#include <sstream>

#include "aai/io.hpp"

namespace aai {
namespace {

constexpr double kWidth = 900.0;
constexpr double kRowHeight = 160.0;
constexpr double kMarginX = 50.0;
constexpr double kMarginY = 26.0;

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(2);
  out << std::fixed << v;
  return out.str();
}

void append_panel(std::ostringstream& out, double y0, const std::string& title,
                  const std::vector<PlotSeries>& series) {
  double lo = 0.0, hi = 1.0;
  bool first = true;
  for (const PlotSeries& s : series) {
    for (long i = 0; i < s.values->size(); ++i) {
      const double v = (*s.values)[i];
      if (first) {
        lo = hi = v;
        first = false;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi - lo < 1e-9) hi = lo + 1.0;
  const double plot_w = kWidth - 2.0 * kMarginX;
  const double plot_h = kRowHeight - 2.0 * kMarginY;
  out << "<rect x='" << kMarginX << "' y='" << y0 + kMarginY << "' width='"
      << plot_w << "' height='" << plot_h
      << "' fill='none' stroke='#999' stroke-width='1'/>\n";
  out << "<text x='" << kMarginX << "' y='" << y0 + kMarginY - 8.0
      << "' font-size='12' font-family='sans-serif'>" << title << "</text>\n";
  out << "<text x='" << kWidth - kMarginX << "' y='" << y0 + kMarginY - 8.0
      << "' font-size='10' font-family='sans-serif' text-anchor='end'>["
      << fmt(lo) << ", " << fmt(hi) << "]</text>\n";
  for (const PlotSeries& s : series) {
    const long n = s.values->size();
    if (n < 2) continue;
    out << "<polyline fill='none' stroke='" << s.color
        << "' stroke-width='1' points='";
    for (long i = 0; i < n; ++i) {
      const double x =
          kMarginX + plot_w * static_cast<double>(i) /
                         static_cast<double>(n - 1);
      const double y = y0 + kMarginY + plot_h -
                       plot_h * ((*s.values)[i] - lo) / (hi - lo);
      out << fmt(x) << ',' << fmt(y) << ' ';
    }
    out << "'/>\n";
  }
  double lx = kMarginX + 8.0;
  for (const PlotSeries& s : series) {
    out << "<line x1='" << lx << "' y1='" << y0 + kRowHeight - 10.0
        << "' x2='" << lx + 18.0 << "' y2='" << y0 + kRowHeight - 10.0
        << "' stroke='" << s.color << "' stroke-width='2'/>\n";
    out << "<text x='" << lx + 22.0 << "' y='" << y0 + kRowHeight - 6.0
        << "' font-size='10' font-family='sans-serif'>" << s.label
        << "</text>\n";
    lx += 110.0;
  }
}

}  // namespace

void write_channel_svg(const std::filesystem::path& path,
                       const std::string& title,
                       const std::vector<PlotSeries>& series) {
  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth
      << "' height='" << kRowHeight << "'>\n";
  append_panel(out, 0.0, title, series);
  out << "</svg>\n";
  write_text_file(path, out.str());
}

void write_combined_svg(const std::filesystem::path& path,
                        const std::string& title,
                        const std::vector<std::string>& channel_names,
                        const Matrix& target, const Matrix& raw,
                        const Matrix& smoothed) {
  const long channels = target.cols();
  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth
      << "' height='" << kRowHeight * static_cast<double>(channels) + 20.0
      << "'>\n";
  out << "<text x='" << kMarginX << "' y='14' font-size='13' "
      << "font-family='sans-serif'>" << title << "</text>\n";
  for (long c = 0; c < channels; ++c) {
    const Vector t = target.col(c);
    const Vector r = raw.col(c);
    const Vector s = smoothed.col(c);
    append_panel(out, 20.0 + kRowHeight * static_cast<double>(c),
                 channel_names[static_cast<std::size_t>(c)],
                 {{"target", "#000000", &t},
                  {"raw", "#d08000", &r},
                  {"smoothed", "#1060c0", &s}});
  }
  out << "</svg>\n";
  write_text_file(path, out.str());
}

}  // namespace aai
