#include "fbgreedy/harness.hpp"

#include "fbgreedy/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace fbgreedy {

namespace {

constexpr double kWidth = 560, kHeight = 400;
constexpr double kLeft = 70, kRight = 130, kTop = 30, kBottom = 60;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

const char* color_of(Method m) { return m == Method::greedy ? "#1f77b4" : "#d62728"; }

}  // namespace

std::string render_plot(const SweepResult& sweep) {
  if (sweep.points.empty()) throw InvalidArgument("plot needs at least one sweep point");
  std::map<Method, std::vector<const SweepPoint*>> series;
  double x_hi = 0.0;
  for (const auto& pt : sweep.points) {
    series[pt.method].push_back(&pt);
    x_hi = std::max(x_hi, pt.beta);
  }
  if (x_hi <= 0.0) x_hi = 1.0;
  for (auto& [m, pts] : series)
    std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->beta < b->beta; });

  auto px = [&](double beta) { return kLeft + kPlotW * beta / x_hi; };
  auto py = [&](double rate) { return kTop + kPlotH * (1.0 - rate); };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<g font-family=\"sans-serif\" font-size=\"12\">\n";

  // Axes and ticks.
  os << "<line x1=\"" << fixed2(kLeft) << "\" y1=\"" << fixed2(kTop + kPlotH) << "\" x2=\""
     << fixed2(kLeft + kPlotW) << "\" y2=\"" << fixed2(kTop + kPlotH) << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << fixed2(kLeft) << "\" y1=\"" << fixed2(kTop) << "\" x2=\"" << fixed2(kLeft)
     << "\" y2=\"" << fixed2(kTop + kPlotH) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double rate = 0.25 * i;
    os << "<line x1=\"" << fixed2(kLeft - 4) << "\" y1=\"" << fixed2(py(rate)) << "\" x2=\""
       << fixed2(kLeft) << "\" y2=\"" << fixed2(py(rate)) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << fixed2(kLeft - 8) << "\" y=\"" << fixed2(py(rate) + 4)
       << "\" text-anchor=\"end\">" << fixed2(rate) << "</text>\n";
    const double beta = x_hi * i / 4.0;
    os << "<line x1=\"" << fixed2(px(beta)) << "\" y1=\"" << fixed2(kTop + kPlotH) << "\" x2=\""
       << fixed2(px(beta)) << "\" y2=\"" << fixed2(kTop + kPlotH + 4) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << fixed2(px(beta)) << "\" y=\"" << fixed2(kTop + kPlotH + 18)
       << "\" text-anchor=\"middle\">" << fixed2(beta) << "</text>\n";
  }
  os << "<text x=\"" << fixed2(kLeft + kPlotW / 2) << "\" y=\"" << fixed2(kHeight - 15)
     << "\" text-anchor=\"middle\">β = n/[20 d log p]</text>\n"
     << "<text x=\"18\" y=\"" << fixed2(kTop + kPlotH / 2)
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << fixed2(kTop + kPlotH / 2)
     << ")\">P[Ê = E*]</text>\n";

  // One polyline plus markers per method.
  double legend_y = kTop + 10;
  for (const auto& [m, pts] : series) {
    const char* color = color_of(m);
    if (pts.size() > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i)
        os << (i ? " " : "") << fixed2(px(pts[i]->beta)) << ',' << fixed2(py(pts[i]->success_rate));
      os << "\"/>\n";
    }
    for (const auto* pt : pts)
      os << "<circle cx=\"" << fixed2(px(pt->beta)) << "\" cy=\"" << fixed2(py(pt->success_rate))
         << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
    const double lx = kLeft + kPlotW + 15;
    os << "<line x1=\"" << fixed2(lx) << "\" y1=\"" << fixed2(legend_y) << "\" x2=\""
       << fixed2(lx + 25) << "\" y2=\"" << fixed2(legend_y) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << fixed2(lx + 32) << "\" y=\"" << fixed2(legend_y + 4) << "\">"
       << to_string(m) << "</text>\n";
    legend_y += 20;
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace fbgreedy
