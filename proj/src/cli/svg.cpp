#include "drkit/cli/svg.hpp"

#include "drkit/format.hpp"

#include <algorithm>
#include <sstream>

namespace drkit::cli {
namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* color_for(const std::optional<std::vector<int>>& labels, Eigen::Index i) {
  if (!labels) return kColorUnlabeled;
  const int l = (*labels)[static_cast<std::size_t>(i)];
  if (l == 1) return kColorPositive;
  if (l == 0) return kColorNegative;
  return kColorUnlabeled;
}

}  // namespace

std::string scatter_svg(const Matrix& coords, const std::optional<std::vector<int>>& labels, const ScatterSpec& spec) {
  const Eigen::Index n = coords.rows();
  const double margin_l = 70, margin_r = 20, margin_t = 40, margin_b = 60;
  const double pw = spec.width - margin_l - margin_r;
  const double ph = spec.height - margin_t - margin_b;

  auto xval = [&](Eigen::Index i) { return coords(i, 0); };
  auto yval = [&](Eigen::Index i) { return coords.cols() > 1 ? coords(i, 1) : 0.0; };
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (n > 0) {
    xmin = xmax = xval(0);
    ymin = ymax = yval(0);
    for (Eigen::Index i = 1; i < n; ++i) {
      xmin = std::min(xmin, xval(i));
      xmax = std::max(xmax, xval(i));
      ymin = std::min(ymin, yval(i));
      ymax = std::max(ymax, yval(i));
    }
  }
  if (xmax - xmin <= 0) {
    xmin -= 1;
    xmax += 1;
  }
  if (ymax - ymin <= 0) {
    ymin -= 1;
    ymax += 1;
  }
  auto sx = [&](double v) { return margin_l + (v - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double v) { return margin_t + ph - (v - ymin) / (ymax - ymin) * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  out << "<text x=\"" << spec.width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << xml_escape(spec.title) << "</text>\n";
  out << "<rect x=\"" << format_fixed(margin_l, 0) << "\" y=\"" << format_fixed(margin_t, 0) << "\" width=\""
      << format_fixed(pw, 0) << "\" height=\"" << format_fixed(ph, 0)
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  for (int t = 0; t <= 4; ++t) {
    const double fx = xmin + (xmax - xmin) * t / 4.0;
    const double fy = ymin + (ymax - ymin) * t / 4.0;
    out << "<text x=\"" << format_fixed(sx(fx), 2) << "\" y=\"" << format_fixed(margin_t + ph + 18, 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << format_fixed(fx, 2)
        << "</text>\n";
    out << "<text x=\"" << format_fixed(margin_l - 6, 2) << "\" y=\"" << format_fixed(sy(fy) + 4, 2)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << format_fixed(fy, 2)
        << "</text>\n";
  }
  out << "<text x=\"" << format_fixed(margin_l + pw / 2, 2) << "\" y=\"" << spec.height - 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xml_escape(spec.x_label)
      << "</text>\n";
  out << "<text x=\"18\" y=\"" << format_fixed(margin_t + ph / 2, 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << format_fixed(margin_t + ph / 2, 2) << ")\" font-family=\"sans-serif\" font-size=\"13\">"
      << xml_escape(spec.y_label) << "</text>\n";

  out << "<g fill-opacity=\"0.7\">\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    out << "<circle cx=\"" << format_fixed(sx(xval(i)), 2) << "\" cy=\"" << format_fixed(sy(yval(i)), 2)
        << "\" r=\"2.5\" fill=\"" << color_for(labels, i) << "\"/>\n";
  }
  out << "</g>\n";

  if (labels) {
    const double lx = margin_l + pw - 110;
    out << "<circle cx=\"" << format_fixed(lx, 2) << "\" cy=\"" << format_fixed(margin_t + 14, 2) << "\" r=\"4\" fill=\""
        << kColorPositive << "\"/><text x=\"" << format_fixed(lx + 8, 2) << "\" y=\"" << format_fixed(margin_t + 18, 2)
        << "\" font-family=\"sans-serif\" font-size=\"11\">label 1</text>\n";
    out << "<circle cx=\"" << format_fixed(lx + 55, 2) << "\" cy=\"" << format_fixed(margin_t + 14, 2)
        << "\" r=\"4\" fill=\"" << kColorNegative << "\"/><text x=\"" << format_fixed(lx + 63, 2) << "\" y=\""
        << format_fixed(margin_t + 18, 2) << "\" font-family=\"sans-serif\" font-size=\"11\">label 0</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace drkit::cli
