#include "pq/render.hpp"

#include <cmath>
#include <cstdio>

namespace pq {

Quadric slice_to_plane(const Quadric& q, const Mat& frame) {
  if (frame.cols() != 3)
    throw Error(ErrorCode::malformed_input, "slice_to_plane: frame must have 3 columns");
  return restrict_quadric(q, frame);
}

namespace {

const char* kPalette[6] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

void fmt(std::string& s, const char* f, double a, double b) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a, b);
  s += buf;
}

}  // namespace

std::string render_svg(const std::vector<Quadric>& conics, const RenderOptions& opt) {
  const int n = opt.grid;
  const double dx = (opt.xmax - opt.xmin) / n, dy = (opt.ymax - opt.ymin) / n;
  auto px = [&](double x) { return (x - opt.xmin) / (opt.xmax - opt.xmin) * opt.size_px; };
  auto py = [&](double y) { return (opt.ymax - y) / (opt.ymax - opt.ymin) * opt.size_px; };

  std::string svg;
  char head[256];
  std::snprintf(head, sizeof(head),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n",
                opt.size_px, opt.size_px, opt.size_px, opt.size_px);
  svg += head;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t qi = 0; qi < conics.size(); ++qi) {
    const Quadric& q = conics[qi];
    if (q.dim != 3)
      throw Error(ErrorCode::malformed_input, "render_svg: quadrics must be 3x3 (slice first)");
    std::vector<double> vals((n + 1) * (n + 1));
    bool any_neg = false, any_pos = false;
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        Eigen::Vector3d p(opt.xmin + i * dx, opt.ymin + j * dy, 1.0);
        double v = p.dot(q.mat * p);
        vals[j * (n + 1) + i] = v;
        (v < 0 ? any_neg : any_pos) = true;
      }
    if (!any_neg || !any_pos) {
      svg += "<!-- quadric ";
      svg += std::to_string(qi);
      svg += ": zero set empty in this chart -->\n";
      continue;
    }
    std::string path;
    auto interp = [&](double x0, double y0, double v0, double x1, double y1, double v1,
                      double& x, double& y) {
      double t = v0 / (v0 - v1);
      x = x0 + t * (x1 - x0);
      y = y0 + t * (y1 - y0);
    };
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double x0 = opt.xmin + i * dx, y0 = opt.ymin + j * dy;
        double c[4] = {vals[j * (n + 1) + i], vals[j * (n + 1) + i + 1],
                       vals[(j + 1) * (n + 1) + i + 1], vals[(j + 1) * (n + 1) + i]};
        double xs[4] = {x0, x0 + dx, x0 + dx, x0};
        double ys[4] = {y0, y0, y0 + dy, y0 + dy};
        // collect edge crossings of the zero level
        double ex[4], ey[4];
        int m = 0;
        for (int e = 0; e < 4; ++e) {
          int f = (e + 1) % 4;
          if ((c[e] < 0 && c[f] >= 0) || (c[e] >= 0 && c[f] < 0)) {
            interp(xs[e], ys[e], c[e], xs[f], ys[f], c[f], ex[m], ey[m]);
            ++m;
          }
        }
        for (int s = 0; s + 1 < m; s += 2) {
          fmt(path, "M%.2f %.2f", px(ex[s]), py(ey[s]));
          fmt(path, "L%.2f %.2f", px(ex[s + 1]), py(ey[s + 1]));
        }
      }
    svg += "<path d=\"";
    svg += path;
    svg += "\" stroke=\"";
    svg += kPalette[qi % 6];
    svg += "\" stroke-width=\"1.5\" fill=\"none\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace pq
