#include "safewb/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace safewb {

namespace {

std::string fnum(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

struct Box {
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -std::numeric_limits<double>::infinity();
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -std::numeric_limits<double>::infinity();
    void include(double x, double y) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    void pad_fraction(double f) {
        const double px = std::max(1e-6, (xmax - xmin) * f);
        const double py = std::max(1e-6, (ymax - ymin) * f);
        xmin -= px;
        xmax += px;
        ymin -= py;
        ymax += py;
    }
};

// World-to-viewport mapping with y flipped (SVG y grows downward).
struct Mapper {
    Box box;
    double w, h;
    double x(double wx) const { return (wx - box.xmin) / (box.xmax - box.xmin) * w; }
    double y(double wy) const { return h - (wy - box.ymin) / (box.ymax - box.ymin) * h; }
};

std::vector<std::array<double, 2>> arm_points(const TrajectoryData& data,
                                              const std::vector<double>& q) {
    std::vector<std::array<double, 2>> pts;
    pts.push_back({data.base[0], data.base[1]});
    double angle = 0.0;
    for (std::size_t k = 0; k < data.link_lengths.size(); ++k) {
        angle += q[k];
        const auto& prev = pts.back();
        pts.push_back({prev[0] + data.link_lengths[k] * std::cos(angle),
                       prev[1] + data.link_lengths[k] * std::sin(angle)});
    }
    return pts;
}

std::vector<double> joint_row(const TrajectoryData& data, std::size_t row) {
    std::vector<double> q(data.joint_count());
    for (std::size_t j = 0; j < q.size(); ++j)
        q[j] = data.rows[row][data.column_index("q_" + std::to_string(j))];
    return q;
}

void draw_arm(std::ostream& out, const Mapper& map,
              const std::vector<std::array<double, 2>>& pts, const char* color,
              double opacity) {
    out << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"3\""
        << " stroke-opacity=\"" << opacity << "\" stroke-linecap=\"round\" points=\"";
    for (const auto& p : pts) out << fnum(map.x(p[0])) << ',' << fnum(map.y(p[1])) << ' ';
    out << "\"/>\n";
    for (const auto& p : pts)
        out << "  <circle cx=\"" << fnum(map.x(p[0])) << "\" cy=\"" << fnum(map.y(p[1]))
            << "\" r=\"3\" fill=\"" << color << "\" fill-opacity=\"" << opacity << "\"/>\n";
}

}  // namespace

void plot_scene_svg(std::ostream& out, const TrajectoryData& data) {
    if (data.rows.empty()) throw ConfigError("trajectory has no steps to plot", 0, "");
    data.column_index("q_0");  // fail early with a named column

    const double W = 640, H = 640;
    Box box;
    box.include(data.base[0], data.base[1]);
    box.include(data.goal[0], data.goal[1]);
    for (const DiskObstacle& o : data.obstacles) {
        box.include(o.center[0] - o.radius, o.center[1] - o.radius);
        box.include(o.center[0] + o.radius, o.center[1] + o.radius);
    }

    std::vector<std::array<double, 2>> ee_path;
    for (std::size_t r = 0; r < data.rows.size(); ++r) {
        const auto pts = arm_points(data, joint_row(data, r));
        for (const auto& p : pts) box.include(p[0], p[1]);
        ee_path.push_back(pts.back());
    }
    box.pad_fraction(0.08);
    // Square aspect so circles stay circular.
    const double span = std::max(box.xmax - box.xmin, box.ymax - box.ymin);
    const double cx = 0.5 * (box.xmin + box.xmax), cy = 0.5 * (box.ymin + box.ymax);
    box.xmin = cx - span / 2;
    box.xmax = cx + span / 2;
    box.ymin = cy - span / 2;
    box.ymax = cy + span / 2;

    const Mapper map{box, W, H};

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
        << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
        << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const double delta = data.delta.empty() ? 0.0 : data.delta.front();
    for (const DiskObstacle& o : data.obstacles) {
        const double r_px = o.radius / span * W;
        out << "  <circle cx=\"" << fnum(map.x(o.center[0])) << "\" cy=\""
            << fnum(map.y(o.center[1])) << "\" r=\"" << fnum(r_px)
            << "\" fill=\"#d9d9d9\" stroke=\"#555\"/>\n";
        if (delta > 0.0)
            out << "  <circle cx=\"" << fnum(map.x(o.center[0])) << "\" cy=\""
                << fnum(map.y(o.center[1])) << "\" r=\"" << fnum((o.radius + delta) / span * W)
                << "\" fill=\"none\" stroke=\"#999\" stroke-dasharray=\"5,4\"/>\n";
    }

    out << "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : ee_path) out << fnum(map.x(p[0])) << ',' << fnum(map.y(p[1])) << ' ';
    out << "\"/>\n";

    const std::size_t last = data.rows.size() - 1;
    draw_arm(out, map, arm_points(data, joint_row(data, 0)), "#2ca02c", 0.45);
    draw_arm(out, map, arm_points(data, joint_row(data, last / 2)), "#ff7f0e", 0.65);
    draw_arm(out, map, arm_points(data, joint_row(data, last)), "#d62728", 0.95);

    // Goal marker.
    const double gx = map.x(data.goal[0]), gy = map.y(data.goal[1]);
    out << "  <path d=\"M" << fnum(gx - 7) << ' ' << fnum(gy) << " L" << fnum(gx + 7) << ' '
        << fnum(gy) << " M" << fnum(gx) << ' ' << fnum(gy - 7) << " L" << fnum(gx) << ' '
        << fnum(gy + 7) << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    out << "  <text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">"
        << "arm: start (green), mid (orange), final (red); goal cross; end-effector path"
        << "</text>\n";
    out << "</svg>\n";
}

namespace {

struct Panel {
    double x0, y0, w, h;  // SVG rect of the plotting area
    double tmin, tmax, vmin, vmax;
    double px(double t) const { return x0 + (t - tmin) / (tmax - tmin) * w; }
    double py(double v) const { return y0 + h - (v - vmin) / (vmax - vmin) * h; }
};

void draw_axes(std::ostream& out, const Panel& p, const std::string& label) {
    out << "  <rect x=\"" << fnum(p.x0) << "\" y=\"" << fnum(p.y0) << "\" width=\"" << fnum(p.w)
        << "\" height=\"" << fnum(p.h) << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double t = p.tmin + (p.tmax - p.tmin) * i / 4.0;
        const double v = p.vmin + (p.vmax - p.vmin) * i / 4.0;
        out << "  <text x=\"" << fnum(p.px(t)) << "\" y=\"" << fnum(p.y0 + p.h + 16)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
            << fnum(t) << "</text>\n";
        out << "  <text x=\"" << fnum(p.x0 - 6) << "\" y=\"" << fnum(p.py(v) + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fnum(v)
            << "</text>\n";
    }
    out << "  <text x=\"" << fnum(p.x0 + 6) << "\" y=\"" << fnum(p.y0 + 16)
        << "\" font-family=\"sans-serif\" font-size=\"13\">" << label << "</text>\n";
}

void draw_series(std::ostream& out, const Panel& p, const std::vector<double>& t,
                 const std::vector<double>& v, const char* color) {
    out << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < t.size(); ++i)
        out << fnum(p.px(t[i])) << ',' << fnum(p.py(v[i])) << ' ';
    out << "\"/>\n";
}

}  // namespace

void plot_curves_svg(std::ostream& out, const TrajectoryData& data) {
    if (data.rows.empty()) throw ConfigError("trajectory has no steps to plot", 0, "");
    const std::size_t ct = data.column_index("t");
    const std::size_t ch = data.column_index("hprime");
    const std::size_t ce = data.column_index("e");

    std::vector<double> t, hprime, loge;
    const double e_floor = 1e-17;  // exact solver agreement logs e = 0
    for (const auto& row : data.rows) {
        t.push_back(row[ct]);
        hprime.push_back(row[ch]);
        loge.push_back(std::log10(std::max(row[ce], e_floor)));
    }

    const double W = 720, H = 540;
    auto range = [](const std::vector<double>& v) {
        double lo = *std::min_element(v.begin(), v.end());
        double hi = *std::max_element(v.begin(), v.end());
        if (hi - lo < 1e-12) {
            lo -= 1.0;
            hi += 1.0;
        }
        const double pad = (hi - lo) * 0.08;
        return std::pair<double, double>{lo - pad, hi + pad};
    };

    const auto [hl, hh] = range(hprime);
    const auto [el, eh] = range(loge);
    const double t0 = t.front(), t1 = t.back() > t.front() ? t.back() : t.front() + 1.0;

    Panel top{70, 30, W - 100, (H - 120) / 2, t0, t1, std::min(hl, -0.05 * (hh - hl)), hh};
    Panel bot{70, 30 + (H - 120) / 2 + 60, W - 100, (H - 120) / 2, t0, t1, el, eh};

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
        << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
        << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    draw_axes(out, top, "reduced constraint h' [m] vs t [s]");
    if (top.vmin < 0.0 && top.vmax > 0.0) {
        out << "  <line x1=\"" << fnum(top.x0) << "\" y1=\"" << fnum(top.py(0.0)) << "\" x2=\""
            << fnum(top.x0 + top.w) << "\" y2=\"" << fnum(top.py(0.0))
            << "\" stroke=\"#d62728\" stroke-dasharray=\"4,4\"/>\n";
    }
    draw_series(out, top, t, hprime, "#1f77b4");

    draw_axes(out, bot, "log10 of solution error e vs t [s]");
    draw_series(out, bot, t, loge, "#ff7f0e");

    out << "</svg>\n";
}

namespace {

std::ofstream open_svg(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

void plot_scene_svg_file(const std::string& path, const TrajectoryData& data) {
    auto out = open_svg(path);
    plot_scene_svg(out, data);
}

void plot_curves_svg_file(const std::string& path, const TrajectoryData& data) {
    auto out = open_svg(path);
    plot_curves_svg(out, data);
}

}  // namespace safewb
