#include "farmledger/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <vector>

#include "farmledger/errors.hpp"

namespace farmledger::analytics {

namespace {

constexpr const char* kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"};
constexpr int kMargin = 56;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (lo > hi) lo = hi = 0;
    if (lo == hi) hi = lo + 1;
  }
};

class Canvas {
 public:
  Canvas(int w, int h, Range x, Range y) : w_(w), h_(h), x_(x), y_(y) {
    out_ = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
           std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) + "\">\n";
    out_ += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }

  double px(double x) const { return kMargin + (x - x_.lo) / (x_.hi - x_.lo) * (w_ - 2 * kMargin); }
  double py(double y) const { return h_ - kMargin - (y - y_.lo) / (y_.hi - y_.lo) * (h_ - 2 * kMargin); }

  void axes(const std::string& x_title, const std::string& y_title, const std::string& x_lo, const std::string& x_hi) {
    const auto left = std::to_string(kMargin);
    const auto bottom = std::to_string(h_ - kMargin);
    out_ += "<line x1=\"" + left + "\" y1=\"" + bottom + "\" x2=\"" + std::to_string(w_ - kMargin) + "\" y2=\"" + bottom +
            "\" stroke=\"black\"/>\n";
    out_ += "<line x1=\"" + left + "\" y1=\"" + std::to_string(kMargin) + "\" x2=\"" + left + "\" y2=\"" + bottom +
            "\" stroke=\"black\"/>\n";
    text(kMargin, h_ - kMargin + 16, x_lo, "start");
    text(w_ - kMargin, h_ - kMargin + 16, x_hi, "end");
    text(kMargin - 6, h_ - kMargin, label(y_.lo), "end");
    text(kMargin - 6, kMargin + 4, label(y_.hi), "end");
    text(w_ / 2.0, h_ - 12, x_title, "middle");
    out_ += "<text x=\"14\" y=\"" + num(h_ / 2.0) + "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
            num(h_ / 2.0) + ")\">" + escape(y_title) + "</text>\n";
  }

  void text(double x, double y, const std::string& s, const char* anchor) {
    out_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"12\" text-anchor=\"" + anchor + "\">" +
            escape(s) + "</text>\n";
  }

  void raw(const std::string& s) { out_ += s; }

  std::string finish() { return out_ + "</svg>\n"; }

 private:
  int w_, h_;
  Range x_, y_;
  std::string out_;
};

std::string timeseries(const nlohmann::json& chart, int w, int h) {
  const auto& series = chart.at("series");
  Range x, y;
  y.include(0);
  for (std::size_t i = 0; i < series.size(); ++i) {
    x.include(static_cast<double>(i));
    y.include(series[i].at("value").get<double>());
  }
  x.settle();
  y.settle();
  Canvas c(w, h, x, y);
  const std::string first = series.empty() ? "" : series.front().at("bucket_start").get<std::string>();
  const std::string last = series.empty() ? "" : series.back().at("bucket_start").get<std::string>();
  c.axes(chart.value("bucket", "bucket"), "yield_kg", first, last);
  std::string pts;
  for (std::size_t i = 0; i < series.size(); ++i) {
    pts += num(c.px(static_cast<double>(i))) + "," + num(c.py(series[i].at("value").get<double>())) + " ";
  }
  c.raw("<polyline fill=\"none\" stroke=\"" + std::string(kPalette[0]) + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n");
  return c.finish();
}

std::string scatter(const nlohmann::json& chart, int w, int h) {
  const auto& groups = chart.at("groups");
  Range x, y;
  for (const auto& g : groups) {
    for (const auto& p : g.at("points")) {
      x.include(p.at("x").get<double>());
      y.include(p.at("y").get<double>());
    }
  }
  x.settle();
  y.settle();
  Canvas c(w, h, x, y);
  c.axes(chart.value("resource", "x"), "yield_kg", label(x.lo), label(x.hi));
  std::size_t index = 0;
  for (const auto& g : groups) {
    const std::string color = kPalette[index % std::size(kPalette)];
    for (const auto& p : g.at("points")) {
      c.raw("<circle cx=\"" + num(c.px(p.at("x").get<double>())) + "\" cy=\"" + num(c.py(p.at("y").get<double>())) +
            "\" r=\"3\" fill=\"" + color + "\"/>\n");
    }
    const auto& fit = g.at("fit");
    if (!fit.is_null()) {
      const double m = fit.at("slope").get<double>();
      const double b = fit.at("intercept").get<double>();
      c.raw("<line x1=\"" + num(c.px(x.lo)) + "\" y1=\"" + num(c.py(m * x.lo + b)) + "\" x2=\"" + num(c.px(x.hi)) +
            "\" y2=\"" + num(c.py(m * x.hi + b)) + "\" stroke=\"" + color + "\" stroke-dasharray=\"4 3\"/>\n");
    }
    const double ly = kMargin + 16.0 * static_cast<double>(index);
    c.raw("<rect x=\"" + num(w - kMargin - 110.0) + "\" y=\"" + num(ly - 9) + "\" width=\"10\" height=\"10\" fill=\"" +
          color + "\"/>\n");
    c.text(w - kMargin - 95.0, ly, g.at("label").get<std::string>(), "start");
    ++index;
  }
  return c.finish();
}

}  // namespace

std::string render_svg(const nlohmann::json& chart, int width, int height) {
  try {
    if (chart.contains("series")) return timeseries(chart, width, height);
    if (chart.contains("groups")) return scatter(chart, width, height);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("chart data has the wrong shape: ") + e.what());
  }
  throw Error(ErrorCode::InvalidArgument, "chart data carries neither series nor groups");
}

}  // namespace farmledger::analytics
