#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "imbal/bench.hpp"
#include "imbal/error.hpp"

// Chart rendering is deliberately dependency-free: every coordinate goes
// through fixed "%.2f" formatting and the output depends only on the rows,
// so identical rows give byte-identical SVG documents.

namespace imbal {
namespace {

constexpr double kPlotH = 240.0;
constexpr double kMarginL = 64.0;
constexpr double kMarginR = 74.0;
constexpr double kMarginT = 40.0;
constexpr double kMarginB = 100.0;
constexpr double kSlotW = 64.0;
constexpr double kBarW = 36.0;

std::string f2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string f3g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Canvas {
  std::string body;
  double width = 0.0;
  double height = 0.0;

  void line(double x1, double y1, double x2, double y2, const std::string& style) {
    body += "  <line x1=\"" + f2(x1) + "\" y1=\"" + f2(y1) + "\" x2=\"" + f2(x2) + "\" y2=\"" +
            f2(y2) + "\" " + style + "/>\n";
  }
  void rect(const std::string& cls, double x, double y, double w, double h,
            const std::string& fill) {
    body += "  <rect class=\"" + cls + "\" x=\"" + f2(x) + "\" y=\"" + f2(y) + "\" width=\"" +
            f2(w) + "\" height=\"" + f2(h) + "\" fill=\"" + fill + "\"/>\n";
  }
  void circle(const std::string& cls, double cx, double cy, double r, const std::string& fill) {
    body += "  <circle class=\"" + cls + "\" cx=\"" + f2(cx) + "\" cy=\"" + f2(cy) + "\" r=\"" +
            f2(r) + "\" fill=\"" + fill + "\"/>\n";
  }
  void text(const std::string& cls, double x, double y, const std::string& content,
            const std::string& extra = "") {
    body += "  <text class=\"" + cls + "\" x=\"" + f2(x) + "\" y=\"" + f2(y) + "\"" +
            (extra.empty() ? "" : " " + extra) + ">" + xml_escape(content) + "</text>\n";
  }
  void rotated_label(double x, double y, const std::string& content) {
    body += "  <text class=\"xlabel\" x=\"" + f2(x) + "\" y=\"" + f2(y) +
            "\" text-anchor=\"end\" transform=\"rotate(-35 " + f2(x) + " " + f2(y) + ")\">" +
            xml_escape(content) + "</text>\n";
  }

  std::string finish() const {
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + f2(width) +
           "\" height=\"" + f2(height) + "\" viewBox=\"0 0 " + f2(width) + " " + f2(height) +
           "\">\n";
    out += "  <style>text { font-family: monospace; font-size: 11px; } "
           ".title { font-size: 13px; }</style>\n";
    out += "  <rect x=\"0\" y=\"0\" width=\"" + f2(width) + "\" height=\"" + f2(height) +
           "\" fill=\"#ffffff\"/>\n";
    out += body;
    out += "</svg>\n";
    return out;
  }
};

const std::string kAxisStyle = "stroke=\"#404040\" stroke-width=\"1\"";
const std::string kGridStyle = "stroke=\"#d8d8d8\" stroke-width=\"1\"";
const std::string kRefStyle =
    "stroke=\"#b03030\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"";

void check_rows(const std::vector<BenchRow>& rows) {
  if (rows.empty()) fail(ErrorCode::InvalidArgument, "chart needs at least one row");
  for (const auto& r : rows)
    if (r.dataset != rows.front().dataset)
      fail(ErrorCode::InvalidArgument, "chart rows must belong to a single dataset");
}

double slot_center(std::size_t i) { return kMarginL + kSlotW * (static_cast<double>(i) + 0.5); }

}  // namespace

std::string render_f1_chart(const std::vector<BenchRow>& dataset_rows) {
  check_rows(dataset_rows);
  const std::size_t n = dataset_rows.size();
  Canvas c;
  c.width = kMarginL + kSlotW * static_cast<double>(n) + kMarginR;
  c.height = kMarginT + kPlotH + kMarginB;
  const double y0 = kMarginT, y1 = kMarginT + kPlotH;
  const double x0 = kMarginL, x1 = kMarginL + kSlotW * static_cast<double>(n);
  auto y_of = [&](double f1) { return y1 - f1 * kPlotH; };  // fixed [0, 1] scale

  c.text("title", x0, y0 - 18.0, dataset_rows.front().dataset + " - mean F1 by technique");
  for (int tick = 0; tick <= 5; ++tick) {
    double v = 0.2 * tick;
    c.line(x0, y_of(v), x1, y_of(v), tick == 0 ? kAxisStyle : kGridStyle);
    c.text("ytick", x0 - 40.0, y_of(v) + 4.0, f3g(v));
  }
  c.line(x0, y0, x0, y1, kAxisStyle);

  const BenchRow* baseline = nullptr;
  for (const auto& r : dataset_rows)
    if (r.technique == "baseline" && r.ok()) baseline = &r;

  for (std::size_t i = 0; i < n; ++i) {
    const BenchRow& r = dataset_rows[i];
    double cx = slot_center(i);
    if (r.ok()) {
      double top = y_of(r.mean_f1);
      c.rect("bar", cx - kBarW / 2.0, top, kBarW, y1 - top, "#4878a8");
      c.text("value", cx - 16.0, top - 4.0, f3g(r.mean_f1));
    } else {
      c.text("na", cx - 10.0, y1 - 6.0, "n/a");
    }
    c.rotated_label(cx + 4.0, y1 + 16.0, r.technique);
  }
  if (baseline != nullptr) {
    double yb = y_of(baseline->mean_f1);
    c.line(x0, yb, x1, yb, kRefStyle);
    c.text("refline", x1 + 4.0, yb + 4.0, "base");
  }
  return c.finish();
}

std::string render_tradeoff_chart(const std::vector<BenchRow>& dataset_rows) {
  check_rows(dataset_rows);
  const std::size_t n = dataset_rows.size();
  Canvas c;
  c.width = kMarginL + kSlotW * static_cast<double>(n) + kMarginR;
  c.height = kMarginT + kPlotH + kMarginB;
  const double y0 = kMarginT, y1 = kMarginT + kPlotH;
  const double x0 = kMarginL, x1 = kMarginL + kSlotW * static_cast<double>(n);

  double lo = 0.0, hi = 0.0, tmax = 0.0;
  for (const auto& r : dataset_rows) {
    if (!r.ok()) continue;
    lo = std::min(lo, r.improvement_pct);
    hi = std::max(hi, r.improvement_pct);
    tmax = std::max(tmax, r.infer_ms_per_1k);
  }
  if (hi - lo <= 0.0) hi = 1.0;
  double pad = 0.08 * (hi - lo);
  hi += pad;
  lo -= pad;
  if (tmax <= 0.0) tmax = 1.0;
  tmax *= 1.1;
  auto y_imp = [&](double v) { return y0 + (hi - v) / (hi - lo) * kPlotH; };
  auto y_time = [&](double t) { return y1 - t / tmax * kPlotH; };

  c.text("title", x0, y0 - 18.0,
         dataset_rows.front().dataset + " - improvement % (bars) vs inference time (dots)");
  for (int tick = 0; tick <= 5; ++tick) {
    double v = lo + (hi - lo) * 0.2 * tick;
    c.line(x0, y_imp(v), x1, y_imp(v), kGridStyle);
    c.text("ytick", x0 - 44.0, y_imp(v) + 4.0, f3g(v));
    double t = tmax * 0.2 * tick;
    c.text("ytick2", x1 + 8.0, y_time(t) + 4.0, f3g(t));
  }
  c.line(x0, y_imp(0.0), x1, y_imp(0.0), kAxisStyle);  // zero line
  c.line(x0, y0, x0, y1, kAxisStyle);
  c.line(x1, y0, x1, y1, kAxisStyle);

  for (std::size_t i = 0; i < n; ++i) {
    const BenchRow& r = dataset_rows[i];
    double cx = slot_center(i);
    if (r.ok()) {
      double yv = y_imp(r.improvement_pct), yz = y_imp(0.0);
      double top = std::min(yv, yz), h = std::max(yv, yz) - top;
      c.rect("impbar", cx - kBarW / 2.0, top, kBarW, h,
             r.improvement_pct >= 0.0 ? "#2e8b57" : "#c0504d");
      c.circle("marker", cx, y_time(r.infer_ms_per_1k), 5.0, "#d4a017");
    } else {
      c.text("na", cx - 10.0, y_imp(0.0) - 6.0, "n/a");
    }
    c.rotated_label(cx + 4.0, y1 + 16.0, r.technique);
  }
  return c.finish();
}

void emit_charts(const std::vector<BenchRow>& rows, const std::string& out_dir) {
  if (rows.empty()) fail(ErrorCode::InvalidArgument, "emit_charts: rows must be non-empty");
  std::error_code fs_error;
  std::filesystem::create_directories(out_dir, fs_error);
  if (fs_error) fail(ErrorCode::IoError, "cannot create '" + out_dir + "': " + fs_error.message());

  // Group by dataset id, keeping the incoming (sorted) row order.
  std::vector<std::string> order;
  std::map<std::string, std::vector<BenchRow>> groups;
  for (const auto& r : rows) {
    if (groups.find(r.dataset) == groups.end()) order.push_back(r.dataset);
    groups[r.dataset].push_back(r);
  }
  for (const auto& id : order) {
    const std::pair<std::string, std::string> files[] = {
        {"f1_", render_f1_chart(groups[id])},
        {"tradeoff_", render_tradeoff_chart(groups[id])},
    };
    for (const auto& [prefix, content] : files) {
      std::string path = out_dir + "/" + prefix + id + ".svg";
      std::ofstream out(path, std::ios::binary);
      if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
      out << content;
      if (!out.good()) fail(ErrorCode::IoError, "failed writing '" + path + "'");
    }
  }
}

}  // namespace imbal
