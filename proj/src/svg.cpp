#include "vscreen/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

#include "vscreen/error.hpp"

namespace vscreen::svg {

using report::Json;

std::string_view to_string(Figure f) {
  switch (f) {
    case Figure::Tiered: return "tiered";
    case Figure::Sensitivity: return "sensitivity";
    case Figure::Contingency: return "contingency";
    case Figure::Synthetic: return "synthetic";
  }
  return "";
}

std::optional<Figure> parse_figure(std::string_view name) {
  for (Figure f : {Figure::Tiered, Figure::Sensitivity, Figure::Contingency, Figure::Synthetic})
    if (to_string(f) == name) return f;
  return std::nullopt;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

class Canvas {
 public:
  Canvas(double w, double h, std::string_view title) : w_(w), h_(h) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
         << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\" font-family=\"sans-serif\">\n"
         << "<title>" << escape(title) << "</title>\n"
         << "<rect x=\"0\" y=\"0\" width=\"" << num(w) << "\" height=\"" << num(h) << "\" fill=\"#ffffff\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0,
            bool dashed = false) {
    out_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
         << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << '"';
    if (dashed) out_ << " stroke-dasharray=\"6,4\" class=\"threshold\"";
    out_ << "/>\n";
  }

  void rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke = "none") {
    out_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
         << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
  }

  void circle(double cx, double cy, double r, std::string_view fill) {
    out_ << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r) << "\" fill=\"" << fill
         << "\" stroke=\"#333333\" stroke-width=\"0.50\"/>\n";
  }

  void text(double x, double y, std::string_view s, double size = 11, std::string_view anchor = "start",
            std::string_view extra = {}) {
    out_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << num(size) << "\" text-anchor=\""
         << anchor << '"';
    if (!extra.empty()) out_ << ' ' << extra;
    out_ << '>' << escape(s) << "</text>\n";
  }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

  double width() const { return w_; }
  double height() const { return h_; }

 private:
  double w_, h_;
  std::ostringstream out_;
};

std::string tier_color(std::string_view tier) {
  if (tier == "Tier1Invalid") return "#d62728";
  if (tier == "Tier2Marked") return "#ff7f0e";
  if (tier == "Tier2Elevated") return "#f2c14e";
  if (tier == "Valid") return "#2b7bba";
  return "#9e9e9e";
}

const Json* find_path(const Json& doc, std::initializer_list<const char*> path) {
  const Json* cur = &doc;
  for (const char* key : path) {
    if (!cur->is_object() || !cur->contains(key)) return nullptr;
    cur = &(*cur)[key];
  }
  return cur;
}

const Json& require(const Json& doc, std::initializer_list<std::initializer_list<const char*>> candidates,
                    std::string_view what) {
  for (auto path : candidates)
    if (const Json* j = find_path(doc, path); j && !j->is_null()) return *j;
  throw Error(ErrorCode::MissingSection, "report has no '" + std::string(what) + "' block");
}

TierThresholds thresholds_of(const Json& doc) {
  TierThresholds th;
  const Json* t = find_path(doc, {"meta", "thresholds"});
  if (!t || !t->is_object()) return th;
  th.rbs_gt = t->value("rbs_gt", th.rbs_gt);
  th.l_min = t->value("l_min", th.l_min);
  th.f_min = t->value("f_min", th.f_min);
  th.fp_min = t->value("fp_min", th.fp_min);
  return th;
}

std::map<std::string, std::string> tiers_of(const Json& doc) {
  std::map<std::string, std::string> out;
  for (auto path : {std::initializer_list<const char*>{"classification", "assignments"},
                    std::initializer_list<const char*>{"psychometrics", "classification", "assignments"}}) {
    if (const Json* a = find_path(doc, path); a && a->is_array()) {
      for (const auto& e : *a) out[e.at("model_id").get<std::string>()] = e.at("tier").get<std::string>();
      break;
    }
  }
  return out;
}

std::optional<double> number_at(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key) || !obj[key].is_number()) return std::nullopt;
  return obj[key].get<double>();
}

void legend(Canvas& c, double x, double y) {
  const char* tiers[] = {"Tier1Invalid", "Tier2Marked", "Tier2Elevated", "Valid"};
  for (const char* t : tiers) {
    c.rect(x, y - 9, 10, 10, tier_color(t));
    c.text(x + 14, y, t, 10);
    y += 14;
  }
}

}  // namespace

std::string tiered_scatter(const Json& doc) {
  const Json& profiles = require(doc, {{"profiles"}, {"psychometrics", "profiles"}}, "profiles");
  const auto th = thresholds_of(doc);
  const auto tiers = tiers_of(doc);

  Canvas c(640, 520, "L versus F");
  const double left = 70, top = 40, size = 400;
  auto px = [&](double f) { return left + f * size; };
  auto py = [&](double l) { return top + (1.0 - l) * size; };

  c.rect(left, top, size, size, "none", "#333333");
  for (int i = 0; i <= 10; ++i) {
    const double v = i / 10.0;
    c.line(px(v), top + size, px(v), top + size + 5, "#333333");
    c.line(left - 5, py(v), left, py(v), "#333333");
    if (i % 2 == 0) {
      c.text(px(v), top + size + 18, num(v), 10, "middle");
      c.text(left - 8, py(v) + 4, num(v), 10, "end");
    }
  }
  c.text(left + size / 2, top + size + 40, "F: P(WITHDRAW | consensus item)", 12, "middle");
  c.text(20, top + size / 2, "L: P(KEEP | incorrect)", 12, "middle",
         "transform=\"rotate(-90 20 " + num(top + size / 2) + ")\"");
  c.text(left + size / 2, 24, "L versus F with Tier 1 thresholds", 14, "middle");

  c.line(left, py(th.l_min), left + size, py(th.l_min), "#555555", 1.0, true);
  c.line(px(th.f_min), top, px(th.f_min), top + size, "#555555", 1.0, true);
  c.text(left + size - 4, py(th.l_min) - 4, "L = " + num(th.l_min), 9, "end");
  c.text(px(th.f_min) + 4, top + 12, "F = " + num(th.f_min), 9);

  for (const auto& p : profiles) {
    const std::string id = p.value("model_id", std::string());
    const Json& src = p.contains("overall") ? p["overall"] : p;
    const auto l = number_at(src, "L");
    const auto f = number_at(src, "F");
    if (!l || !f) continue;
    const auto it = tiers.find(id);
    c.circle(px(*f), py(*l), 5, tier_color(it == tiers.end() ? "" : it->second));
    c.text(px(*f) + 7, py(*l) - 6, id, 9);
  }
  legend(c, left + size + 30, top + 20);
  return c.finish();
}

std::string sensitivity_bars(const Json& doc) {
  const Json& sens = require(doc, {{"psychometrics", "item_sensitivity"}, {"item_sensitivity"}}, "item_sensitivity");
  struct Bar {
    std::string id;
    std::optional<double> r;
    std::string tier;
  };
  std::vector<Bar> bars;
  for (const auto& e : sens) {
    Bar b{e.value("model_id", std::string()), std::nullopt, e.contains("tier") && e["tier"].is_string()
                                                                 ? e["tier"].get<std::string>()
                                                                 : std::string()};
    if (e.contains("result") && e["result"].is_object()) b.r = number_at(e["result"], "r");
    bars.push_back(std::move(b));
  }
  std::stable_sort(bars.begin(), bars.end(), [](const Bar& a, const Bar& b) {
    const double ra = a.r.value_or(-2.0), rb = b.r.value_or(-2.0);
    if (ra != rb) return ra > rb;
    return a.id < b.id;
  });

  const double left = 180, top = 50, width = 400, row = 18;
  const double height = top + std::max<double>(1, bars.size()) * row + 60;
  Canvas c(left + width + 150, height, "Item sensitivity");
  auto px = [&](double r) { return left + (r + 1.0) / 2.0 * width; };
  const double bottom = top + bars.size() * row;

  c.text(left + width / 2, 24, "Item sensitivity: r(KEEP, correct) by model", 14, "middle");
  c.line(left, bottom, left + width, bottom, "#333333");
  for (int i = -10; i <= 10; i += 5) {
    const double v = i / 10.0;
    c.line(px(v), bottom, px(v), bottom + 5, "#333333");
    c.text(px(v), bottom + 18, num(v), 10, "middle");
  }
  c.line(px(0), top - 5, px(0), bottom, "#333333");
  c.text(left + width / 2, bottom + 38, "point-biserial r", 12, "middle");

  double y = top;
  for (const auto& b : bars) {
    c.text(left - 6, y + row * 0.7, b.id, 10, "end");
    if (b.r) {
      const double x0 = px(std::min(0.0, *b.r)), x1 = px(std::max(0.0, *b.r));
      c.rect(x0, y + 3, x1 - x0, row - 6, tier_color(b.tier));
      c.text(x1 + 4, y + row * 0.7, num(*b.r), 9);
    } else {
      c.text(px(0) + 4, y + row * 0.7, "undefined", 9, "start", "font-style=\"italic\"");
    }
    y += row;
  }
  legend(c, left + width + 20, top + 10);
  return c.finish();
}

std::string contingency_grids(const Json& doc) {
  const Json& cont = require(doc, {{"psychometrics", "contingency"}, {"contingency"}}, "contingency");
  const std::size_t n = cont.size();
  const std::size_t cols = 4;
  const std::size_t rows = std::max<std::size_t>(1, (n + cols - 1) / cols);
  const double cell = 50, panel_w = 2 * cell + 70, panel_h = 2 * cell + 50, top = 50, left = 20;
  Canvas c(left * 2 + cols * panel_w, top + rows * panel_h + 20, "WITHDRAW x BET contingency");
  c.text(left + cols * panel_w / 2, 24, "WITHDRAW x BET contingency by model", 14, "middle");

  std::size_t k = 0;
  for (const auto& m : cont) {
    const double x = left + (k % cols) * panel_w + 60, y = top + (k / cols) * panel_h + 20;
    const Json& all = m.at("all");
    const double total = std::max(1.0, all.value("total", 0.0));
    c.text(x + cell, y - 6, m.value("model_id", std::string()), 10, "middle");
    const char* keys[2][2] = {{"keep_bet", "keep_no_bet"}, {"withdraw_bet", "withdraw_no_bet"}};
    for (int r = 0; r < 2; ++r)
      for (int col = 0; col < 2; ++col) {
        const double count = all.value(keys[r][col], 0.0);
        const int shade = 255 - static_cast<int>(std::lround(200.0 * count / total));
        char fill[8];
        std::snprintf(fill, sizeof fill, "#%02x%02xff", shade, shade);
        const bool contradiction = r == 1 && col == 0;
        c.rect(x + col * cell, y + r * cell, cell, cell, fill, contradiction ? "#d62728" : "#333333");
        c.text(x + col * cell + cell / 2, y + r * cell + cell / 2 + 4, std::to_string(static_cast<long long>(count)),
               10, "middle");
      }
    c.text(x - 4, y + cell / 2 + 4, "KEEP", 9, "end");
    c.text(x - 4, y + 1.5 * cell + 4, "WD", 9, "end");
    c.text(x + cell / 2, y + 2 * cell + 12, "BET", 9, "middle");
    c.text(x + 1.5 * cell, y + 2 * cell + 12, "NO_BET", 9, "middle");
    ++k;
  }
  return c.finish();
}

std::string synthetic_matrix(const Json& doc) {
  const Json& policies = require(doc, {{"synthetic", "policies"}, {"policies"}}, "synthetic");
  const auto th = thresholds_of(doc);
  const std::vector<std::string> columns = {"L", "Fp", "F", "RBS", "withdraw_delta", "item_sensitivity"};
  const double left = 150, top = 60, cw = 90, rh = 26;
  const double width = left + (columns.size() + 2) * cw + 20;
  Canvas c(width, top + std::max<std::size_t>(1, policies.size()) * rh + 50, "Synthetic policy validation");
  c.text(width / 2, 24, "Synthetic policy validation (bootstrap means)", 14, "middle");
  for (std::size_t j = 0; j < columns.size(); ++j) c.text(left + j * cw + cw / 2, top - 8, columns[j], 10, "middle");
  c.text(left + columns.size() * cw + cw / 2, top - 8, "verdict", 10, "middle");
  c.text(left + (columns.size() + 1) * cw + cw / 2, top - 8, "expected", 10, "middle");

  double y = top;
  for (const auto& p : policies) {
    const std::string verdict = p.value("verdict", std::string());
    const std::string expected = p.value("expected", std::string());
    const bool pass = verdict == expected;
    c.rect(0, y, width, rh, verdict == "Flagged" ? "#fbe3e3" : "#e3f4e3");
    c.text(left - 8, y + rh * 0.65, p.value("policy", std::string()), 11, "end");
    for (std::size_t j = 0; j < columns.size(); ++j) {
      std::string cellv = "-";
      if (const Json* s = find_path(p, {"summaries", columns[j].c_str()}))
        if (const auto m = number_at(*s, "mean")) cellv = num(*m);
      c.text(left + j * cw + cw / 2, y + rh * 0.65, cellv, 10, "middle");
    }
    c.text(left + columns.size() * cw + cw / 2, y + rh * 0.65, verdict, 10, "middle",
           pass ? "" : "font-weight=\"bold\" fill=\"#d62728\"");
    c.text(left + (columns.size() + 1) * cw + cw / 2, y + rh * 0.65, expected, 10, "middle");
    c.line(0, y + rh, width, y + rh, "#ffffff");
    y += rh;
  }
  c.text(left, y + 24,
         "Tier 1: RBS > " + num(th.rbs_gt) + ", L >= " + num(th.l_min) + ", F >= " + num(th.f_min) + ", Fp >= " +
             num(th.fp_min),
         10);
  return c.finish();
}

std::string render(const Json& doc, Figure figure) {
  switch (figure) {
    case Figure::Tiered: return tiered_scatter(doc);
    case Figure::Sensitivity: return sensitivity_bars(doc);
    case Figure::Contingency: return contingency_grids(doc);
    case Figure::Synthetic: return synthetic_matrix(doc);
  }
  throw Error(ErrorCode::ConfigError, "unknown figure");
}

}  // namespace vscreen::svg
