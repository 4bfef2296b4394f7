#include "hologforge/document.hpp"
#include "hologforge/error.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace hologforge {

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}

  void header(double width_mm, double height_mm) {
    os_ << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << format_mm(width_mm)
        << "mm\" height=\"" << format_mm(height_mm) << "mm\" viewBox=\"0 0 " << format_mm(width_mm) << ' '
        << format_mm(height_mm) << "\">\n";
  }
  void footer() { os_ << "</svg>\n"; }

  void group(const std::string& id, const std::vector<Primitive>& primitives, const std::string& indent) {
    if (primitives.empty()) return;
    os_ << indent << "<g id=\"" << id << "\">\n";
    for (const auto& p : primitives) std::visit([&](const auto& v) { write(v, indent + "  "); }, p);
    os_ << indent << "</g>\n";
  }

  void document_body(const SliceDocument& doc, const std::string& indent) {
    group("content", doc.elements, indent);
    group("registration", doc.registration, indent);
  }

  void write(const Circle& c, const std::string& indent) {
    os_ << indent << "<circle cx=\"" << format_mm(c.center.x) << "\" cy=\"" << format_mm(c.center.y)
        << "\" r=\"" << format_mm(c.radius) << "\" fill=\"" << c.fill << "\" stroke=\"" << c.stroke << '"';
    if (c.stroke != "none") os_ << " stroke-width=\"" << format_mm(c.stroke_width) << '"';
    tail(c.opacity, c.ref);
  }

  void write(const Line& l, const std::string& indent) {
    os_ << indent << "<line x1=\"" << format_mm(l.from.x) << "\" y1=\"" << format_mm(l.from.y) << "\" x2=\""
        << format_mm(l.to.x) << "\" y2=\"" << format_mm(l.to.y) << "\" stroke=\"" << l.stroke
        << "\" stroke-width=\"" << format_mm(l.stroke_width) << "\" stroke-linecap=\"round\"";
    if (l.dashed) os_ << " stroke-dasharray=\"2 2\"";
    tail(l.opacity, l.ref);
  }

  void write(const Polyline& p, const std::string& indent) {
    os_ << indent << "<polyline points=\"";
    for (std::size_t i = 0; i < p.points.size(); ++i) {
      if (i) os_ << ' ';
      os_ << format_mm(p.points[i].x) << ',' << format_mm(p.points[i].y);
    }
    os_ << "\" fill=\"none\" stroke=\"" << p.stroke << "\" stroke-width=\"" << format_mm(p.stroke_width)
        << "\" stroke-linecap=\"round\" stroke-linejoin=\"round\"";
    tail(p.opacity, p.ref);
  }

  void write(const Text& t, const std::string& indent) {
    os_ << indent << "<text x=\"" << format_mm(t.position.x) << "\" y=\"" << format_mm(t.position.y)
        << "\" font-family=\"" << escape_xml(t.font_family) << "\" font-size=\"" << format_mm(t.font_size_mm)
        << "\" fill=\"" << t.fill << "\" text-anchor=\"" << (t.anchor == TextAnchor::start ? "start" : "end")
        << '"';
    if (t.opacity < 1.0) os_ << " opacity=\"" << format_mm(t.opacity) << '"';
    if (!t.ref.empty()) os_ << " data-ref=\"" << escape_xml(t.ref) << '"';
    os_ << '>' << escape_xml(t.content) << "</text>\n";
  }

  std::ostream& stream() { return os_; }

 private:
  void tail(double opacity, const std::string& ref) {
    if (opacity < 1.0) os_ << " opacity=\"" << format_mm(opacity) << '"';
    if (!ref.empty()) os_ << " data-ref=\"" << escape_xml(ref) << '"';
    os_ << "/>\n";
  }

  std::ostream& os_;
};

void check(std::ostream& sink) {
  if (!sink) throw IoError("failed writing SVG output");
}

}  // namespace

std::string format_mm(double value) {
  double rounded = std::round(value * 1e6) / 1e6;
  if (rounded == 0.0) rounded = 0.0;  // drop the sign of -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, rounded, std::chars_format::fixed, 6);
  std::string s(buf, end);
  if (auto dot = s.find('.'); dot != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

void emit_svg(const SliceDocument& doc, std::ostream& sink) {
  Writer w(sink);
  w.header(doc.page.width_mm, doc.page.height_mm);
  w.document_body(doc, "  ");
  w.footer();
  check(sink);
}

void emit_svg(const SheetDocument& sheet, std::ostream& sink) {
  Writer w(sink);
  w.header(sheet.sheet.width_mm, sheet.sheet.height_mm);
  for (const auto& placed : sheet.placed) {
    const auto& p = placed.placement;
    w.stream() << "  <g transform=\"translate(" << format_mm(p.translate_x) << ' ' << format_mm(p.translate_y)
               << ')';
    if (p.rotation_deg != 0) w.stream() << " rotate(" << p.rotation_deg << ')';
    w.stream() << "\">\n";
    w.document_body(placed.document, "    ");
    w.stream() << "  </g>\n";
  }
  std::vector<Primitive> cuts(sheet.cut_lines.begin(), sheet.cut_lines.end());
  w.group("cut-lines", cuts, "  ");
  w.footer();
  check(sink);
}

std::string to_svg(const SliceDocument& doc) {
  std::ostringstream os;
  emit_svg(doc, os);
  return os.str();
}

std::string to_svg(const SheetDocument& sheet) {
  std::ostringstream os;
  emit_svg(sheet, os);
  return os.str();
}

}  // namespace hologforge
