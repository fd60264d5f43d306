#include "plkit/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace plkit {

using nlohmann::json;

namespace {

json curve_json(const JordanCurve& c) {
  json a = json::array();
  for (const auto& v : c.vertices()) a.push_back({v.real(), v.imag()});
  return a;
}

std::vector<CPoint> points_of(const json& a) {
  std::vector<CPoint> pts;
  for (const auto& p : a) {
    if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::ParseError, "curve vertex must be [re, im]");
    pts.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return pts;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

std::string curve_to_json(const JordanCurve& c) { return curve_json(c).dump(); }

JordanCurve curve_from_json(const std::string& text) {
  const auto cs = curves_from_json(text);
  if (cs.size() != 1) throw Error(ErrorCode::ParseError, "expected a single curve");
  return cs.front();
}

std::vector<JordanCurve> curves_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::ParseError, "curve JSON must be a non-empty array");
  std::vector<JordanCurve> out;
  try {
    if (j[0].is_array() && !j[0].empty() && j[0][0].is_array()) {
      for (const auto& c : j) out.emplace_back(points_of(c));
    } else {
      out.emplace_back(points_of(j));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return out;
}

std::string curves_to_json(const std::vector<JordanCurve>& cs) {
  json a = json::array();
  for (const auto& c : cs) a.push_back(curve_json(c));
  return a.dump();
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    std::uint32_t v = static_cast<std::uint32_t>(bytes[i]) << 16;
    if (i + 1 < bytes.size()) v |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
    if (i + 2 < bytes.size()) v |= bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=';
    out += i + 2 < bytes.size() ? kAlphabet[v & 63] : '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  std::array<int, 256> rev;
  rev.fill(-1);
  for (int k = 0; k < 64; ++k) rev[static_cast<unsigned char>(kAlphabet[k])] = k;
  std::vector<std::uint8_t> out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char ch : text) {
    if (ch == '=') break;
    if (ch == '\n' || ch == '\r' || ch == ' ') continue;
    const int v = rev[static_cast<unsigned char>(ch)];
    if (v < 0) throw Error(ErrorCode::ParseError, "invalid base64 character");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

std::string grid_to_json(const GridSet& g) {
  std::vector<std::uint8_t> packed((g.cell_count() + 7) / 8, 0);
  for (std::size_t k = 0; k < g.cell_count(); ++k)
    if (g.test(k)) packed[k / 8] |= static_cast<std::uint8_t>(1u << (k % 8));
  json j;
  j["rect"] = {{g.rect().lo.real(), g.rect().lo.imag()}, {g.rect().hi.real(), g.rect().hi.imag()}};
  j["nx"] = g.nx();
  j["ny"] = g.ny();
  j["cells"] = base64_encode(packed);
  return j.dump();
}

GridSet grid_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    const auto& r = j.at("rect");
    const Box rect{{r[0][0].get<double>(), r[0][1].get<double>()}, {r[1][0].get<double>(), r[1][1].get<double>()}};
    GridSet g(rect, j.at("nx").get<int>(), j.at("ny").get<int>());
    const auto packed = base64_decode(j.at("cells").get<std::string>());
    if (packed.size() != (g.cell_count() + 7) / 8) throw Error(ErrorCode::ParseError, "grid bitmask has wrong length");
    for (std::size_t k = 0; k < g.cell_count(); ++k) g.set(k, (packed[k / 8] >> (k % 8)) & 1u);
    return g;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

Render render_grid(const GridSet& g, Rgb on, Rgb off) {
  Render r{g.nx(), g.ny(), std::vector<Rgb>(g.cell_count())};
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      r.pixels[static_cast<std::size_t>(g.ny() - 1 - j) * g.nx() + i] = g.test(i, j) ? on : off;
  return r;
}

void draw_curve(Render& r, const GridSet& shape, const JordanCurve& c, Rgb color) {
  const GridSet outline = rasterize_outline({c}, shape);
  for (int j = 0; j < shape.ny(); ++j)
    for (int i = 0; i < shape.nx(); ++i)
      if (outline.test(i, j)) r.pixels[static_cast<std::size_t>(shape.ny() - 1 - j) * shape.nx() + i] = color;
}

void write_ppm(const std::string& path, const Render& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  out << "P6\n" << r.width << ' ' << r.height << "\n255\n";
  for (const auto& p : r.pixels) out.write(reinterpret_cast<const char*>(p.data()), 3);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  out << text;
}

}  // namespace plkit
