#include "certlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace certlab {

namespace {

void io_fail(const std::string& what, const std::string& path) {
  throw std::runtime_error(what + ": " + path);
}

std::string heatmap_header(Heatmap::Payload p) {
  switch (p) {
    case Heatmap::Payload::PassFail: return "x,y,pass,worst_value";
    case Heatmap::Payload::Converged: return "x,y,converged,final_miss";
    case Heatmap::Payload::Scalar: return "x,y,value";
  }
  return "";
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) io_fail("cannot open for writing", path);
  f << content;
  if (!f) io_fail("write failed", path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) io_fail("cannot open for reading", path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_heatmap_csv(const Heatmap& h, const std::string& path) {
  std::ostringstream out;
  out << heatmap_header(h.payload) << "\n";
  for (std::size_t iy = 0; iy < h.ys.size(); ++iy) {
    for (std::size_t ix = 0; ix < h.xs.size(); ++ix) {
      const Heatmap::Cell& c = h.at(static_cast<int>(ix), static_cast<int>(iy));
      out << format_double(h.xs[ix]) << ',' << format_double(h.ys[iy]);
      if (h.payload != Heatmap::Payload::Scalar) out << ',' << (c.flag ? 1 : 0);
      out << ',' << format_double(c.value) << "\n";
    }
  }
  write_text_file(path, out.str());
}

void write_trajectory_csv(const std::vector<TrajectoryRecord>& records,
                          const std::string& path) {
  if (records.empty())
    throw std::invalid_argument("trajectory must contain at least the t=0 row");
  const std::size_t k = records.front().x.coords.size();
  std::ostringstream out;
  out << "t";
  for (std::size_t i = 0; i < k; ++i) out << ",c" << i;
  out << ",L,G,N,D_S,D_N,D,sqnorm,loss,delta,terminal,remainder,diverged\n";
  for (const TrajectoryRecord& r : records) {
    out << r.t;
    for (std::size_t i = 0; i < k; ++i)
      out << ',' << format_double(r.x.coords[i]);
    out << ',' << format_double(r.obs.L) << ',' << format_double(r.obs.G)
        << ',' << format_double(r.obs.N) << ',' << format_double(r.obs.D_S)
        << ',' << format_double(r.obs.D_N) << ',' << format_double(r.obs.D)
        << ',' << format_double(r.obs.sqnorm) << ','
        << format_double(r.loss_value) << ',' << format_double(r.delta) << ','
        << (r.terminal ? 1 : 0) << ',' << format_double(r.remainder) << ','
        << (r.diverged ? 1 : 0) << "\n";
  }
  write_text_file(path, out.str());
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
    } else {
      field += c;
    }
  }
  if (!field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string manifest_json(const std::string& subcommand,
                          const std::map<std::string, std::string>& config) {
  nlohmann::ordered_json j;
  j["tool_version"] = kToolVersion;
  j["schema_version"] = kSchemaVersion;
  j["subcommand"] = subcommand;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [key, value] : config) cfg[key] = value;
  j["config"] = cfg;
  return j.dump(2) + "\n";
}

std::string json_number(double x) {
  if (!std::isfinite(x)) return "\"" + format_double(x) + "\"";
  return format_double(x);
}

void render_heatmap_ppm(const Heatmap& h, const std::string& path,
                        const std::vector<double>& overlay, int pixel_scale) {
  if (!overlay.empty() && overlay.size() != h.cells.size())
    throw std::invalid_argument("overlay size must match the cell grid");
  const int nx = static_cast<int>(h.xs.size());
  const int ny = static_cast<int>(h.ys.size());

  double vmin = 0, vmax = 1;
  if (h.payload == Heatmap::Payload::Scalar) {
    vmin = std::numeric_limits<double>::infinity();
    vmax = -vmin;
    for (const auto& c : h.cells)
      if (std::isfinite(c.value)) {
        vmin = std::min(vmin, c.value);
        vmax = std::max(vmax, c.value);
      }
    if (!(vmax > vmin)) {
      vmin = 0;
      vmax = 1;
    }
  }

  auto cell_color = [&](int ix, int iy, unsigned char rgb[3]) {
    const Heatmap::Cell& c = h.at(ix, iy);
    switch (h.payload) {
      case Heatmap::Payload::PassFail:
        if (c.flag) {
          rgb[0] = 46; rgb[1] = 160; rgb[2] = 67;
        } else {
          rgb[0] = 205; rgb[1] = 60; rgb[2] = 50;
        }
        break;
      case Heatmap::Payload::Converged:
        if (c.flag) {
          rgb[0] = 46; rgb[1] = 160; rgb[2] = 67;
        } else {
          rgb[0] = 245; rgb[1] = 245; rgb[2] = 245;
        }
        break;
      case Heatmap::Payload::Scalar: {
        double u = (c.value - vmin) / (vmax - vmin);
        if (!std::isfinite(u)) u = 1;
        u = std::min(1.0, std::max(0.0, u));
        const unsigned char g = static_cast<unsigned char>(255 * (1 - u));
        rgb[0] = rgb[1] = rgb[2] = g;
        break;
      }
    }
    if (!overlay.empty()) {
      // Zero contour of the overlay field: mark cells whose sign differs
      // from a right/up neighbor.
      const double v = overlay[static_cast<std::size_t>(iy) * nx + ix];
      bool edge = false;
      if (ix + 1 < nx &&
          v * overlay[static_cast<std::size_t>(iy) * nx + ix + 1] < 0)
        edge = true;
      if (iy + 1 < ny &&
          v * overlay[(static_cast<std::size_t>(iy) + 1) * nx + ix] < 0)
        edge = true;
      if (edge) rgb[0] = rgb[1] = rgb[2] = 0;
    }
  };

  std::string body;
  body.reserve(static_cast<std::size_t>(nx) * ny * pixel_scale * pixel_scale * 3);
  // Image rows run top to bottom; put the last y row at the top.
  for (int iy = ny - 1; iy >= 0; --iy) {
    for (int r = 0; r < pixel_scale; ++r) {
      for (int ix = 0; ix < nx; ++ix) {
        unsigned char rgb[3];
        cell_color(ix, iy, rgb);
        for (int s = 0; s < pixel_scale; ++s)
          body.append(reinterpret_cast<const char*>(rgb), 3);
      }
    }
  }
  std::ostringstream out;
  out << "P6\n" << nx * pixel_scale << ' ' << ny * pixel_scale << "\n255\n"
      << body;
  write_text_file(path, out.str());
}

}  // namespace certlab
