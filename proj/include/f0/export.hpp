#pragma once

// Tab-separated f0 tables and SVG plots.
//
// Table layout (byte-exact):
//   # time_s\tf0_hz
//   <time, 6 decimals>\t<f0, 3 decimals | nan>
// one row per frame in ascending time.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include "f0/dsp.hpp"
#include "f0/error.hpp"
#include "f0/track.hpp"

namespace f0 {

inline constexpr std::string_view kTableHeader = "# time_s\tf0_hz";
inline constexpr double kPlotFloorDb = -80.0;

namespace detail {

template <class... Args>
std::string fmt(const char* pattern, Args... args) {
  std::array<char, 128> buf{};
  const int n = std::snprintf(buf.data(), buf.size(), pattern, args...);
  return std::string(buf.data(), static_cast<std::size_t>(std::max(n, 0)));
}

}  // namespace detail

/// Writes the table and returns the number of data rows.
inline std::size_t export_table(const PitchTrack& track, std::ostream& out) {
  if (track.frames.empty()) throw Error(Errc::empty_track, "refusing to export an empty track");
  std::string text;
  text.reserve(24 * (track.frames.size() + 1));
  text += kTableHeader;
  text += '\n';
  for (const auto& f : track.frames) {
    text += detail::fmt("%.6f", f.time);
    text += '\t';
    text += f.voiced && f.f0 ? detail::fmt("%.3f", *f.f0) : std::string("nan");
    text += '\n';
  }
  out << text;
  out.flush();
  if (!out) throw Error(Errc::io_failure, "table write failed");
  return track.frames.size();
}

inline std::string table_string(const PitchTrack& track) {
  std::ostringstream os;
  export_table(track, os);
  return os.str();
}

struct TableRow {
  double time = 0.0;
  std::optional<double> f0;
};

/// Reads back a table produced by export_table.
inline std::vector<TableRow> parse_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTableHeader) {
    throw Error(Errc::malformed_header, "missing table header");
  }
  std::vector<TableRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(Errc::malformed_header, "row without tab: " + line);
    TableRow row;
    try {
      row.time = std::stod(line.substr(0, tab));
      const auto value = line.substr(tab + 1);
      if (value != "nan") row.f0 = std::stod(value);
    } catch (const std::logic_error&) {
      throw Error(Errc::malformed_header, "unparseable row: " + line);
    }
    rows.push_back(row);
  }
  return rows;
}

/// Writes `content` to a sibling temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_failure, "cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(Errc::io_failure, "short write to " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::io_failure, "cannot move output into " + path.string());
  }
}

namespace detail {

struct Rgb {
  double r, g, b;
};

// viridis, sampled at five stops
inline std::string heat_color(double level) {
  static constexpr std::array<Rgb, 5> stops{{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  level = std::clamp(level, 0.0, 1.0) * 4.0;
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(level), 3);
  const double u = level - static_cast<double>(i);
  const auto mix = [u](double a, double b) { return static_cast<int>(std::lround(a + (b - a) * u)); };
  return fmt("#%02x%02x%02x", mix(stops[i].r, stops[i + 1].r), mix(stops[i].g, stops[i + 1].g),
             mix(stops[i].b, stops[i + 1].b));
}

inline std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  std::vector<double> ticks;
  if (!(hi > lo)) return ticks;
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  }
  return ticks;
}

/// Maps data coordinates into one panel's pixel box.
struct Panel {
  double left, top, width, height;
  double x_lo, x_hi, y_lo, y_hi;

  double x(double v) const { return left + (v - x_lo) / (x_hi - x_lo) * width; }
  double y(double v) const { return top + height - (v - y_lo) / (y_hi - y_lo) * height; }
};

inline void draw_axes(std::string& svg, const Panel& p, std::string_view title, std::string_view y_label) {
  svg += fmt("<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" stroke=\"#000\"/>\n",
             p.left, p.top, p.width, p.height);
  svg += fmt("<text x=\"%.2f\" y=\"%.2f\" font-size=\"13\">", p.left, p.top - 8.0);
  svg.append(title);
  svg += "</text>\n";
  for (double t : nice_ticks(p.x_lo, p.x_hi)) {
    const double x = p.x(t);
    svg += fmt("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#000\"/>", x, p.top + p.height, x,
               p.top + p.height + 4.0);
    svg += fmt("<text x=\"%.2f\" y=\"%.2f\" font-size=\"10\" text-anchor=\"middle\">%g</text>\n", x,
               p.top + p.height + 15.0, t);
  }
  for (double t : nice_ticks(p.y_lo, p.y_hi, 5)) {
    const double y = p.y(t);
    svg += fmt("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#000\"/>", p.left - 4.0, y, p.left,
               y);
    svg += fmt("<text x=\"%.2f\" y=\"%.2f\" font-size=\"10\" text-anchor=\"end\">%g</text>\n", p.left - 6.0,
               y + 3.5, t);
  }
  svg += fmt("<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\" text-anchor=\"middle\">time (s)</text>\n",
             p.left + p.width / 2.0, p.top + p.height + 30.0);
  svg += fmt("<text transform=\"translate(%.2f %.2f) rotate(-90)\" font-size=\"11\" text-anchor=\"middle\">", 16.0,
             p.top + p.height / 2.0);
  svg.append(y_label);
  svg += "</text>\n";
}

}  // namespace detail

/// Renders the three-panel figure: dB spectrogram, f0 scatter, envelope
/// level with the silence gate. The spectrogram is max-pooled onto at most
/// 600 x 160 cells so long clips stay small.
inline std::string render_svg(const Spectrogram& spec, const PitchTrack& track, const Envelope& env) {
  if (env.frame_times != spec.frame_times()) {
    throw Error(Errc::frame_grid_mismatch, "envelope and spectrogram frame grids differ");
  }
  using detail::fmt;

  constexpr double width = 900.0;
  constexpr double left = 70.0;
  constexpr double plot_w = width - left - 20.0;
  constexpr double panel_h = 220.0;
  constexpr double gap = 70.0;
  const double height = 3.0 * (panel_h + gap) + 10.0;

  const auto& times = spec.frame_times();
  const double dt = times.size() > 1 ? times[1] - times[0] : (times.empty() ? 1.0 : 2.0 * times[0]);
  double t_end = times.empty() ? 1.0 : times.back() + times.front();
  if (!track.frames.empty()) t_end = std::max(t_end, track.frames.back().time + track.frames.front().time);
  const double nyquist = static_cast<double>(spec.sample_rate()) / 2.0;
  const auto [band_lo, band_hi] = std::visit([](const auto& c) { return std::pair{c.f_min, c.f_max}; }, track.config);

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += fmt("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%.0f\" height=\"%.0f\" "
             "viewBox=\"0 0 %.0f %.0f\" font-family=\"sans-serif\">\n",
             width, height, width, height);
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";

  // spectrogram
  const detail::Panel sp{left, 30.0, plot_w, panel_h, 0.0, t_end, 0.0, nyquist};
  {
    const std::size_t frames = spec.frame_count();
    const std::size_t bins = spec.bin_count();
    const std::size_t cols = std::min<std::size_t>(frames, 600);
    const std::size_t rows = std::min<std::size_t>(bins, 160);
    const double ref = spec.max_magnitude();
    const double bin_w = spec.bin_width();
    svg += "<g shape-rendering=\"crispEdges\">\n";
    svg += fmt("<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"", sp.left, sp.top, sp.width,
               sp.height);
    svg += detail::heat_color(0.0);
    svg += "\"/>\n";
    for (std::size_t r = 0; r < rows && ref > 0.0; ++r) {
      const std::size_t b0 = r * bins / rows;
      const std::size_t b1 = (r + 1) * bins / rows;
      const double f_lo = std::max(0.0, spec.freq_bins()[b0] - bin_w / 2.0);
      const double f_hi = std::min(nyquist, spec.freq_bins()[b1 - 1] + bin_w / 2.0);
      int run_level = -1;
      double run_x = 0.0;
      const auto flush = [&](double x_end) {
        if (run_level <= 0) return;
        svg += fmt("<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"", run_x, sp.y(f_hi),
                   x_end - run_x, sp.y(f_lo) - sp.y(f_hi));
        svg += detail::heat_color(run_level / 32.0);
        svg += "\"/>\n";
      };
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t j0 = c * frames / cols;
        const std::size_t j1 = (c + 1) * frames / cols;
        double m = 0.0;
        for (std::size_t j = j0; j < j1; ++j) {
          for (std::size_t b = b0; b < b1; ++b) m = std::max(m, spec.at(b, j));
        }
        const double db = m > 0.0 ? std::max(20.0 * std::log10(m / ref), kPlotFloorDb) : kPlotFloorDb;
        const int level = static_cast<int>(std::lround((db - kPlotFloorDb) / -kPlotFloorDb * 32.0));
        const double x0 = sp.x(std::max(0.0, times[j0] - dt / 2.0));
        if (level != run_level) {
          flush(x0);
          run_level = level;
          run_x = x0;
        }
      }
      if (frames > 0) flush(sp.x(std::min(t_end, times[frames - 1] + dt / 2.0)));
    }
    svg += "</g>\n";
    detail::draw_axes(svg, sp, "spectrogram (dB, floor -80)", "frequency (Hz)");
  }

  // f0 track
  const detail::Panel fp{left, 30.0 + panel_h + gap, plot_w, panel_h, 0.0, t_end, band_lo, band_hi};
  svg += "<g fill=\"#c0392b\">\n";
  for (const auto& f : track.frames) {
    if (!f.voiced || !f.f0) continue;
    svg += fmt("<circle class=\"f0\" cx=\"%.2f\" cy=\"%.2f\" r=\"1.6\"/>\n", fp.x(f.time), fp.y(*f.f0));
  }
  svg += "</g>\n";
  detail::draw_axes(svg, fp, std::string("f0 (") + std::string(to_string(track.method)) + ")", "f0 (Hz)");

  // envelope
  const detail::Panel ep{left, 30.0 + 2.0 * (panel_h + gap), plot_w, panel_h, 0.0, t_end, kPlotFloorDb, 0.0};
  {
    const double ref = env.max_value();
    if (ref > 0.0 && !env.values.empty()) {
      svg += "<polyline fill=\"none\" stroke=\"#2c3e50\" stroke-width=\"1\" points=\"";
      for (std::size_t j = 0; j < env.values.size(); ++j) {
        const double v = env.values[j];
        const double db = v > 0.0 ? std::max(20.0 * std::log10(v / ref), kPlotFloorDb) : kPlotFloorDb;
        if (j > 0) svg += ' ';
        svg += fmt("%.2f,%.2f", ep.x(env.frame_times[j]), ep.y(db));
      }
      svg += "\"/>\n";
    }
    if (const auto* tc = std::get_if<TrackerConfig>(&track.config)) {
      const double gate = std::max(tc->silence_threshold_db, kPlotFloorDb);
      svg += fmt("<line class=\"gate\" x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#e67e22\" "
                 "stroke-dasharray=\"6 4\"/>\n",
                 ep.left, ep.y(gate), ep.left + ep.width, ep.y(gate));
    }
    detail::draw_axes(svg, ep, "envelope (dB re max RMS)", "level (dB)");
  }

  svg += "</svg>\n";
  return svg;
}

inline void render_plot(const Spectrogram& spec, const PitchTrack& track, const Envelope& env,
                        const std::filesystem::path& destination) {
  write_file_atomic(destination, render_svg(spec, track, env));
}

}  // namespace f0
