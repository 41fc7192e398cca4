/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/harness/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "enff/core/errors.hpp"

namespace enff::harness {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

// -----------------------------------------------------------------------------

std::string records_to_csv(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const auto& r : records) {
    os << r.system << "," << r.filter << "," << r.flow << "," << r.guidance << "," << r.T << ","
       << r.N << "," << r.seed << "," << r.param1_name << ","
       << (r.param1_name.empty() ? "" : format_double(r.param1)) << "," << r.param2_name << ","
       << (r.param2_name.empty() ? "" : format_double(r.param2)) << ","
       << format_double(r.summary_rmse) << "," << (r.diverged ? 1 : 0) << ","
       << format_double(r.wall_ms_per_step) << "\n";
  }
  return os.str();
}

void write_csv(const std::string& path, const std::vector<RunRecord>& records) {
  write_text(path, records_to_csv(records));
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  if (s.empty()) return 0.0;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw IoError(where + ": '" + s + "' is not a number");
  return v;
}

template <class Int>
Int parse_int(const std::string& s, const std::string& where) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw IoError(where + ": '" + s + "' is not an integer");
  return v;
}

}  // namespace

std::vector<RunRecord> parse_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split(line) != split(kCsvHeader))
    throw IoError(origin + ": missing or unexpected CSV header");
  std::vector<RunRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    const auto f = split(line);
    if (f.size() != 14) throw IoError(where + ": expected 14 fields, found " + std::to_string(f.size()));
    RunRecord r;
    r.system = f[0];
    r.filter = f[1];
    r.flow = f[2];
    r.guidance = f[3];
    r.T = parse_int<int>(f[4], where);
    r.N = parse_int<std::size_t>(f[5], where);
    r.seed = parse_int<std::uint64_t>(f[6], where);
    r.param1_name = f[7];
    r.param1 = parse_double(f[8], where);
    r.param2_name = f[9];
    r.param2 = parse_double(f[10], where);
    r.summary_rmse = parse_double(f[11], where);
    r.diverged = parse_int<int>(f[12], where) != 0;
    r.wall_ms_per_step = parse_double(f[13], where);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RunRecord> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), path);
}

void write_series_csv(const std::string& path, const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << "system,filter,flow,guidance,T,N,seed,step,rmse\n";
  for (const auto& r : records)
    for (std::size_t j = 0; j < r.rmse_series.size(); ++j)
      os << r.system << "," << r.filter << "," << r.flow << "," << r.guidance << "," << r.T << ","
         << r.N << "," << r.seed << "," << j + 1 << "," << format_double(r.rmse_series[j]) << "\n";
  write_text(path, os.str());
}

std::string tune_table_csv(const TuneResult& result) {
  std::ostringstream os;
  os << "T";
  for (const auto& n : result.names) os << "," << n;
  os << ",summary_rmse,diverged\n";
  for (const auto& r : result.table) {
    os << r.T;
    for (double p : r.params) os << "," << format_double(p);
    os << "," << format_double(r.summary_rmse) << "," << (r.diverged ? 1 : 0) << "\n";
  }
  return os.str();
}

nlohmann::json tune_best_json(const TuneResult& result) {
  nlohmann::json best = nlohmann::json::object();
  for (const auto& [T, p] : result.best) {
    if (!p) {
      best[std::to_string(T)] = nullptr;
      continue;
    }
    nlohmann::json entry = nlohmann::json::object();
    for (std::size_t i = 0; i < result.names.size(); ++i) entry[result.names[i]] = (*p)[i];
    best[std::to_string(T)] = entry;
  }
  return {{"filter", result.filter}, {"parameters", result.names}, {"best", best}};
}

// -----------------------------------------------------------------------------

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Stats {
  std::vector<double> finite;
  std::size_t diverged = 0;
  double mean() const {
    double s = 0.0;
    for (double v : finite) s += v;
    return s / static_cast<double>(finite.size());
  }
  double lo() const { return *std::min_element(finite.begin(), finite.end()); }
  double hi() const { return *std::max_element(finite.begin(), finite.end()); }
};

struct Series {
  std::string label;
  std::map<int, Stats> by_T;
};

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '&') o += "&amp;";
    else if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else o += c;
  }
  return o;
}

}  // namespace

std::string render_svg(const std::vector<RunRecord>& records, const PlotOptions& opts) {
  if (records.empty()) throw ConfigError("cannot plot an empty record set");

  std::vector<Series> series;
  for (const auto& r : records) {
    const std::string label = r.series_label();
    auto it = std::find_if(series.begin(), series.end(), [&](const Series& s) { return s.label == label; });
    if (it == series.end()) {
      series.push_back({label, {}});
      it = series.end() - 1;
    }
    Stats& st = it->by_T[r.T];
    if (r.diverged || !std::isfinite(r.summary_rmse))
      ++st.diverged;
    else
      st.finite.push_back(r.summary_rmse);
  }

  std::set<int> Ts;
  double ymax = 0.0;
  for (const auto& s : series)
    for (const auto& [T, st] : s.by_T) {
      if (T > 0) Ts.insert(T);
      if (!st.finite.empty()) ymax = std::max(ymax, st.hi());
    }
  ymax = ymax > 0.0 ? 1.1 * ymax : 1.0;
  double lx0 = 0.0, lx1 = 1.0;
  if (!Ts.empty()) {
    lx0 = std::log10(static_cast<double>(*Ts.begin()));
    lx1 = std::log10(static_cast<double>(*Ts.rbegin()));
    if (lx1 - lx0 < 1e-9) {
      lx0 -= 0.5;
      lx1 += 0.5;
    }
  }

  const double left = 70, right = 180, top = 40, bottom = 60;
  const double W = opts.width, H = opts.height;
  const double pw = W - left - right, ph = H - top - bottom;
  auto X = [&](double T) { return left + (std::log10(T) - lx0) / (lx1 - lx0) * pw; };
  auto Y = [&](double v) { return top + ph - v / ymax * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\""
     << opts.height << "\" viewBox=\"0 0 " << opts.width << " " << opts.height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(opts.title) << "</text>\n";

  // Axes and ticks.
  os << "<g stroke=\"black\" fill=\"none\">\n";
  os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(left + pw)
     << "\" y2=\"" << fmt(top + ph) << "\"/>\n";
  os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left) << "\" y2=\""
     << fmt(top + ph) << "\"/>\n";
  os << "</g>\n";
  os << "<g class=\"xticks\">\n";
  for (int T : Ts) {
    const double x = X(T);
    os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(x) << "\" y2=\""
       << fmt(top + ph + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(top + ph + 19) << "\" text-anchor=\"middle\">" << T
       << "</text>\n";
  }
  os << "</g>\n";
  os << "<g class=\"yticks\">\n";
  for (int k = 0; k <= 5; ++k) {
    const double v = ymax * k / 5.0;
    const double y = Y(v);
    os << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(left + pw)
       << "\" y2=\"" << fmt(y) << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">"
       << tick_label(v) << "</text>\n";
  }
  os << "</g>\n";
  os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(H - 18)
     << "\" text-anchor=\"middle\">sampling steps T (log scale)</text>\n";
  os << "<text x=\"18\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << fmt(top + ph / 2) << ")\">summary RMSE</text>\n";

  auto cross = [&](double x, const char* colour) {
    const double y = top + 6;
    os << "<path class=\"divergence\" d=\"M" << fmt(x - 5) << " " << fmt(y - 5) << " L" << fmt(x + 5)
       << " " << fmt(y + 5) << " M" << fmt(x - 5) << " " << fmt(y + 5) << " L" << fmt(x + 5) << " "
       << fmt(y - 5) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
  };

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kPalette[s % (sizeof kPalette / sizeof kPalette[0])];
    os << "<g class=\"series\" data-label=\"" << escape(series[s].label) << "\">\n";
    for (const auto& [T, st] : series[s].by_T) {
      if (T > 0) continue;
      // Filters without T: a horizontal reference line with its band.
      if (!st.finite.empty()) {
        os << "<rect class=\"band\" x=\"" << fmt(left) << "\" y=\"" << fmt(Y(st.hi())) << "\" width=\""
           << fmt(pw) << "\" height=\"" << fmt(Y(st.lo()) - Y(st.hi())) << "\" fill=\"" << colour
           << "\" fill-opacity=\"0.12\"/>\n";
        os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(Y(st.mean())) << "\" x2=\"" << fmt(left + pw)
           << "\" y2=\"" << fmt(Y(st.mean())) << "\" stroke=\"" << colour
           << "\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/>\n";
      }
      if (st.diverged) cross(left + 8, colour);
    }
    // Contiguous runs of T values with at least one finite record.
    std::vector<std::vector<std::pair<int, const Stats*>>> segments(1);
    for (const auto& [T, st] : series[s].by_T) {
      if (T <= 0) continue;
      if (st.finite.empty()) {
        if (!segments.back().empty()) segments.emplace_back();
      } else {
        segments.back().push_back({T, &st});
      }
    }
    for (const auto& seg : segments) {
      if (seg.empty()) continue;
      os << "<polygon class=\"band\" points=\"";
      for (const auto& [T, st] : seg) os << fmt(X(T)) << "," << fmt(Y(st->hi())) << " ";
      for (auto it = seg.rbegin(); it != seg.rend(); ++it)
        os << fmt(X(it->first)) << "," << fmt(Y(it->second->lo())) << " ";
      os << "\" fill=\"" << colour << "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
      os << "<polyline points=\"";
      for (std::size_t k = 0; k < seg.size(); ++k)
        os << (k ? " " : "") << fmt(X(seg[k].first)) << "," << fmt(Y(seg[k].second->mean()));
      os << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
      for (const auto& [T, st] : seg)
        os << "<circle cx=\"" << fmt(X(T)) << "\" cy=\"" << fmt(Y(st->mean())) << "\" r=\"3\" fill=\""
           << colour << "\"/>\n";
    }
    for (const auto& [T, st] : series[s].by_T)
      if (T > 0 && st.diverged) cross(X(T), colour);
    os << "</g>\n";
  }

  // Legend.
  const double lx = left + pw + 16;
  os << "<g class=\"legend\">\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kPalette[s % (sizeof kPalette / sizeof kPalette[0])];
    const double y = top + 10 + 20.0 * static_cast<double>(s);
    os << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(lx + 22) << "\" y2=\""
       << fmt(y) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fmt(lx + 28) << "\" y=\"" << fmt(y + 4) << "\">" << escape(series[s].label)
       << "</text>\n";
  }
  const double y = top + 10 + 20.0 * static_cast<double>(series.size());
  os << "<path d=\"M" << fmt(lx + 6) << " " << fmt(y - 5) << " L" << fmt(lx + 16) << " " << fmt(y + 5)
     << " M" << fmt(lx + 6) << " " << fmt(y + 5) << " L" << fmt(lx + 16) << " " << fmt(y - 5)
     << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  os << "<text x=\"" << fmt(lx + 28) << "\" y=\"" << fmt(y + 4) << "\">diverged</text>\n";
  os << "</g>\n</svg>\n";
  return os.str();
}

void write_svg(const std::string& path, const std::vector<RunRecord>& records, const PlotOptions& opts) {
  write_text(path, render_svg(records, opts));
}

}  // namespace enff::harness
