#include <array>
#include <fstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "wsnphm/errors.hpp"
#include "wsnphm/experiment.hpp"

namespace wsnphm {

void write_raw_csv(const ResultsTable& table, std::ostream& out) {
  out << "topology,algorithm,t,seed,error_rate,covered_fraction,alive_count,delivered_count\n";
  for (const ResultRow& row : table.rows) {
    fmt::print(out, "{},{},{},{},{:.6f},{:.6f},{},{}\n", to_string(row.topology), to_string(row.algorithm), row.t,
               row.seed, row.error_rate, row.covered_fraction, row.alive_count, row.delivered_count);
  }
}

void write_summary_csv(const std::vector<CurveSummary>& summary, std::ostream& out) {
  out << "topology,algorithm,t,mean_error,stderr_error,mean_covered_fraction,mean_alive_count,mean_delivered_count\n";
  for (const CurveSummary& curve : summary) {
    for (std::size_t t = 0; t < curve.error.size(); ++t) {
      fmt::print(out, "{},{},{},{:.6f},{:.6f},{:.6f},{:.3f},{:.3f}\n", to_string(curve.topology),
                 to_string(curve.algorithm), t, curve.error[t].mean, curve.error[t].stderr_, curve.covered[t],
                 curve.alive[t], curve.delivered[t]);
    }
  }
}

void write_lifetimes_csv(const ResultsTable& table, std::ostream& out) {
  out << "topology,seed,first_death,whole_network_death\n";
  for (const LifetimeRecord& life : table.lifetimes) {
    fmt::print(out, "{},{},{},{}\n", to_string(life.topology), life.seed, life.first_death,
               life.whole_network_death);
  }
}

namespace {

void write_knees_csv(const std::vector<CurveSummary>& summary, std::ostream& out) {
  out << "topology,algorithm,mean_first_death,mean_whole_network_death,knee\n";
  for (const CurveSummary& curve : summary) {
    fmt::print(out, "{},{},{:.2f},{:.2f},{}\n", to_string(curve.topology), to_string(curve.algorithm),
               curve.first_death, curve.whole_network_death, curve.knee ? fmt::format("{}", *curve.knee) : "");
  }
}

constexpr std::array kSeriesColors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
                                   "#e377c2", "#7f7f7f"};

}  // namespace

void write_chart_svg(TopologyKind topology, const std::vector<CurveSummary>& summary, std::ostream& out) {
  constexpr double width = 720;
  constexpr double height = 440;
  constexpr double left = 60;
  constexpr double right = 150;
  constexpr double top = 40;
  constexpr double bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  std::size_t steps = 1;
  for (const CurveSummary& curve : summary) {
    if (curve.topology == topology) {
      steps = std::max(steps, curve.error.size());
    }
  }
  const double t_span = steps > 1 ? static_cast<double>(steps - 1) : 1.0;
  auto x_of = [&](double t) { return left + plot_w * t / t_span; };
  auto y_of = [&](double pct) { return top + plot_h * (1.0 - pct / 100.0); };

  fmt::print(out,
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
             "font-family=\"sans-serif\" font-size=\"12\">\n",
             width, height);
  fmt::print(out, "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width, height);
  fmt::print(out, "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{} topology</text>\n",
             left + plot_w / 2, to_string(topology));

  for (int pct = 0; pct <= 100; pct += 10) {
    const double y = y_of(pct);
    fmt::print(out, "<line x1=\"{}\" y1=\"{:.1f}\" x2=\"{}\" y2=\"{:.1f}\" stroke=\"#e0e0e0\"/>\n", left, y,
               left + plot_w, y);
    fmt::print(out, "<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", left - 6, y + 4, pct);
  }
  const int tick = steps > 50 ? 10 : steps > 10 ? 5 : 1;
  for (std::size_t t = 0; t < steps; t += static_cast<std::size_t>(tick)) {
    const double x = x_of(static_cast<double>(t));
    fmt::print(out, "<line x1=\"{0:.1f}\" y1=\"{1}\" x2=\"{0:.1f}\" y2=\"{2}\" stroke=\"#333\"/>\n", x,
               top + plot_h, top + plot_h + 5);
    fmt::print(out, "<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", x, top + plot_h + 18, t);
  }
  fmt::print(out, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n", left, top,
             plot_w, plot_h);
  fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">operating age t</text>\n", left + plot_w / 2,
             height - 10);
  fmt::print(out, "<text x=\"16\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">error rate (%)</text>\n",
             top + plot_h / 2);

  std::size_t series = 0;
  for (const CurveSummary& curve : summary) {
    if (curve.topology != topology) {
      continue;
    }
    const char* color = kSeriesColors[series % kSeriesColors.size()];
    std::string points;
    for (std::size_t t = 0; t < curve.error.size(); ++t) {
      points += fmt::format("{}{:.1f},{:.1f}", t == 0 ? "" : " ", x_of(static_cast<double>(t)),
                            y_of(100.0 * curve.error[t].mean));
    }
    fmt::print(out, "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\" points=\"{}\"/>\n", color, points);
    const double ly = top + 14 + 20 * static_cast<double>(series);
    fmt::print(out, "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"3\"/>\n",
               left + plot_w + 14, ly, left + plot_w + 38, color);
    fmt::print(out, "<text x=\"{}\" y=\"{}\">{}</text>\n", left + plot_w + 44, ly + 4, to_string(curve.algorithm));
    ++series;
  }
  out << "</svg>\n";
}

namespace {

template <typename Writer>
std::filesystem::path write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError(fmt::format("cannot write {}", path.string()));
  }
  writer(out);
  out.flush();
  if (!out) {
    throw IoError(fmt::format("error while writing {}", path.string()));
  }
  return path;
}

}  // namespace

EmittedFiles emit(const ResultsTable& table, const std::vector<CurveSummary>& summary, const ExperimentConfig& config) {
  if (table.rows.empty()) {
    throw EmptyInputError("results table is empty");
  }
  const std::filesystem::path& dir = config.output.directory;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  }
  EmittedFiles files;
  files.paths.push_back(write_file(dir / "raw.csv", [&](std::ostream& o) { write_raw_csv(table, o); }));
  files.paths.push_back(write_file(dir / "summary.csv", [&](std::ostream& o) { write_summary_csv(summary, o); }));
  files.paths.push_back(write_file(dir / "lifetimes.csv", [&](std::ostream& o) { write_lifetimes_csv(table, o); }));
  files.paths.push_back(write_file(dir / "knees.csv", [&](std::ostream& o) { write_knees_csv(summary, o); }));
  if (config.output.charts) {
    for (TopologyKind kind : config.topologies) {
      const auto name = fmt::format("chart_{}.svg", to_string(kind));
      files.paths.push_back(write_file(dir / name, [&](std::ostream& o) { write_chart_svg(kind, summary, o); }));
    }
  }
  return files;
}

}  // namespace wsnphm
