#include "sinrsim/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace sinrsim::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::config_invalid, what); }

double number_at(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number()) bad(where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

}  // namespace

std::string format_number(double v) { return fmt::format("{}", v); }

Json topology_to_json(const Topologyd& t) {
  Json j;
  j["alpha"] = t.alpha();
  j["beta"] = t.beta();
  j["noise"] = t.noise();
  Json links = Json::array();
  for (const auto& l : t.links()) {
    Json e;
    e["id"] = l.id;
    e["sx"] = l.sender.x();
    e["sy"] = l.sender.y();
    e["rx"] = l.receiver.x();
    e["ry"] = l.receiver.y();
    links.push_back(std::move(e));
  }
  j["links"] = std::move(links);
  return j;
}

Topologyd topology_from_json(const Json& j) {
  if (!j.is_object()) bad("topology: expected an object");
  const double alpha = number_at(j, "alpha", "topology");
  const double beta = number_at(j, "beta", "topology");
  const double noise = number_at(j, "noise", "topology");
  if (!j.contains("links") || !j.at("links").is_array()) bad("topology.links: expected an array");
  std::vector<Linkd> links;
  for (std::size_t i = 0; i < j.at("links").size(); ++i) {
    const auto& e = j.at("links")[i];
    const std::string where = "topology.links[" + std::to_string(i) + "]";
    if (!e.is_object() || !e.contains("id") || !e.at("id").is_number_unsigned()) bad(where + ".id: expected an index");
    Linkd l;
    l.id = e.at("id").get<std::size_t>();
    l.sender = Point2d(number_at(e, "sx", where), number_at(e, "sy", where));
    l.receiver = Point2d(number_at(e, "rx", where), number_at(e, "ry", where));
    links.push_back(l);
  }
  try {
    return Topologyd(std::move(links), alpha, beta, noise);
  } catch (const Error& e) {
    bad(std::string("topology: ") + e.what());
  }
}

Json pool_to_json(const FeasibleSetPool& pool) {
  Json j;
  Json sets = Json::array();
  for (const auto& s : pool.sets) sets.push_back(s.ids());
  j["sets"] = std::move(sets);
  j["weights"] = pool.weights;
  return j;
}

FeasibleSetPool pool_from_json(const Json& j, std::size_t n) {
  if (!j.is_object() || !j.contains("sets") || !j.at("sets").is_array()) bad("pool.sets: expected an array");
  if (!j.contains("weights") || !j.at("weights").is_array()) bad("pool.weights: expected an array");
  FeasibleSetPool pool;
  for (const auto& s : j.at("sets")) {
    std::vector<LinkId> ids;
    for (const auto& id : s) {
      if (!id.is_number_unsigned() || id.get<std::size_t>() >= n) bad("pool.sets: link id out of range");
      ids.push_back(id.get<LinkId>());
    }
    pool.sets.emplace_back(std::move(ids));
  }
  for (const auto& w : j.at("weights")) {
    if (!w.is_number() || w.get<double>() < 0) bad("pool.weights: expected non-negative numbers");
    pool.weights.push_back(w.get<double>());
  }
  if (pool.weights.size() != pool.sets.size()) bad("pool: sets and weights differ in length");
  return pool;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config_invalid, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::config_invalid, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_failure, "cannot write " + path.string());
  out << contents;
  if (!out) throw Error(ErrorCode::io_failure, "short write to " + path.string());
}

void write_metrics_csv(std::ostream& os, const MetricsSeries& ms) {
  os << "slot,max_queue,mean_queue,departures\n";
  for (const auto& cp : ms.checkpoints) {
    fmt::print(os, "{},{},{},{}\n", cp.slot, cp.max_queue, cp.mean_queue, cp.departures);
  }
}

void write_running_max_csv(std::ostream& os, const MetricsSeries& ms) {
  os << "slot,running_max_queue\n";
  for (const auto& cp : ms.checkpoints) fmt::print(os, "{},{}\n", cp.slot, cp.running_max_queue);
}

void write_sweep_runs_csv(std::ostream& os, const SweepResult& r) {
  os << "rho,run,final_max_queue,stable,slope\n";
  for (const auto& p : r.points) {
    for (std::size_t i = 0; i < p.runs.size(); ++i) {
      fmt::print(os, "{},{},{},{},{}\n", p.rho, i, p.runs[i].final_max_queue(), p.verdicts[i].stable ? 1 : 0,
                 p.verdicts[i].slope);
    }
  }
}

void write_sweep_summary_csv(std::ostream& os, const SweepResult& r) {
  os << "rho,mean_final_max_queue,unstable_fraction\n";
  for (const auto& p : r.points) fmt::print(os, "{},{},{}\n", p.rho, p.mean_final_max_queue, p.unstable_fraction);
}

void write_sweep_svg(std::ostream& os, std::span<const SweepResult> results) {
  constexpr double width = 640, height = 420, left = 70, right = 150, top = 30, bottom = 50;
  constexpr double plot_w = width - left - right, plot_h = height - top - bottom;
  static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  double xmin = 1.0, xmax = 0.0, ymax = 1.0;
  for (const auto& r : results)
    for (const auto& p : r.points) {
      xmin = std::min(xmin, p.rho);
      xmax = std::max(xmax, p.rho);
      ymax = std::max(ymax, std::log10(1.0 + p.mean_final_max_queue));
    }
  if (xmax <= xmin) xmax = xmin + 0.01;
  ymax = std::ceil(ymax);
  auto sx = [&](double rho) { return left + (rho - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double q) { return top + plot_h - std::log10(1.0 + q) / ymax * plot_h; };

  fmt::print(os, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
                 "font-size=\"12\">\n", width, height);
  fmt::print(os, "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width, height);
  fmt::print(os, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left, top,
             plot_w, plot_h);
  for (int decade = 0; decade <= static_cast<int>(ymax); ++decade) {
    const double q = std::pow(10.0, decade) - (decade == 0 ? 1.0 : 0.0);
    const double y = sy(q);
    fmt::print(os, "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n", left, y,
               left + plot_w, y);
    fmt::print(os, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", left - 6, y + 4,
               static_cast<long long>(q));
  }
  for (int i = 0; i <= 5; ++i) {
    const double rho = xmin + (xmax - xmin) * i / 5.0;
    fmt::print(os, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.2f}</text>\n", sx(rho),
               top + plot_h + 18, rho);
  }
  fmt::print(os, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">load factor rho</text>\n",
             left + plot_w / 2, height - 10);
  fmt::print(os, "<text x=\"15\" y=\"{:.2f}\" transform=\"rotate(-90 15 {:.2f})\" text-anchor=\"middle\">"
                 "mean final max queue</text>\n", top + plot_h / 2, top + plot_h / 2);

  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto* color = colors[k % std::size(colors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < results[k].points.size(); ++i) {
      const auto& p = results[k].points[i];
      fmt::print(os, "{}{:.2f},{:.2f}", i ? " " : "", sx(p.rho), sy(p.mean_final_max_queue));
    }
    os << "\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(k + 1);
    fmt::print(os, "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
               left + plot_w + 10, ly, left + plot_w + 30, ly, color);
    fmt::print(os, "<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", left + plot_w + 35, ly + 4,
               to_string(results[k].algorithm));
  }
  os << "</svg>\n";
}

}  // namespace sinrsim::io
