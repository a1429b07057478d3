#ifndef KDSIM_HARNESS_SWEEP_HPP
#define KDSIM_HARNESS_SWEEP_HPP

#include <atomic>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "kdsim/harness/runner.hpp"
#include "kdsim/harness/scenario.hpp"

// Parameter sweeps: a template scenario plus one or more axes, each a
// JSON pointer into the scenario document and a list of values. Cells
// are the cartesian product, run concurrently up to a worker limit.
// Each cell leaves its own manifest; finished cells are skipped on
// resume, and one failed cell does not stop the campaign.

namespace kdsim {

struct SweepAxis {
  std::string pointer; // e.g. "/config/beams/0/pulse_sigma_fs"
  std::vector<json> values;
};

struct SweepCellResult {
  std::string name;
  bool ok = false;
  bool skipped = false;
  std::string error;
  std::vector<std::pair<std::string, json>> parameters;
  json summary; // sideband stats / order counts when produced
};

struct SweepResult {
  fs::path campaign_dir;
  std::vector<SweepCellResult> cells;
  bool all_ok() const {
    for (const auto& c : cells)
      if (!c.ok) return false;
    return true;
  }
};

namespace detail {

inline std::string cell_suffix(const std::vector<std::pair<std::string, json>>& params) {
  std::string s;
  for (const auto& [ptr, v] : params) {
    std::string leaf = ptr.substr(ptr.find_last_of('/') + 1);
    s += "_" + leaf + "=" + v.dump();
  }
  return s;
}

} // namespace detail

inline SweepResult run_sweep(const json& scenario_template,
                             const std::vector<SweepAxis>& axes,
                             fs::path root = output_root(),
                             unsigned workers = 0, bool resume = false,
                             std::size_t job_cap = 4096) {
  std::size_t cells_total = 1;
  for (const auto& a : axes) cells_total *= a.values.size();
  if (cells_total == 0 || cells_total > job_cap)
    throw ConfigError("sweep", "axis product empty or above the job cap");

  Scenario base = scenario_from_json(scenario_template);
  SweepResult result;
  result.campaign_dir = root / base.config.output.directory / (base.name + "_sweep");
  fs::create_directories(result.campaign_dir);

  // expand the cartesian product
  std::vector<std::vector<std::pair<std::string, json>>> cells;
  for (std::size_t flat = 0; flat < cells_total; ++flat) {
    std::vector<std::pair<std::string, json>> params;
    std::size_t rem = flat;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      std::size_t n = axes[a].values.size();
      params.emplace_back(axes[a].pointer, axes[a].values[rem % n]);
      rem /= n;
    }
    cells.push_back(std::move(params));
  }

  result.cells.resize(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex index_mutex; // guards the append-only campaign index

  unsigned n_workers = workers > 0 ? workers
                                   : std::max(1u, std::thread::hardware_concurrency() - 1);
  n_workers = std::min<unsigned>(n_workers, unsigned(cells.size()));

  fs::path index_path = result.campaign_dir / "campaign_index.jsonl";
  if (!resume && fs::exists(index_path)) fs::remove(index_path);

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      SweepCellResult& cell = result.cells[i];
      cell.parameters = cells[i];
      json doc = scenario_template;
      for (const auto& [ptr, v] : cells[i])
        doc[json::json_pointer(ptr)] = v;
      try {
        Scenario sc = scenario_from_json(doc);
        sc.name = base.name + detail::cell_suffix(cells[i]);
        cell.name = sc.name;
        sc.config.output.directory =
            (fs::path(base.config.output.directory) / (base.name + "_sweep")).string();

        fs::path manifest = root / sc.config.output.directory / sc.name / "manifest.json";
        if (resume && fs::exists(manifest)) {
          RunManifest m = read_manifest(manifest);
          if (m.config_hash == scenario_config_hash(sc) && m.completed) {
            cell.ok = true;
            cell.skipped = true;
            continue;
          }
        }
        RunOutputs out = run_scenario(sc, root);
        cell.ok = out.manifest.completed;
        json summary{{"final_norm", out.manifest.final_norm}};
        if (out.sidebands) {
          summary["sideband_count"] = out.sidebands->count;
          summary["sideband_mean_ev"] = out.sidebands->mean_spacing;
          summary["sideband_se_ev"] = out.sidebands->standard_error;
        }
        if (out.orders) {
          int populated = 0;
          double peak = 0.0;
          for (double w : out.orders->weight) peak = std::max(peak, w);
          for (double w : out.orders->weight)
            if (w >= 1e-3 * peak) ++populated;
          summary["populated_orders"] = populated;
        }
        cell.summary = summary;
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
      }
      {
        std::lock_guard<std::mutex> lock(index_mutex);
        json line{{"cell", cell.name},
                  {"ok", cell.ok},
                  {"error", cell.error},
                  {"summary", cell.summary}};
        std::ofstream idx(index_path, std::ios::app);
        idx << line.dump() << "\n";
      }
    }
  };

  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // aggregate table
  std::string agg;
  {
    std::string header = "cell";
    for (const auto& a : axes) header += "," + a.pointer;
    header += ",ok,summary\n";
    agg = header;
    for (const auto& c : result.cells) {
      agg += c.name;
      for (const auto& [ptr, v] : c.parameters) agg += "," + v.dump();
      agg += std::string(",") + (c.ok ? "1" : "0") + "," +
             (c.summary.is_null() ? "{}" : c.summary.dump()) + "\n";
    }
  }
  write_file(result.campaign_dir / "aggregate.csv", agg);
  return result;
}

} // namespace kdsim

#endif
