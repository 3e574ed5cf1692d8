#include "fairsim/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fairsim/config.hpp"
#include "fairsim/metrics.hpp"
#include "fairsim/sim.hpp"

namespace fairsim {

namespace fs = std::filesystem;

namespace {

class ProgressObserver : public RoundObserver {
 public:
  ProgressObserver(std::ostream& out, int total_rounds)
      : out_(out), total_rounds_(total_rounds) {}

  void on_round(int round, const RankedLists&, const RoundReport& report) override {
    out_ << "round " << round << "/" << total_rounds_ << " ndcg=" << report.ndcg
         << " agg_div=" << report.agg_div << " ee=" << report.ee
         << " cum_ee=" << report.cum_ee << " clicks=" << report.clicks << '\n';
    out_.flush();
  }

 private:
  std::ostream& out_;
  int total_rounds_;
};

struct LoadedRun {
  std::string dir;
  std::string pipeline;
  RunManifest manifest;
  std::vector<RoundReport> reports;
};

LoadedRun load_run(const std::string& dir) {
  LoadedRun run;
  run.dir = dir;
  run.manifest = RunManifest::load(fs::path(dir) / "manifest.json");

  std::ifstream config_in(fs::path(dir) / "config.json");
  if (!config_in) throw std::runtime_error("cannot read config.json in " + dir);
  std::stringstream buffer;
  buffer << config_in.rdbuf();
  const SimConfig config = config_from_json(buffer.str());
  run.pipeline = to_string(config.pipeline);

  std::ifstream rounds_in(fs::path(dir) / "rounds.csv");
  if (!rounds_in) throw std::runtime_error("cannot read rounds.csv in " + dir);
  std::string line;
  bool first = true;
  while (std::getline(rounds_in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      continue;
    }
    run.reports.push_back(round_report_from_csv_row(line));
  }
  return run;
}

std::string format_metric(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.10g", value);
  return buffer;
}

}  // namespace

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            bool force, bool resume, std::ostream& out, std::ostream& err) {
  SimConfig config;
  try {
    config = load_config(config_path);
    apply_env_overrides(config);
    for (const std::string& assignment : overrides) apply_override(config, assignment);
    validate(config);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  const fs::path manifest_path = fs::path(config.output_dir) / "manifest.json";
  if (fs::exists(manifest_path) && !resume) {
    if (!force) {
      err << "error: run directory already contains a run: " << config.output_dir
          << " (use --force to overwrite or --resume to continue)\n";
      return 2;
    }
    fs::remove_all(config.output_dir);
  }

  try {
    ProgressObserver progress(out, config.rounds);
    const std::vector<RoundReport> reports = run(config, resume, &progress);
    out << "completed " << reports.size() << " round(s) in " << config.output_dir << '\n';
    return 0;
  } catch (const SimRoundError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_compare(const std::vector<std::string>& run_dirs, const std::string& merged_csv_path,
                std::ostream& out, std::ostream& err) {
  if (run_dirs.size() < 2) {
    err << "error: compare needs at least two run directories\n";
    return 2;
  }
  std::vector<LoadedRun> runs;
  try {
    for (const std::string& dir : run_dirs) runs.push_back(load_run(dir));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  for (const LoadedRun& run : runs) {
    if (run.manifest.dataset_fingerprint != runs.front().manifest.dataset_fingerprint) {
      err << "error: dataset fingerprint of " << run.dir << " does not match "
          << runs.front().dir << '\n';
      return 2;
    }
  }

  std::size_t common_rounds = runs.front().reports.size();
  for (const LoadedRun& run : runs) common_rounds = std::min(common_rounds, run.reports.size());
  for (const LoadedRun& run : runs) {
    if (run.reports.size() != common_rounds) {
      err << "warning: comparing over the first " << common_rounds << " round(s); " << run.dir
          << " has " << run.reports.size() << '\n';
    }
  }
  if (common_rounds == 0) {
    err << "error: no completed rounds in common\n";
    return 2;
  }

  // Key rows by pipeline; disambiguate repeated pipelines by position.
  std::vector<std::string> labels;
  for (const LoadedRun& run : runs) {
    std::string label = run.pipeline;
    int duplicates = 0;
    for (const std::string& existing : labels) {
      if (existing == label || existing.rfind(label + "#", 0) == 0) ++duplicates;
    }
    if (duplicates > 0) label += "#" + std::to_string(duplicates + 1);
    labels.push_back(label);
  }

  if (!merged_csv_path.empty()) {
    std::ofstream merged(merged_csv_path, std::ios::trunc);
    if (!merged) {
      err << "error: cannot write " << merged_csv_path << '\n';
      return 1;
    }
    merged << kCompareCsvHeader << '\n';
    for (std::size_t r = 0; r < runs.size(); ++r) {
      for (std::size_t i = 0; i < common_rounds; ++i) {
        merged << labels[r] << ',' << to_csv_row(runs[r].reports[i]) << '\n';
      }
    }
  }

  out << kCompareSummaryHeader << '\n';
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& reports = runs[r].reports;
    double ndcg_sum = 0;
    for (std::size_t i = 0; i < common_rounds; ++i) ndcg_sum += reports[i].ndcg;
    const RoundReport& last = reports[common_rounds - 1];
    out << labels[r] << ',' << common_rounds << ','
        << format_metric(ndcg_sum / static_cast<double>(common_rounds)) << ','
        << format_metric(last.cum_agg_div) << ',' << format_metric(last.cum_ee) << '\n';
  }
  return 0;
}

int cmd_inspect(const std::string& run_dir, int round, std::ostream& out, std::ostream& err) {
  RunManifest manifest;
  try {
    manifest = RunManifest::load(fs::path(run_dir) / "manifest.json");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  if (round < 1 || round > manifest.rounds_completed) {
    err << "error: round " << round << " not completed (run has " << manifest.rounds_completed
        << ")\n";
    return 2;
  }

  try {
    const ExposureLedger ledger = ExposureLedger::load(fs::path(run_dir) / "ledger.bin");
    const std::vector<double> cumulative = ledger.cumulative_through(round);

    out << "run " << manifest.run_id << " round " << round << "/"
        << manifest.rounds_completed << '\n';

    // Per-round target/degree dump, when the run recorded one.
    bool found_targets = false;
    std::ifstream rerank_in(fs::path(run_dir) / "rerank.jsonl");
    if (rerank_in) {
      std::string line;
      while (std::getline(rerank_in, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        if (j.at("round").get<int>() != round) continue;
        found_targets = true;
        out << "targets mode=" << j.at("mode").get<std::string>()
            << " discrepancy=" << j.at("discrepancy").get<long long>()
            << " overflow_units=" << j.at("overflow_units").get<long long>() << '\n';
        long long over = 0, under = 0, met = 0;
        for (const auto& entry : j.at("items")) {
          const long long target = entry.at(1).get<long long>();
          const long long degree = entry.at(2).get<long long>();
          if (degree > target)
            ++over;
          else if (degree < target)
            ++under;
          else
            ++met;
        }
        out << "items over_target=" << over << " under_target=" << under << " at_target=" << met
            << '\n';
        for (const auto& entry : j.at("items")) {
          out << "target item=" << entry.at(0).get<long long>() << " c=" << entry.at(1).get<long long>()
              << " degree=" << entry.at(2).get<long long>() << '\n';
        }
        break;
      }
    }
    if (!found_targets) out << "targets none recorded for this round\n";

    std::vector<int> order(cumulative.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&cumulative](int a, int b) {
      if (cumulative[a] != cumulative[b]) return cumulative[a] > cumulative[b];
      return a < b;
    });
    const std::size_t show = std::min<std::size_t>(10, order.size());
    for (std::size_t i = 0; i < show; ++i) {
      out << "most_exposed item=" << order[i] << " cum_exposure="
          << format_metric(cumulative[order[i]]) << '\n';
    }
    for (std::size_t i = 0; i < show; ++i) {
      const int item = order[order.size() - 1 - i];
      out << "least_exposed item=" << item << " cum_exposure="
          << format_metric(cumulative[item]) << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_dataset_stats(const std::string& dataset_path, const std::string& format,
                      const std::string& separator, std::ostream& out, std::ostream& err) {
  try {
    const LoadResult result =
        load_dataset(dataset_path, dataset_format_from_string(format), separator);
    out << result.report.to_json() << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace fairsim
