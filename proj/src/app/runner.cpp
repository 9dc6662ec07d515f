#include "iekf/app/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "iekf/errors.hpp"
#include "iekf/simulation.hpp"

namespace iekf::app {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

void append_record(std::ostringstream& os, const sim::StepRecord& s) {
  os << format_double(s.err_rad) << ',' << format_double(s.nees) << ','
     << format_double(s.iterations) << ',' << format_double(s.delta_norm_final) << ','
     << format_double(s.trace_P);
}

std::string single_csv(const sim::RunMetrics& m) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& s : m.steps) {
    os << format_double(s.t) << ',';
    append_record(os, s);
    os << '\n';
  }
  return os.str();
}

std::string compare_csv(const sim::RunMetrics& ekf, const sim::RunMetrics& iekf) {
  std::ostringstream os;
  os << "t";
  for (const char* prefix : {"ekf_", "iekf_"}) {
    for (const char* col : {"err_rad", "nees", "iterations", "delta_norm_final", "trace_P"}) {
      os << ',' << prefix << col;
    }
  }
  os << ",err_rad_delta\n";
  for (std::size_t k = 0; k < ekf.steps.size(); ++k) {
    os << format_double(ekf.steps[k].t) << ',';
    append_record(os, ekf.steps[k]);
    os << ',';
    append_record(os, iekf.steps[k]);
    os << ',' << format_double(iekf.steps[k].err_rad - ekf.steps[k].err_rad) << '\n';
  }
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  const std::filesystem::path p(path);
  const auto parent = p.parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw ConfigError(kExitIoError, "output directory '" + parent.string() + "' does not exist");
  }
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError(kExitIoError, "cannot open '" + path + "' for writing");
  out << contents;
  out.flush();
  if (!out) throw ConfigError(kExitIoError, "failed writing '" + path + "'");
}

std::string summary(const char* label, const sim::RunMetrics& m) {
  std::ostringstream os;
  os << label << "rmse=" << format_double(m.attitude_rmse)
     << ' ' << label << "final_error=" << format_double(m.final_error)
     << ' ' << label << "mean_nees=" << format_double(m.mean_nees)
     << ' ' << label << "coverage_3sigma=" << format_double(m.within_3sigma_fraction)
     << ' ' << label << "mean_iterations=" << format_double(m.mean_iterations);
  return os.str();
}

}  // namespace

int run(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
  try {
    manifest.validate();
    const auto& scenario = manifest.scenario;
    std::string csv;
    std::string line = "mode=" + to_string(manifest.mode) +
                       " variant=" + to_string(manifest.filter.update_variant) +
                       " convention=" + to_string(scenario.convention) + ' ';

    switch (manifest.mode) {
      case Mode::kSingle: {
        const auto metrics = sim::run_filter(sim::generate(scenario), scenario, manifest.filter);
        csv = single_csv(metrics);
        line += "steps=" + std::to_string(metrics.steps.size()) + ' ' + summary("", metrics);
        break;
      }
      case Mode::kMonteCarlo: {
        const auto metrics = sim::monte_carlo(scenario, manifest.filter, manifest.trials);
        csv = single_csv(metrics);
        line += "trials=" + std::to_string(manifest.trials) + ' ' + summary("", metrics);
        break;
      }
      case Mode::kCompare: {
        const auto run = sim::generate(scenario);
        IekfConfig ekf_cfg = manifest.filter;
        ekf_cfg.max_iterations = 1;
        const auto ekf = sim::run_filter(run, scenario, ekf_cfg);
        const auto iekf = sim::run_filter(run, scenario, manifest.filter);
        csv = compare_csv(ekf, iekf);
        line += summary("ekf_", ekf) + ' ' + summary("iekf_", iekf) +
                " rmse_ratio=" + format_double(iekf.attitude_rmse / ekf.attitude_rmse);
        break;
      }
    }
    write_file(manifest.output_path, csv);
    out << line << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return e.code();
  } catch (const NumericalFailure& e) {
    err << "filter failure: " << e.what() << '\n';
    return kExitFilterFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFilterFailure;
  }
}

}  // namespace iekf::app
