#pragma once

#include <iosfwd>
#include <string>

#include "iekf/app/config.hpp"

namespace iekf::app {

inline constexpr const char* kCsvHeader = "t,err_rad,nees,iterations,delta_norm_final,trace_P";

/// Runs the experiment described by the manifest, writes the per-step CSV to
/// manifest.output_path and one summary line to `out`. Returns an ExitCode.
int run(const RunManifest& manifest, std::ostream& out, std::ostream& err);

/// %.17g formatting used for every floating-point CSV field.
std::string format_double(double value);

}  // namespace iekf::app
