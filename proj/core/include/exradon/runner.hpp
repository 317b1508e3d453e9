#pragma once

#include <string>
#include <vector>

#include "exradon/config.hpp"
#include "exradon/io.hpp"

namespace exradon {

struct RunResult {
  /// 0 = pass, 2 = verification failure, 1 = operational error.
  int exit_code = 0;
  std::vector<ManifestEntry> outputs;
  std::string summary;
};

/// Executes the configured experiment, writing CSV/JSON/SVG artifacts plus a
/// manifest into cfg.output_dir. Identical config and seed produce
/// byte-identical outputs.
RunResult run(const ExperimentConfig& cfg);

}  // namespace exradon
