#ifndef AGEBAYES_CLI_HPP
#define AGEBAYES_CLI_HPP

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace agebayes {

/// Named pairing of a teeth prior with a knee prior.
struct ModelPreset {
  std::string name;
  std::string teeth_prior;
  std::string knee_prior;
};

const std::vector<ModelPreset>& model_presets();
/// Throws UsageError for unknown names.
ModelPreset model_preset(std::string_view name);

/// Directory holding the bundled data files.
std::string default_data_dir();

/// Command-line entry point. Returns the process exit code:
/// 0 success, 1 usage error, 2 data error, 3 model or convergence error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace agebayes

#endif
