#ifndef AGEBAYES_IO_HPP
#define AGEBAYES_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "agebayes/assessment.hpp"
#include "agebayes/fitcheck.hpp"
#include "agebayes/inference.hpp"
#include "agebayes/population.hpp"
#include "agebayes/study_recon.hpp"

namespace agebayes {

/// Comma-separated text with '#' comments, optional "@key=value" directive
/// lines, then a header row and data rows.
struct CsvDocument {
  std::string source;
  std::map<std::string, std::string> directives;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;  // source line of each row

  std::string where(std::size_t row) const;
};

CsvDocument read_csv(const std::filesystem::path& path);
CsvDocument parse_csv(std::istream& in, std::string source);

/// Shortest text that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& text, const std::string& context);
long parse_long(const std::string& text, const std::string& context);

/// 3x3 table: rows teeth (mature, immature, missing), columns knee
/// (mature, immature, missing), optional "sum" row and column which are
/// validated when present.
ObservedTable parse_observed_table(const std::filesystem::path& path);
ObservedTable parse_observed_table(std::istream& in, const std::string& source);
void write_observed_table(std::ostream& out, const ObservedTable& table);
void write_predicted_table(std::ostream& out, const PredictedTable& table);

BinnedStudy load_binned_study(const std::filesystem::path& path);
QuantileStudy load_quantile_study(const std::filesystem::path& path);

nlohmann::json to_json(const IndicatorParams& p);
nlohmann::json to_json(const IndicatorPrior& p);
nlohmann::json to_json(const ChainConfig& c);
nlohmann::json to_json(const ObservedTable& t);
IndicatorParams indicator_params_from_json(const nlohmann::json& j);
IndicatorPrior indicator_prior_from_json(const nlohmann::json& j);
ObservedTable observed_table_from_json(const nlohmann::json& j);

/// Writes samples.csv (cycle, theta, cumulative psi at whole ages),
/// psi.csv (full profiles), tau.csv when latent counts were kept, and
/// metadata.json (config echo, acceptance rates, step sizes, wall time).
void write_chain(const ChainOutput& chain, const std::filesystem::path& dir,
                 const nlohmann::json& extra_metadata = nlohmann::json::object());

/// Reads a directory written by write_chain.
ChainOutput read_chain(const std::filesystem::path& dir);

void write_bands(std::ostream& out, const ProfileBands& bands);
void write_error_rates_csv(std::ostream& out, const std::vector<std::pair<std::string, ErrorRateTable>>& tables);
nlohmann::json error_rates_json(const std::vector<std::pair<std::string, ErrorRateTable>>& tables);
nlohmann::json to_json(const DiagnosticsReport& report);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace agebayes

#endif
