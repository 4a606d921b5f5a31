#include "agebayes/cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "agebayes/assessment.hpp"
#include "agebayes/error.hpp"
#include "agebayes/fitcheck.hpp"
#include "agebayes/inference.hpp"
#include "agebayes/io.hpp"
#include "agebayes/population.hpp"
#include "agebayes/study_recon.hpp"

namespace agebayes {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<ModelPreset>& model_presets() {
  static const std::vector<ModelPreset> presets{
      {"model1", "Lucas", "Ottow"},
      {"model2", "Mincer", "Ottow"},
      {"model3", "WideTeeth", "WideKnees"},
      {"model4", "Lucas", "OttowIIIc"},
      {"model5", "Mincer", "OttowIIIc"},
  };
  return presets;
}

ModelPreset model_preset(std::string_view name) {
  for (const auto& p : model_presets()) {
    if (p.name == name) return p;
  }
  throw UsageError("unknown model preset: " + std::string(name));
}

std::string default_data_dir() {
#ifdef AGEBAYES_DATA_DIR
  return AGEBAYES_DATA_DIR;
#else
  return "data";
#endif
}

namespace {

struct GridOptions {
  int points = 100;
  double shape = 4.0;
  double rate = 1.0;
  double shift = 15.0;
  double lower = 15.0;
  double upper = 30.0;
  double alpha = 3.0;

  void add(CLI::App* app) {
    app->add_option("--grid-points", points, "Number of grid ages T")->capture_default_str();
    app->add_option("--grid-shape", shape, "Gamma shape of the target age distribution")->capture_default_str();
    app->add_option("--grid-rate", rate, "Gamma rate of the target age distribution")->capture_default_str();
    app->add_option("--grid-shift", shift, "Shift added to the Gamma variate")->capture_default_str();
    app->add_option("--grid-lower", lower, "Lower truncation age")->capture_default_str();
    app->add_option("--grid-upper", upper, "Upper truncation age")->capture_default_str();
    app->add_option("--alpha", alpha, "Dirichlet concentration of the profile prior")->capture_default_str();
  }
  TruncatedGammaSpec target() const { return {shape, rate, shift, lower, upper}; }
  AgeGrid grid() const { return AgeGrid::build(target(), points); }
  json to_json() const {
    return {{"grid_points", points}, {"grid_shape", shape}, {"grid_rate", rate}, {"grid_shift", shift},
            {"grid_lower", lower},   {"grid_upper", upper}, {"alpha", alpha}};
  }
};

// Prior selection: preset, labels, then per-field overrides.
struct PriorOptions {
  std::string preset;
  std::string teeth_label;
  std::string knee_label;
  std::optional<double> overrides[2][4];

  void add(CLI::App* app, bool with_overrides) {
    app->add_option("--preset", preset, "Model preset (model1..model5)");
    app->add_option("--teeth-prior", teeth_label, "Teeth prior label (Lucas, Mincer, WideTeeth)");
    app->add_option("--knee-prior", knee_label, "Knee prior label (Ottow, WideKnees, OttowIIIc)");
    if (!with_overrides) return;
    static const char* ind[] = {"teeth", "knee"};
    static const char* field[] = {"location-mean", "location-sd", "scale-mean", "scale-sd"};
    for (int k = 0; k < 2; ++k) {
      for (int f = 0; f < 4; ++f) {
        app->add_option(std::string("--") + ind[k] + "-" + field[f], overrides[k][f],
                        std::string("Custom ") + ind[k] + " prior " + field[f]);
      }
    }
  }

  std::vector<IndicatorPrior> resolve(const std::string& default_preset) const {
    std::string teeth = teeth_label;
    std::string knee = knee_label;
    const std::string name = preset.empty() ? default_preset : preset;
    if (!name.empty()) {
      const auto p = model_preset(name);
      if (teeth.empty()) teeth = p.teeth_prior;
      if (knee.empty()) knee = p.knee_prior;
    }
    if (teeth.empty() || knee.empty()) throw UsageError("choose a --preset or both --teeth-prior and --knee-prior");
    std::vector<IndicatorPrior> priors{builtin_prior(teeth), builtin_prior(knee)};
    for (int k = 0; k < 2; ++k) {
      auto& p = priors[static_cast<std::size_t>(k)];
      double* fields[] = {&p.location_mean, &p.location_sd, &p.scale_mean, &p.scale_sd};
      bool custom = false;
      for (int f = 0; f < 4; ++f) {
        if (overrides[k][f]) {
          *fields[f] = *overrides[k][f];
          custom = true;
        }
      }
      if (custom) p.label = "custom(" + p.label + ")";
      if (!(p.location_sd > 0.0) || !(p.scale_sd > 0.0)) throw UsageError("prior standard deviations must be positive");
    }
    return priors;
  }

  std::string model_label() const {
    if (!preset.empty() && teeth_label.empty() && knee_label.empty()) return preset;
    return "";
  }
};

std::string default_table() { return (fs::path(default_data_dir()) / "table1_males_2017.csv").string(); }

std::string joined_command(int argc, const char* const* argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

IndicatorParams parse_theta(const std::string& text, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(parse_double(item, what));
  if (v.size() != 4) throw UsageError(what + " needs four comma-separated values");
  return {v[0], v[1], v[2], v[3]};
}

// ---------------------------------------------------------------- fit-studies

struct FitStudiesOptions {
  std::string data_dir = default_data_dir();
  std::string out;
};

int cmd_fit_studies(const FitStudiesOptions& o, std::ostream& out) {
  const fs::path dir = fs::path(o.data_dir) / "studies";
  const auto lucas = load_binned_study(dir / "lucas_2016.csv");
  const auto mincer = load_quantile_study(dir / "mincer_1993.csv");
  const auto ottow = load_quantile_study(dir / "ottow_2017.csv");
  const auto ottow_c = reassign_stage_fraction(ottow, "IIIc", 0.5);

  struct Row {
    std::string study;
    std::string indicator;
    std::size_t records;
    ProbitFit fit;
  };
  std::vector<Row> rows;
  auto add = [&](const std::string& name, const std::string& ind, const RawCohort& cohort) {
    rows.push_back({name, ind, cohort.records.size(), fit_probit_mle(cohort)});
  };
  add("Lucas", "teeth", reconstruct_binned(lucas));
  add("Mincer", "teeth", reconstruct_quantiles(mincer));
  add("Ottow", "knee", reconstruct_quantiles(ottow));
  add("OttowIIIc", "knee", reconstruct_quantiles(ottow_c));

  std::ostringstream csv;
  csv << "study,indicator,records,location,scale,gradient_norm\n";
  for (const auto& r : rows) {
    csv << r.study << ',' << r.indicator << ',' << r.records << ',' << format_double(r.fit.location) << ','
        << format_double(r.fit.scale) << ',' << format_double(r.fit.gradient_norm) << '\n';
    out << std::left << std::setw(10) << r.study << " location " << std::fixed << std::setprecision(2)
        << r.fit.location << "  scale " << r.fit.scale << "  (" << r.records << " records)\n";
  }
  out.unsetf(std::ios::floatfield);
  if (!o.out.empty()) write_text_file(o.out, csv.str());
  return 0;
}

// ---------------------------------------------------------------- check-fixed

struct CheckFixedOptions {
  std::string table = default_table();
  std::vector<std::string> pairs;
  long replicates = 100000;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out;
  GridOptions grid;
};

int cmd_check_fixed(const CheckFixedOptions& o, const std::string& command, std::ostream& out) {
  const ObservedTable y = parse_observed_table(o.table);
  const AgeGrid grid = o.grid.grid();
  const PopulationProfile psi = PopulationProfile::uniform(grid.size());
  std::vector<std::string> pairs = o.pairs;
  if (pairs.empty()) pairs = {"Lucas:Ottow", "Mincer:Ottow"};

  std::ostringstream csv;
  csv << "teeth_prior,knee_prior,teeth_location,teeth_scale,teeth_missing_at_20,teeth_missing_slope,"
         "knee_location,knee_scale,knee_missing_at_20,knee_missing_slope,boundary,statistic,replicates,"
         "exceeding,p_value\n";
  json results = json::array();
  Rng rng(o.seed);
  for (const auto& pair : pairs) {
    const auto colon = pair.find(':');
    if (colon == std::string::npos) throw UsageError("--pair expects TEETH:KNEE, got '" + pair + "'");
    const auto teeth = builtin_prior(pair.substr(0, colon));
    const auto knee = builtin_prior(pair.substr(colon + 1));
    const std::vector<IndicatorParams> maturity{teeth.center(), knee.center()};
    const auto fit = fit_missingness_mle(y, maturity, psi, grid);
    if (!fit.converged) throw ModelError("missingness fit did not converge for " + pair);
    const auto predicted = predicted_table(fit.theta, psi, grid, y.total());
    const auto boot = bootstrap_pvalue(y, predicted, o.replicates, rng, o.jobs);

    csv << teeth.label << ',' << knee.label;
    for (const auto& p : fit.theta)
      for (double v : p.to_array()) csv << ',' << format_double(v);
    csv << ',' << (fit.boundary ? 1 : 0) << ',' << format_double(boot.statistic) << ',' << boot.replicates << ','
        << boot.at_least_as_large << ',' << format_double(boot.p_value) << '\n';

    std::ostringstream table;
    write_predicted_table(table, predicted);
    if (!o.out.empty()) {
      write_text_file(fs::path(o.out) / ("predicted_" + teeth.label + "_" + knee.label + ".csv"), table.str());
    }
    out << teeth.label << "/" << knee.label << ": missingness teeth (" << std::setprecision(3)
        << fit.theta[0].missing_at_20 << ", " << fit.theta[0].missing_slope << ") knee ("
        << fit.theta[1].missing_at_20 << ", " << fit.theta[1].missing_slope << ")"
        << (fit.boundary ? " [boundary]" : "") << "\n  chi-square " << std::setprecision(6) << boot.statistic
        << ", p = " << boot.p_value << " (" << boot.at_least_as_large << " of " << boot.replicates
        << " replicates at least as large)\n";
    results.push_back({{"teeth_prior", to_json(teeth)},
                       {"knee_prior", to_json(knee)},
                       {"theta", {to_json(fit.theta[0]), to_json(fit.theta[1])}},
                       {"boundary", fit.boundary},
                       {"statistic", boot.statistic},
                       {"replicates", boot.replicates},
                       {"exceeding", boot.at_least_as_large},
                       {"p_value", boot.p_value}});
  }
  if (!o.out.empty()) {
    write_text_file(fs::path(o.out) / "check_fixed.csv", csv.str());
    json meta{{"command", command},
              {"subcommand", "check-fixed"},
              {"table", o.table},
              {"observed", to_json(y)},
              {"pairs", pairs},
              {"replicates", o.replicates},
              {"seed", o.seed},
              {"jobs", o.jobs},
              {"grid", o.grid.to_json()},
              {"profile", "uniform over grid (target distribution)"},
              {"statistic", "pearson chi-square"},
              {"results", results}};
    write_text_file(fs::path(o.out) / "metadata.json", meta.dump(2) + "\n");
  }
  return 0;
}

// ---------------------------------------------------------------- sample

struct SampleOptions {
  std::string table = default_table();
  PriorOptions priors;
  GridOptions grid;
  long cycles = 100000;
  long burn_in = 20000;
  long thinning = 100;
  std::uint64_t seed = 1;
  int chains = 1;
  int jobs = 1;
  bool no_adapt = false;
  double target_acceptance = 0.15;
  bool keep_tau = false;
  std::string out;
};

int cmd_sample(const SampleOptions& o, const std::string& command, std::ostream& out) {
  if (o.out.empty()) throw UsageError("sample needs --out");
  const ObservedTable y = parse_observed_table(o.table);
  ChainConfig config;
  config.cycles = o.cycles;
  config.burn_in = o.burn_in;
  config.thinning = o.thinning;
  config.seed = o.seed;
  config.adapt = !o.no_adapt;
  config.target_acceptance = o.target_acceptance;
  config.keep_tau = o.keep_tau;
  config.priors = o.priors.resolve("");
  config.profile_prior = {o.grid.alpha, o.grid.grid()};
  config.proposal_sds.assign(2, default_proposal_scale());
  config.validate(2);

  const auto outputs = run_chains(y, config, o.chains, o.jobs);
  const std::string label = o.priors.model_label().empty()
                                ? config.priors[0].label + "+" + config.priors[1].label
                                : o.priors.model_label();
  json run_meta{{"command", command},
                {"subcommand", "sample"},
                {"model", label},
                {"table", o.table},
                {"chains", o.chains},
                {"jobs", o.jobs},
                {"options",
                 {{"cycles", o.cycles},
                  {"burn_in", o.burn_in},
                  {"thinning", o.thinning},
                  {"seed", o.seed},
                  {"adapt", !o.no_adapt},
                  {"target_acceptance", o.target_acceptance},
                  {"keep_tau", o.keep_tau},
                  {"grid", o.grid.to_json()}}},
                {"config", to_json(config)},
                {"chain_seeds", json::array()}};
  for (std::size_t c = 0; c < outputs.size(); ++c) {
    run_meta["chain_seeds"].push_back(outputs[c].config.seed);
    write_chain(outputs[c], fs::path(o.out) / ("chain_" + std::to_string(c)),
                {{"model", label}, {"chain", c}});
    out << "chain " << c << ": " << outputs[c].samples.size() << " samples, acceptance teeth "
        << std::setprecision(3) << outputs[c].acceptance_rates[0] << " knee " << outputs[c].acceptance_rates[1]
        << '\n';
  }
  write_text_file(fs::path(o.out) / "metadata.json", run_meta.dump(2) + "\n");
  const auto diag = diagnostics(outputs);
  write_text_file(fs::path(o.out) / "diagnostics.json", to_json(diag).dump(2) + "\n");
  for (const auto& p : diag.parameters) {
    if (p.name.find("missing") != std::string::npos) continue;
    out << "  " << std::left << std::setw(16) << p.name << " mean " << std::setprecision(4) << p.chain_means[0];
    if (p.scale_reduction) out << "  ratio " << *p.scale_reduction;
    out << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- report

struct ReportOptions {
  std::vector<std::string> runs;
  std::vector<std::string> labels;
  double threshold = 18.0;
  std::string estimator = "rb";
  double level = 0.95;
  bool exclude_double_missing = false;
  std::vector<double> probs{0.025, 0.25, 0.75, 0.975};
  std::string out;
};

std::vector<ChainOutput> load_run(const fs::path& dir, std::string& label) {
  std::vector<fs::path> chain_dirs;
  if (fs::exists(dir / "samples.csv")) {
    chain_dirs.push_back(dir);
  } else if (fs::is_directory(dir)) {
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_directory() && e.path().filename().string().rfind("chain_", 0) == 0) chain_dirs.push_back(e.path());
    }
  }
  if (chain_dirs.empty()) throw DataError(dir.string() + ": no chain output found");
  std::sort(chain_dirs.begin(), chain_dirs.end());
  std::vector<ChainOutput> chains;
  for (const auto& d : chain_dirs) chains.push_back(read_chain(d));
  if (label.empty()) {
    std::ifstream in(chain_dirs.front() / "metadata.json");
    json meta;
    in >> meta;
    label = meta.value("model", dir.filename().string());
  }
  return chains;
}

int cmd_report(const ReportOptions& o, std::ostream& out) {
  if (o.runs.empty()) throw UsageError("report needs at least one --run directory");
  if (o.out.empty()) throw UsageError("report needs --out");
  if (!o.labels.empty() && o.labels.size() != o.runs.size()) throw UsageError("give one --label per --run");
  Estimator estimator;
  if (o.estimator == "rb") {
    estimator = Estimator::RaoBlackwell;
  } else if (o.estimator == "tau") {
    estimator = Estimator::LatentCounts;
  } else {
    throw UsageError("--estimator must be rb or tau");
  }
  const auto rule = ClassificationRule::rmv(o.exclude_double_missing);

  std::vector<std::pair<std::string, ErrorRateTable>> tables;
  std::ostringstream summary;
  summary << "model,parameter,mean,lower,upper\n";
  json runs = json::array();
  for (std::size_t r = 0; r < o.runs.size(); ++r) {
    std::string label = o.labels.empty() ? "" : o.labels[r];
    const auto chains = load_run(o.runs[r], label);
    tables.emplace_back(label, error_rate_table(chains, rule, o.threshold, estimator, o.level));

    const AgeGrid& grid = chains.front().config.profile_prior.grid;
    std::vector<PopulationProfile> profiles;
    const std::size_t K = chains.front().observed.indicators;
    std::vector<std::vector<double>> traces(K * IndicatorParams::kDim + 1);
    for (const auto& c : chains) {
      for (const auto& s : c.samples) {
        profiles.push_back(s.psi);
        for (std::size_t k = 0; k < K; ++k)
          for (std::size_t d = 0; d < IndicatorParams::kDim; ++d)
            traces[k * IndicatorParams::kDim + d].push_back(s.theta[k].to_array()[d]);
        if (K == 2) traces.back().push_back(s.theta[0].location - s.theta[1].location);
      }
    }
    if (profiles.empty()) throw DataError(o.runs[r] + ": no retained samples");
    for (std::size_t t = 0; t < traces.size(); ++t) {
      if (traces[t].empty()) continue;
      const std::string name = t + 1 == traces.size()
                                   ? "location_difference"
                                   : indicator_name(t / IndicatorParams::kDim, K) + "_" +
                                         coordinate_name(t % IndicatorParams::kDim);
      const auto [lo, hi] = credibility_interval(traces[t], o.level);
      double m = 0.0;
      for (double v : traces[t]) m += v;
      m /= static_cast<double>(traces[t].size());
      summary << label << ',' << name << ',' << format_double(m) << ',' << format_double(lo) << ','
              << format_double(hi) << '\n';
    }
    const auto bands = profile_quantile_bands(profiles, grid, o.probs);
    std::ostringstream band_csv;
    write_bands(band_csv, bands);
    write_text_file(fs::path(o.out) / ("population_bands_" + label + ".csv"), band_csv.str());
    runs.push_back({{"label", label}, {"directory", o.runs[r]}, {"chains", chains.size()}, {"samples", profiles.size()}});
  }

  std::ostringstream csv;
  write_error_rates_csv(csv, tables);
  write_text_file(fs::path(o.out) / "error_rates.csv", csv.str());
  write_text_file(fs::path(o.out) / "error_rates.json", error_rates_json(tables).dump(2) + "\n");
  write_text_file(fs::path(o.out) / "posterior_summary.csv", summary.str());
  json meta{{"subcommand", "report"},
            {"runs", runs},
            {"threshold", o.threshold},
            {"threshold_rule", "grid age >= threshold counts as at or over"},
            {"estimator", o.estimator == "rb" ? "rao-blackwell" : "latent-counts"},
            {"credibility_level", o.level},
            {"rule", rule.id},
            {"band_probabilities", o.probs},
            {"bands", "pointwise quantiles of the cumulative profile at each grid age"}};
  write_text_file(fs::path(o.out) / "metadata.json", meta.dump(2) + "\n");

  for (const auto& [label, table] : tables) {
    out << label << '\n';
    for (const auto& row : table.rows) {
      out << "  " << std::left << std::setw(7) << row.label << std::right << std::setw(6) << row.observed << "  "
          << std::setw(3) << row.mean_percent() << "%  [" << row.lower_percent() << ", " << row.upper_percent()
          << "]\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  PriorOptions priors;
  std::string teeth_theta;
  std::string knee_theta;
  GridOptions grid;
  std::string profile = "uniform";
  long total = 9280;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_simulate(const SimulateOptions& o, const std::string& command, std::ostream& out) {
  const AgeGrid grid = o.grid.grid();
  std::vector<IndicatorParams> theta(2);
  if (o.teeth_theta.empty() || o.knee_theta.empty()) {
    const auto priors = o.priors.resolve("model1");
    theta = {priors[0].center(), priors[1].center()};
  }
  if (!o.teeth_theta.empty()) theta[0] = parse_theta(o.teeth_theta, "--teeth-theta");
  if (!o.knee_theta.empty()) theta[1] = parse_theta(o.knee_theta, "--knee-theta");
  for (const auto& p : theta) require_valid(p, grid.range());
  if (o.total < 0) throw UsageError("--n must be nonnegative");

  Rng rng(o.seed);
  PopulationProfile psi;
  if (o.profile == "uniform") {
    psi = PopulationProfile::uniform(grid.size());
  } else if (o.profile == "prior") {
    psi = sample_prior_profile({o.grid.alpha, grid}, rng);
  } else {
    throw UsageError("--profile must be uniform or prior");
  }
  const auto r = cell_prob_table(theta, psi, grid);
  std::vector<std::int64_t> cells(r.size());
  multinomial(rng, o.total, r, cells);
  ObservedTable y = ObservedTable::zeros(2);
  const std::size_t T = grid.size();
  for (std::size_t i = 0; i < y.combinations(); ++i)
    for (std::size_t j = 0; j < T; ++j) y.counts[i] += cells[i * T + j];

  std::ostringstream table;
  write_observed_table(table, y);
  if (o.out.empty()) {
    out << table.str();
  } else {
    write_text_file(o.out, table.str());
    json meta{{"command", command},     {"subcommand", "simulate"},
              {"theta", {to_json(theta[0]), to_json(theta[1])}},
              {"profile", o.profile},   {"profile_weights", psi.weights},
              {"grid", o.grid.to_json()}, {"n", o.total},
              {"seed", o.seed},         {"observed", to_json(y)}};
    write_text_file(o.out + ".json", meta.dump(2) + "\n");
    out << "wrote " << o.out << " (N = " << y.total() << ")\n";
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian analysis of a two-indicator age assessment procedure"};
  app.set_config("--config", "", "Key-value configuration file (command-line flags override it)");
  app.require_subcommand(1);
  const std::string command = joined_command(argc, argv);

  FitStudiesOptions fit_opts;
  auto* fit_cmd = app.add_subcommand("fit-studies", "Fit probit maturity curves to the bundled study summaries");
  fit_cmd->add_option("--data-dir", fit_opts.data_dir, "Directory with the bundled data")->capture_default_str();
  fit_cmd->add_option("--out", fit_opts.out, "Write estimates as CSV to this file");

  CheckFixedOptions check_opts;
  auto* check_cmd = app.add_subcommand("check-fixed", "Goodness of fit of fixed-parameter models");
  check_cmd->add_option("--table", check_opts.table, "Observed 3x3 table")->capture_default_str();
  check_cmd->add_option("--pair", check_opts.pairs, "TEETH:KNEE prior labels (repeatable)");
  check_cmd->add_option("--replicates", check_opts.replicates, "Bootstrap replicates")->capture_default_str();
  check_cmd->add_option("--seed", check_opts.seed, "Random seed")->capture_default_str();
  check_cmd->add_option("--jobs", check_opts.jobs, "Worker threads")->capture_default_str();
  check_cmd->add_option("--out", check_opts.out, "Output directory");
  check_opts.grid.add(check_cmd);

  SampleOptions sample_opts;
  auto* sample_cmd = app.add_subcommand("sample", "Run MCMC chains for a model");
  sample_cmd->add_option("--table", sample_opts.table, "Observed 3x3 table")->capture_default_str();
  sample_opts.priors.add(sample_cmd, true);
  sample_opts.grid.add(sample_cmd);
  sample_cmd->add_option("--cycles", sample_opts.cycles, "Total MCMC cycles")->capture_default_str();
  sample_cmd->add_option("--burn-in", sample_opts.burn_in, "Burn-in cycles")->capture_default_str();
  sample_cmd->add_option("--thinning", sample_opts.thinning, "Keep every n-th cycle after burn-in")->capture_default_str();
  sample_cmd->add_option("--seed", sample_opts.seed, "Master random seed")->capture_default_str();
  sample_cmd->add_option("--chains", sample_opts.chains, "Number of chains")->capture_default_str();
  sample_cmd->add_option("--jobs", sample_opts.jobs, "Chains run concurrently")->capture_default_str();
  sample_cmd->add_flag("--no-adapt", sample_opts.no_adapt, "Keep proposal step sizes fixed");
  sample_cmd->add_option("--target-acceptance", sample_opts.target_acceptance, "Burn-in adaptation target")
      ->capture_default_str();
  sample_cmd->add_flag("--keep-tau", sample_opts.keep_tau, "Also save latent counts (needed for --estimator tau)");
  sample_cmd->add_option("--out", sample_opts.out, "Output directory")->required();

  ReportOptions report_opts;
  auto* report_cmd = app.add_subcommand("report", "Error rates, posterior summaries and population bands");
  report_cmd->add_option("--run", report_opts.runs, "Directory written by sample (repeatable)")->required();
  report_cmd->add_option("--label", report_opts.labels, "Label per run (default: model name)");
  report_cmd->add_option("--threshold", report_opts.threshold, "Age threshold")->capture_default_str();
  report_cmd->add_option("--estimator", report_opts.estimator, "rb (Rao-Blackwellized) or tau (latent counts)")
      ->capture_default_str();
  report_cmd->add_option("--level", report_opts.level, "Credibility level")->capture_default_str();
  report_cmd->add_flag("--exclude-double-missing", report_opts.exclude_double_missing,
                       "Leave the all-missing cell unclassified");
  report_cmd->add_option("--probs", report_opts.probs, "Band probabilities")->capture_default_str();
  report_cmd->add_option("--out", report_opts.out, "Output directory")->required();

  SimulateOptions sim_opts;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate an observed table from fixed parameters");
  sim_opts.priors.add(sim_cmd, false);
  sim_cmd->add_option("--teeth-theta", sim_opts.teeth_theta, "location,scale,missing_at_20,missing_slope");
  sim_cmd->add_option("--knee-theta", sim_opts.knee_theta, "location,scale,missing_at_20,missing_slope");
  sim_opts.grid.add(sim_cmd);
  sim_cmd->add_option("--profile", sim_opts.profile, "uniform or prior (one Dirichlet draw)")->capture_default_str();
  sim_cmd->add_option("--n", sim_opts.total, "Number of persons")->capture_default_str();
  sim_cmd->add_option("--seed", sim_opts.seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--out", sim_opts.out, "Output table (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*fit_cmd) return cmd_fit_studies(fit_opts, out);
    if (*check_cmd) return cmd_check_fixed(check_opts, command, out);
    if (*sample_cmd) return cmd_sample(sample_opts, command, out);
    if (*report_cmd) return cmd_report(report_opts, out);
    if (*sim_cmd) return cmd_simulate(sim_opts, command, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << '\n';
    return 3;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "model error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}

}  // namespace agebayes
