#include "agebayes/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <fstream>
#include <sstream>

#include "agebayes/error.hpp"

namespace agebayes {

using nlohmann::json;

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::size_t column(const CsvDocument& doc, const std::string& name) {
  auto it = std::find(doc.header.begin(), doc.header.end(), name);
  if (it == doc.header.end()) throw DataError(doc.source + ": missing column '" + name + "'");
  return static_cast<std::size_t>(it - doc.header.begin());
}

}  // namespace

std::string CsvDocument::where(std::size_t row) const {
  return source + ":" + std::to_string(line_numbers.at(row));
}

CsvDocument parse_csv(std::istream& in, std::string source) {
  CsvDocument doc;
  doc.source = std::move(source);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t[0] == '@') {
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw DataError(doc.source + ":" + std::to_string(number) + ": bad directive");
      doc.directives[trim(t.substr(1, eq - 1))] = trim(t.substr(eq + 1));
      continue;
    }
    auto cells = split(t);
    if (doc.header.empty()) {
      doc.header = std::move(cells);
      continue;
    }
    if (cells.size() != doc.header.size()) {
      throw DataError(doc.source + ":" + std::to_string(number) + ": expected " +
                      std::to_string(doc.header.size()) + " fields, found " + std::to_string(cells.size()));
    }
    doc.rows.push_back(std::move(cells));
    doc.line_numbers.push_back(number);
  }
  if (doc.header.empty()) throw DataError(doc.source + ": no header row");
  return doc;
}

CsvDocument read_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_csv(in, path.string());
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
  if (text == "nan") return NAN;
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw DataError(context + ": not a number: '" + text + "'");
  return v;
}

long parse_long(const std::string& text, const std::string& context) {
  long v = 0;
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw DataError(context + ": not an integer: '" + text + "'");
  return v;
}

ObservedTable parse_observed_table(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_observed_table(in, path.string());
}

ObservedTable parse_observed_table(std::istream& in, const std::string& source) {
  const CsvDocument doc = parse_csv(in, source);
  static const std::map<std::string, IndicatorState> states{
      {"mature", IndicatorState::Mature}, {"immature", IndicatorState::Immature}, {"missing", IndicatorState::Missing}};
  // Columns: label, knee_mature, knee_immature, knee_missing [, sum]
  std::map<IndicatorState, std::size_t> cols;
  std::optional<std::size_t> sum_col;
  for (std::size_t c = 1; c < doc.header.size(); ++c) {
    const std::string h = lower(doc.header[c]);
    if (h == "sum") {
      sum_col = c;
    } else if (h.rfind("knee_", 0) == 0 && states.count(h.substr(5))) {
      cols[states.at(h.substr(5))] = c;
    } else {
      throw DataError(source + ": unexpected column '" + doc.header[c] + "'");
    }
  }
  if (cols.size() != 3) throw DataError(source + ": need knee_mature, knee_immature and knee_missing columns");

  ObservedTable table = ObservedTable::zeros(2);
  std::map<IndicatorState, bool> seen;
  std::optional<std::size_t> sum_row;
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const std::string label = lower(doc.rows[r][0]);
    if (label == "sum") {
      sum_row = r;
      continue;
    }
    if (!states.count(label)) throw DataError(doc.where(r) + ": unknown teeth state '" + doc.rows[r][0] + "'");
    const IndicatorState teeth = states.at(label);
    if (seen[teeth]) throw DataError(doc.where(r) + ": duplicate row '" + label + "'");
    seen[teeth] = true;
    std::int64_t row_total = 0;
    for (const auto& [knee, c] : cols) {
      const long v = parse_long(doc.rows[r][c], doc.where(r));
      if (v < 0) throw DataError(doc.where(r) + ": negative count");
      table.at(teeth, knee) = v;
      row_total += v;
    }
    if (sum_col && parse_long(doc.rows[r][*sum_col], doc.where(r)) != row_total) {
      throw DataError(doc.where(r) + ": row sum does not match cells");
    }
  }
  if (seen.size() != 3) throw DataError(source + ": need mature, immature and missing teeth rows");
  if (sum_row) {
    const std::size_t r = *sum_row;
    for (const auto& [knee, c] : cols) {
      std::int64_t col_total = 0;
      for (IndicatorState teeth : kAllStates) col_total += table.at(teeth, knee);
      if (parse_long(doc.rows[r][c], doc.where(r)) != col_total) {
        throw DataError(doc.where(r) + ": column sum does not match cells");
      }
    }
    if (sum_col && parse_long(doc.rows[r][*sum_col], doc.where(r)) != table.total()) {
      throw DataError(doc.where(r) + ": grand total does not match cells");
    }
  }
  return table;
}

namespace {
constexpr std::array<IndicatorState, 3> kTableOrder{IndicatorState::Mature, IndicatorState::Immature,
                                                    IndicatorState::Missing};
}

void write_observed_table(std::ostream& out, const ObservedTable& t) {
  out << "teeth,knee_mature,knee_immature,knee_missing,sum\n";
  for (IndicatorState teeth : kTableOrder) {
    out << to_string(teeth);
    std::int64_t s = 0;
    for (IndicatorState knee : kTableOrder) {
      out << ',' << t.at(teeth, knee);
      s += t.at(teeth, knee);
    }
    out << ',' << s << '\n';
  }
  out << "sum";
  for (IndicatorState knee : kTableOrder) {
    std::int64_t s = 0;
    for (IndicatorState teeth : kTableOrder) s += t.at(teeth, knee);
    out << ',' << s;
  }
  out << ',' << t.total() << '\n';
}

void write_predicted_table(std::ostream& out, const PredictedTable& t) {
  auto cell = [&](IndicatorState teeth, IndicatorState knee) {
    const std::array<IndicatorState, 2> s{teeth, knee};
    return t.expected.at(encode_combination(s));
  };
  out << "teeth,knee_mature,knee_immature,knee_missing,sum\n";
  for (IndicatorState teeth : kTableOrder) {
    out << to_string(teeth);
    double s = 0.0;
    for (IndicatorState knee : kTableOrder) {
      out << ',' << format_double(cell(teeth, knee));
      s += cell(teeth, knee);
    }
    out << ',' << format_double(s) << '\n';
  }
  out << "sum";
  for (IndicatorState knee : kTableOrder) {
    double s = 0.0;
    for (IndicatorState teeth : kTableOrder) s += cell(teeth, knee);
    out << ',' << format_double(s);
  }
  out << ',' << format_double(t.total()) << '\n';
}

BinnedStudy load_binned_study(const std::filesystem::path& path) {
  const CsvDocument doc = read_csv(path);
  BinnedStudy study;
  study.name = doc.directives.count("name") ? doc.directives.at("name") : path.stem().string();
  const auto c_lo = column(doc, "age_lo");
  const auto c_hi = column(doc, "age_hi");
  const auto c_n = column(doc, "n_total");
  const auto c_m = column(doc, "n_mature");
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    AgeBin bin;
    bin.lo = parse_double(doc.rows[r][c_lo], doc.where(r));
    bin.hi = parse_double(doc.rows[r][c_hi], doc.where(r));
    bin.n_total = static_cast<int>(parse_long(doc.rows[r][c_n], doc.where(r)));
    bin.n_mature = static_cast<int>(parse_long(doc.rows[r][c_m], doc.where(r)));
    if (!(bin.hi > bin.lo)) throw DataError(doc.where(r) + ": empty age interval");
    if (bin.n_mature < 0 || bin.n_mature > bin.n_total) throw DataError(doc.where(r) + ": n_mature out of range");
    if (!study.bins.empty() && bin.lo < study.bins.back().hi) {
      throw DataError(doc.where(r) + ": bins overlap or are out of order");
    }
    study.bins.push_back(bin);
  }
  if (study.bins.empty()) throw DataError(path.string() + ": no bins");
  return study;
}

QuantileStudy load_quantile_study(const std::filesystem::path& path) {
  const CsvDocument doc = read_csv(path);
  QuantileStudy study;
  study.name = doc.directives.count("name") ? doc.directives.at("name") : path.stem().string();
  if (!doc.directives.count("age_floor") || !doc.directives.count("age_ceiling")) {
    throw DataError(path.string() + ": @age_floor and @age_ceiling directives required");
  }
  study.age_floor = parse_double(doc.directives.at("age_floor"), path.string());
  study.age_ceiling = parse_double(doc.directives.at("age_ceiling"), path.string());
  const std::array<std::size_t, 5> qc{column(doc, "min"), column(doc, "q25"), column(doc, "median"),
                                      column(doc, "q75"), column(doc, "max")};
  const auto c_stage = column(doc, "stage");
  const auto c_n = column(doc, "n");
  const auto c_mature = column(doc, "mature");
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    StageGroup g;
    g.stage = doc.rows[r][c_stage];
    g.n = static_cast<int>(parse_long(doc.rows[r][c_n], doc.where(r)));
    std::array<double, 5> q{};
    for (std::size_t i = 0; i < 5; ++i) q[i] = parse_double(doc.rows[r][qc[i]], doc.where(r));
    if (!std::is_sorted(q.begin(), q.end())) throw DataError(doc.where(r) + ": quantiles must be nondecreasing");
    if (g.n <= 0) throw DataError(doc.where(r) + ": group size must be positive");
    g.quantiles = {q[0], q[1], q[2], q[3], q[4]};
    const long m = parse_long(doc.rows[r][c_mature], doc.where(r));
    if (m != 0 && m != 1) throw DataError(doc.where(r) + ": mature must be 0 or 1");
    g.mature = m == 1;
    study.groups.push_back(g);
  }
  if (study.groups.empty()) throw DataError(path.string() + ": no groups");
  return study;
}

json to_json(const IndicatorParams& p) {
  return {{"location", p.location}, {"scale", p.scale}, {"missing_at_20", p.missing_at_20},
          {"missing_slope", p.missing_slope}};
}

json to_json(const IndicatorPrior& p) {
  return {{"label", p.label},       {"location_mean", p.location_mean}, {"location_sd", p.location_sd},
          {"scale_mean", p.scale_mean}, {"scale_sd", p.scale_sd}};
}

IndicatorParams indicator_params_from_json(const json& j) {
  return {j.at("location").get<double>(), j.at("scale").get<double>(), j.at("missing_at_20").get<double>(),
          j.at("missing_slope").get<double>()};
}

IndicatorPrior indicator_prior_from_json(const json& j) {
  return {j.at("location_mean").get<double>(), j.at("location_sd").get<double>(),
          j.at("scale_mean").get<double>(), j.at("scale_sd").get<double>(), j.at("label").get<std::string>()};
}

json to_json(const ObservedTable& t) {
  return {{"indicators", t.indicators}, {"counts", t.counts}, {"total", t.total()}};
}

ObservedTable observed_table_from_json(const json& j) {
  ObservedTable t;
  t.indicators = j.at("indicators").get<std::size_t>();
  t.counts = j.at("counts").get<std::vector<std::int64_t>>();
  if (t.counts.size() != combination_count(t.indicators)) throw DataError("observed table in metadata has wrong size");
  return t;
}

json to_json(const ChainConfig& c) {
  json priors = json::array();
  for (const auto& p : c.priors) priors.push_back(to_json(p));
  json grid{{"description", c.profile_prior.grid.description()},
            {"points", c.profile_prior.grid.size()},
            {"ages", std::vector<double>(c.profile_prior.grid.ages().begin(), c.profile_prior.grid.ages().end())}};
  if (c.profile_prior.grid.has_target()) {
    const auto& t = c.profile_prior.grid.target();
    grid["target"] = {{"family", "shifted_truncated_gamma"}, {"shape", t.shape}, {"rate", t.rate},
                      {"shift", t.shift}, {"lower", t.lower}, {"upper", t.upper}};
  }
  json out{{"cycles", c.cycles},
           {"burn_in", c.burn_in},
           {"thinning", c.thinning},
           {"seed", c.seed},
           {"adapt", c.adapt},
           {"target_acceptance", c.target_acceptance},
           {"adapt_window", c.adapt_window},
           {"keep_tau", c.keep_tau},
           {"priors", priors},
           {"alpha", c.profile_prior.alpha},
           {"grid", grid}};
  json sds = json::array();
  for (const auto& s : c.proposal_sds) sds.push_back(s);
  out["proposal_sds"] = sds;
  if (c.initial_theta) {
    json th = json::array();
    for (const auto& p : *c.initial_theta) th.push_back(to_json(p));
    out["initial_theta"] = th;
  }
  if (c.initial_psi) out["initial_psi"] = c.initial_psi->weights;
  return out;
}

namespace {

ChainConfig chain_config_from_json(const json& j) {
  ChainConfig c;
  c.cycles = j.at("cycles").get<long>();
  c.burn_in = j.at("burn_in").get<long>();
  c.thinning = j.at("thinning").get<long>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.adapt = j.at("adapt").get<bool>();
  c.target_acceptance = j.at("target_acceptance").get<double>();
  c.adapt_window = j.at("adapt_window").get<long>();
  c.keep_tau = j.at("keep_tau").get<bool>();
  for (const auto& p : j.at("priors")) c.priors.push_back(indicator_prior_from_json(p));
  c.profile_prior.alpha = j.at("alpha").get<double>();
  c.profile_prior.grid = AgeGrid::from_ages(j.at("grid").at("ages").get<std::vector<double>>());
  for (const auto& s : j.at("proposal_sds")) c.proposal_sds.push_back(s.get<ProposalScale>());
  if (j.contains("initial_theta")) {
    std::vector<IndicatorParams> th;
    for (const auto& p : j.at("initial_theta")) th.push_back(indicator_params_from_json(p));
    c.initial_theta = th;
  }
  if (j.contains("initial_psi")) c.initial_psi = PopulationProfile{j.at("initial_psi").get<std::vector<double>>()};
  return c;
}

constexpr int kFirstCumulativeAge = 16;
constexpr int kLastCumulativeAge = 29;

}  // namespace

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

void write_chain(const ChainOutput& chain, const std::filesystem::path& dir, const json& extra_metadata) {
  std::filesystem::create_directories(dir);
  const std::size_t K = chain.observed.indicators;
  const AgeGrid& grid = chain.config.profile_prior.grid;

  std::ostringstream samples;
  samples << "cycle";
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t c = 0; c < IndicatorParams::kDim; ++c)
      samples << ',' << indicator_name(k, K) << '_' << coordinate_name(c);
  for (int a = kFirstCumulativeAge; a <= kLastCumulativeAge; ++a) samples << ",cum_psi_" << a;
  samples << '\n';
  std::ostringstream psi;
  psi << "cycle";
  for (std::size_t j = 0; j < grid.size(); ++j) psi << ",psi_" << (j + 1);
  psi << '\n';
  std::ostringstream tau;
  const bool with_tau = chain.config.keep_tau;
  if (with_tau) {
    tau << "cycle";
    for (std::size_t i = 0; i < chain.observed.combinations(); ++i)
      for (std::size_t j = 0; j < grid.size(); ++j) tau << ",tau_" << i << '_' << (j + 1);
    tau << '\n';
  }

  for (const auto& s : chain.samples) {
    samples << s.cycle;
    for (const auto& p : s.theta)
      for (double v : p.to_array()) samples << ',' << format_double(v);
    for (int a = kFirstCumulativeAge; a <= kLastCumulativeAge; ++a) {
      samples << ',' << format_double(s.psi.cumulative_at(grid, a));
    }
    samples << '\n';
    psi << s.cycle;
    for (double w : s.psi.weights) psi << ',' << format_double(w);
    psi << '\n';
    if (with_tau) {
      tau << s.cycle;
      for (auto c : s.tau) tau << ',' << c;
      tau << '\n';
    }
  }
  write_text_file(dir / "samples.csv", samples.str());
  write_text_file(dir / "psi.csv", psi.str());
  if (with_tau) write_text_file(dir / "tau.csv", tau.str());

  json meta = extra_metadata;
  meta["config"] = to_json(chain.config);
  meta["observed"] = to_json(chain.observed);
  meta["acceptance_rates"] = chain.acceptance_rates;
  json sds = json::array();
  for (const auto& s : chain.final_proposal_sds) sds.push_back(s);
  meta["final_proposal_sds"] = sds;
  meta["retained_samples"] = chain.samples.size();
  meta["wall_time_seconds"] = chain.wall_seconds;
  write_text_file(dir / "metadata.json", meta.dump(2) + "\n");
}

ChainOutput read_chain(const std::filesystem::path& dir) {
  ChainOutput chain;
  json meta;
  {
    auto in = open_input(dir / "metadata.json");
    try {
      in >> meta;
    } catch (const json::exception& e) {
      throw DataError((dir / "metadata.json").string() + ": " + e.what());
    }
  }
  try {
    chain.config = chain_config_from_json(meta.at("config"));
    chain.observed = observed_table_from_json(meta.at("observed"));
    chain.acceptance_rates = meta.at("acceptance_rates").get<std::vector<double>>();
    for (const auto& s : meta.at("final_proposal_sds")) chain.final_proposal_sds.push_back(s.get<ProposalScale>());
    chain.wall_seconds = meta.value("wall_time_seconds", 0.0);
  } catch (const json::exception& e) {
    throw DataError((dir / "metadata.json").string() + ": " + e.what());
  }
  const std::size_t K = chain.observed.indicators;
  const std::size_t T = chain.config.profile_prior.grid.size();

  const CsvDocument samples = read_csv(dir / "samples.csv");
  const CsvDocument psi = read_csv(dir / "psi.csv");
  if (samples.rows.size() != psi.rows.size()) throw DataError(dir.string() + ": samples.csv and psi.csv differ in length");
  if (psi.header.size() != T + 1) throw DataError(psi.source + ": profile length does not match grid");
  std::optional<CsvDocument> tau;
  if (chain.config.keep_tau) {
    tau = read_csv(dir / "tau.csv");
    if (tau->rows.size() != samples.rows.size()) throw DataError(tau->source + ": wrong number of rows");
  }
  for (std::size_t r = 0; r < samples.rows.size(); ++r) {
    ChainSample s;
    s.cycle = parse_long(samples.rows[r][0], samples.where(r));
    for (std::size_t k = 0; k < K; ++k) {
      std::array<double, IndicatorParams::kDim> a{};
      for (std::size_t c = 0; c < a.size(); ++c) {
        a[c] = parse_double(samples.rows[r][1 + k * IndicatorParams::kDim + c], samples.where(r));
      }
      s.theta.push_back(IndicatorParams::from_array(a));
    }
    if (parse_long(psi.rows[r][0], psi.where(r)) != s.cycle) throw DataError(psi.where(r) + ": cycle mismatch");
    for (std::size_t j = 0; j < T; ++j) s.psi.weights.push_back(parse_double(psi.rows[r][1 + j], psi.where(r)));
    if (tau) {
      for (std::size_t c = 1; c < tau->rows[r].size(); ++c) s.tau.push_back(parse_long(tau->rows[r][c], tau->where(r)));
    }
    chain.samples.push_back(std::move(s));
  }
  return chain;
}

void write_bands(std::ostream& out, const ProfileBands& bands) {
  out << "age";
  for (double p : bands.probs) out << ",q" << format_double(p);
  out << ",median\n";
  for (std::size_t j = 0; j < bands.ages.size(); ++j) {
    out << format_double(bands.ages[j]);
    for (double v : bands.bands[j]) out << ',' << format_double(v);
    out << ',' << format_double(bands.median[j]) << '\n';
  }
}

void write_error_rates_csv(std::ostream& out,
                           const std::vector<std::pair<std::string, ErrorRateTable>>& tables) {
  out << "model,cell,classification,n,samples,mean,lower,upper,mean_pct,lower_pct,upper_pct\n";
  for (const auto& [model, table] : tables) {
    for (const auto& row : table.rows) {
      std::string cell = row.label;
      std::erase(cell, ' ');
      std::erase(cell, ',');
      out << model << ',' << cell << ',' << to_string(row.verdict) << ',' << row.observed << ','
          << row.samples_used << ',' << format_double(row.mean) << ',' << format_double(row.lower) << ','
          << format_double(row.upper) << ',' << row.mean_percent() << ',' << row.lower_percent() << ','
          << row.upper_percent() << '\n';
    }
  }
}

json error_rates_json(const std::vector<std::pair<std::string, ErrorRateTable>>& tables) {
  json doc;
  json models = json::array();
  for (const auto& [model, table] : tables) models.push_back(model);
  doc["models"] = models;
  if (tables.empty()) return doc;
  const auto& first = tables.front().second;
  doc["threshold"] = first.threshold;
  doc["credibility_level"] = first.level;
  doc["interval"] = "equal-tailed, type-7 empirical quantiles";
  doc["estimator"] = first.estimator == Estimator::RaoBlackwell ? "rao-blackwell" : "latent-counts";
  for (Verdict group : {Verdict::Over18, Verdict::Under18}) {
    json rows = json::array();
    for (const auto& row : first.rows) {
      if (row.verdict != group) continue;
      json r{{"cell", row.label}, {"n", row.observed}};
      json per_model = json::object();
      for (const auto& [model, table] : tables) {
        auto it = std::find_if(table.rows.begin(), table.rows.end(),
                               [&](const ErrorRateRow& x) { return x.combination == row.combination; });
        if (it == table.rows.end()) continue;
        per_model[model] = {{"rate_pct", it->mean_percent()},
                            {"interval_pct", {it->lower_percent(), it->upper_percent()}},
                            {"rate", it->mean},
                            {"interval", {it->lower, it->upper}}};
      }
      r["models"] = per_model;
      rows.push_back(r);
    }
    doc[group == Verdict::Over18 ? "classified_over_18" : "classified_under_18"] = rows;
  }
  return doc;
}

json to_json(const DiagnosticsReport& report) {
  json params = json::array();
  for (const auto& p : report.parameters) {
    json j{{"name", p.name}, {"chain_means", p.chain_means}, {"chain_lower", p.chain_lower},
           {"chain_upper", p.chain_upper}};
    j["scale_reduction"] = p.scale_reduction ? json(*p.scale_reduction) : json(nullptr);
    params.push_back(j);
  }
  return {{"chains", report.chains}, {"parameters", params}, {"acceptance_rates", report.acceptance_rates}};
}

}  // namespace agebayes
