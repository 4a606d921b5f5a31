#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "agebayes/cli.hpp"
#include "agebayes/error.hpp"
#include "agebayes/io.hpp"

using namespace agebayes;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "agebayes");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("agebayes_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return files;
}

}  // namespace

TEST_CASE("presets") {
  CHECK(model_presets().size() == 5);
  CHECK(model_preset("model1").teeth_prior == "Lucas");
  CHECK(model_preset("model1").knee_prior == "Ottow");
  CHECK(model_preset("model2").teeth_prior == "Mincer");
  CHECK(model_preset("model3").teeth_prior == "WideTeeth");
  CHECK(model_preset("model3").knee_prior == "WideKnees");
  CHECK(model_preset("model4").knee_prior == "OttowIIIc");
  CHECK(model_preset("model5").teeth_prior == "Mincer");
  CHECK(model_preset("model5").knee_prior == "OttowIIIc");
  CHECK_THROWS_AS(model_preset("model6"), UsageError);

  // The bundled preset file agrees with the built-in table.
  const auto doc = read_csv(fs::path(default_data_dir()) / "presets.csv");
  REQUIRE(doc.rows.size() == 5);
  for (const auto& row : doc.rows) {
    CHECK(model_preset(row[0]).teeth_prior == row[1]);
    CHECK(model_preset(row[0]).knee_prior == row[2]);
  }
  const auto priors = read_csv(fs::path(default_data_dir()) / "priors.csv");
  REQUIRE(priors.rows.size() == 6);
  for (const auto& row : priors.rows) {
    const auto p = builtin_prior(row[0]);
    CHECK(p.location_mean == parse_double(row[2], "x"));
    CHECK(p.location_sd == parse_double(row[3], "x"));
    CHECK(p.scale_mean == parse_double(row[4], "x"));
    CHECK(p.scale_sd == parse_double(row[5], "x"));
  }
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 1);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"sample", "--preset", "model9", "--out", scratch("x").string()}).code == 1);
  CHECK(run({"sample", "--preset", "model1", "--cycles", "10", "--burn-in", "20", "--out", scratch("x").string()}).code == 1);

  const auto bad = scratch("bad.csv");
  {
    std::ofstream f(bad);
    f << "teeth,knee_mature,knee_immature,knee_missing,sum\nmature,1,1,1,4\nimmature,0,0,0,0\nmissing,0,0,0,0\n";
  }
  const auto r = run({"check-fixed", "--table", bad.string(), "--replicates", "10"});
  CHECK(r.code == 2);
  CHECK(r.err.find("bad.csv:2") != std::string::npos);
  CHECK(run({"report", "--run", scratch("nothing").string(), "--out", scratch("o").string()}).code == 2);
  fs::remove(bad);
}

TEST_CASE("fit-studies prints the four estimates") {
  const auto out = scratch("fit.csv");
  const auto r = run({"fit-studies", "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("Lucas") != std::string::npos);
  CHECK(r.out.find("OttowIIIc") != std::string::npos);
  const auto doc = read_csv(out);
  REQUIRE(doc.rows.size() == 4);
  const double expect[4][2] = {{18.6, 0.7}, {20.0, 3.2}, {18.5, 1.5}, {17.8, 1.7}};
  const double tol[4] = {0.1, 0.2, 0.2, 0.2};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(parse_double(doc.rows[i][3], "loc") - expect[i][0]) <= tol[i]);
    CHECK(std::abs(parse_double(doc.rows[i][4], "scale") - expect[i][1]) <= tol[i]);
  }
  fs::remove(out);
}

TEST_CASE("check-fixed writes predicted tables and metadata") {
  const auto dir = scratch("check");
  const auto r = run({"check-fixed", "--replicates", "500", "--seed", "4", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "check_fixed.csv"));
  CHECK(fs::exists(dir / "predicted_Lucas_Ottow.csv"));
  CHECK(fs::exists(dir / "predicted_Mincer_Ottow.csv"));
  const auto meta = nlohmann::json::parse(slurp(dir / "metadata.json"));
  CHECK(meta["replicates"] == 500);
  CHECK(meta["results"].size() == 2);
  // Predicted tables use the observed-table layout.
  const auto pred = read_csv(dir / "predicted_Lucas_Ottow.csv");
  CHECK(pred.header[1] == "knee_mature");
  fs::remove_all(dir);
}

TEST_CASE("sample is deterministic and report is byte-identical") {
  const auto dir = scratch("sample");
  const std::vector<std::string> args{"sample", "--preset", "model1", "--cycles", "1000", "--burn-in", "200",
                                      "--thinning", "10", "--seed", "7", "--chains", "2", "--out", dir.string()};
  REQUIRE(run(args).code == 0);
  auto first = snapshot(dir);
  REQUIRE(run(args).code == 0);
  auto second = snapshot(dir);
  REQUIRE(first.size() == second.size());
  CHECK(first.count("chain_0/samples.csv"));
  CHECK(first.count("chain_1/psi.csv"));
  CHECK(first.count("diagnostics.json"));
  for (auto& [name, text] : first) {
    if (name.find("metadata.json") != std::string::npos) {
      // Wall time is the only field allowed to differ.
      auto a = nlohmann::json::parse(text), b = nlohmann::json::parse(second[name]);
      a.erase("wall_time_seconds");
      b.erase("wall_time_seconds");
      CHECK_MESSAGE(a == b, name);
    } else {
      CHECK_MESSAGE(text == second[name], name);
    }
  }
  const auto meta = nlohmann::json::parse(first["metadata.json"]);
  CHECK(meta["config"]["seed"] == 7);
  CHECK(meta["model"] == "model1");

  const auto rep = scratch("report");
  const std::vector<std::string> rargs{"report", "--run", dir.string(), "--out", rep.string()};
  REQUIRE(run(rargs).code == 0);
  const auto r1 = snapshot(rep);
  REQUIRE(run(rargs).code == 0);
  CHECK(r1 == snapshot(rep));
  CHECK(r1.count("error_rates.csv"));
  CHECK(r1.count("error_rates.json"));
  CHECK(r1.count("posterior_summary.csv"));
  CHECK(r1.count("population_bands_model1.csv"));
  CHECK(r1.at("posterior_summary.csv").find("location_difference") != std::string::npos);
  const auto rmeta = nlohmann::json::parse(r1.at("metadata.json"));
  CHECK(rmeta["bands"].get<std::string>().find("pointwise") != std::string::npos);

  // The latent-count estimator needs saved counts.
  CHECK(run({"report", "--run", dir.string(), "--estimator", "tau", "--out", rep.string()}).code == 2);
  fs::remove_all(dir);
  fs::remove_all(rep);
}

TEST_CASE("config file with command-line overrides") {
  const auto dir = scratch("cfg");
  fs::create_directories(dir);
  const auto cfg = dir / "run.ini";
  {
    std::ofstream f(cfg);
    f << "[sample]\npreset=model2\ncycles=600\nburn-in=100\nthinning=50\nseed=11\n";
  }
  REQUIRE(run({"--config", cfg.string(), "sample", "--seed", "12", "--out", (dir / "out").string()}).code == 0);
  const auto meta = nlohmann::json::parse(slurp(dir / "out" / "metadata.json"));
  CHECK(meta["model"] == "model2");
  CHECK(meta["options"]["cycles"] == 600);
  CHECK(meta["options"]["seed"] == 12);
  CHECK(meta["config"]["priors"][0]["label"] == "Mincer");
  fs::remove_all(dir);
}

TEST_CASE("custom priors override preset fields") {
  const auto dir = scratch("custom");
  REQUIRE(run({"sample", "--preset", "model1", "--teeth-scale-mean", "0.9", "--cycles", "300", "--burn-in", "100",
               "--out", dir.string()}).code == 0);
  const auto meta = nlohmann::json::parse(slurp(dir / "metadata.json"));
  CHECK(meta["config"]["priors"][0]["scale_mean"] == 0.9);
  CHECK(meta["config"]["priors"][0]["location_mean"] == 18.6);
  CHECK(run({"sample", "--preset", "model1", "--knee-scale-sd", "0", "--out", dir.string()}).code == 1);
  fs::remove_all(dir);
}

TEST_CASE("simulate") {
  const auto file = scratch("sim.csv");
  REQUIRE(run({"simulate", "--n", "1000", "--seed", "3", "--out", file.string()}).code == 0);
  const auto y = parse_observed_table(file);
  CHECK(y.total() == 1000);
  CHECK(fs::exists(file.string() + ".json"));
  const auto r = run({"simulate", "--teeth-theta", "18,1,0,0", "--knee-theta", "18,1,0,0", "--n", "50"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  const auto z = parse_observed_table(in, "stdout");
  CHECK(z.total() == 50);
  CHECK(z.at(IndicatorState::Missing, IndicatorState::Missing) == 0);
  CHECK(run({"simulate", "--teeth-theta", "18,1,0.9,0.1"}).code == 3);
  CHECK(run({"simulate", "--teeth-theta", "18,1"}).code == 1);
  fs::remove(file);
  fs::remove(file.string() + ".json");
}
