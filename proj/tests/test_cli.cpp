#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

// stderr is dropped so byte comparisons see only the report stream.
CliResult run_cli(const std::string& args) {
  CliResult r;
  std::string cmd = std::string(FATOU_CLI_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, got);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string write_temp_scenario(const std::string& stem, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / (stem + ".scn");
  std::ofstream out(path);
  out << text;
  out.close();
  return path.string();
}

// Checks the subset of json-schema the published schema uses: $ref into
// definitions, type, enum, required, properties, items, anyOf.
void schema_check(const json& root, const json& schema, const json& value,
                  const std::string& where, std::vector<std::string>& errors) {
  if (schema.contains("$ref")) {
    std::string ref = schema["$ref"].get<std::string>();
    REQUIRE(ref.rfind("#/definitions/", 0) == 0);
    const json& target = root.at("definitions").at(ref.substr(14));
    schema_check(root, target, value, where, errors);
    return;
  }
  if (schema.contains("anyOf")) {
    for (const auto& alt : schema["anyOf"]) {
      std::vector<std::string> sub;
      schema_check(root, alt, value, where, sub);
      if (sub.empty()) return;
    }
    errors.push_back(where + ": no anyOf branch matched");
    return;
  }
  if (schema.contains("type")) {
    auto matches = [&](const std::string& t) {
      if (t == "object") return value.is_object();
      if (t == "array") return value.is_array();
      if (t == "string") return value.is_string();
      if (t == "number") return value.is_number();
      if (t == "integer") return value.is_number_integer();
      if (t == "boolean") return value.is_boolean();
      if (t == "null") return value.is_null();
      return false;
    };
    bool ok = false;
    if (schema["type"].is_string()) {
      ok = matches(schema["type"].get<std::string>());
    } else {
      for (const auto& t : schema["type"]) ok = ok || matches(t.get<std::string>());
    }
    if (!ok) {
      errors.push_back(where + ": type mismatch, got " + value.dump());
      return;
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& allowed : schema["enum"]) ok = ok || allowed == value;
    if (!ok) errors.push_back(where + ": value " + value.dump() + " not in enum");
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!value.contains(key.get<std::string>()))
          errors.push_back(where + ": missing required key " + key.get<std::string>());
      }
    }
    if (schema.contains("properties")) {
      for (const auto& [key, sub] : schema["properties"].items()) {
        if (value.contains(key)) schema_check(root, sub, value[key], where + "." + key, errors);
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      schema_check(root, schema["items"], value[i], where + "[" + std::to_string(i) + "]",
                   errors);
    }
  }
}

std::vector<std::string> validate_against_schema(const json& report) {
  std::ifstream in(std::string(FATOU_SCHEMA_DIR) + "/report.schema.json");
  REQUIRE(in.good());
  json schema = json::parse(in);
  std::vector<std::string> errors;
  schema_check(schema, schema, report, "$", errors);
  return errors;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

}  // namespace

TEST_CASE("exit codes track verdicts, expectations and usage errors") {
  CHECK(run_cli("run --scenario escaping-atom --format json --deterministic").exit_code == 0);
  CHECK(run_cli("run --scenario uniform-spike-minorant --format json --deterministic").exit_code ==
        0);

  // Violated against an overridden expectation of Holds.
  CHECK(run_cli("run --scenario escaping-spike-negative --target eq1-as-eq3 --expect Holds "
                "--format json --deterministic")
            .exit_code == 1);

  // Overlapping brackets at zero tolerance with no recorded expectation.
  std::string overlap = write_temp_scenario(
      "fatou_cli_overlap",
      "scenario overlap\n"
      "space interval [0, 1]\n"
      "measure mu\npiece on [0, 1] density 1\n"
      "measure mun\npiece on [0, 1] density 1\n"
      "function f\nexpr ind(s > 1/2)\nstable 1\n"
      "target eq1\n");
  CHECK(run_cli("run --scenario " + overlap + " --tol 0 --format json --deterministic")
            .exit_code == 2);

  CHECK(run_cli("run --scenario no-such-scenario --format json").exit_code == 3);
  CHECK(run_cli("run --scenario escaping-atom --format yaml").exit_code == 3);
  CHECK(run_cli("converge --scenario escaping-atom --format json").exit_code == 3);
  CHECK(run_cli("run --scenario escaping-atom --target eq7 --format json").exit_code == 3);
}

TEST_CASE("list-scenarios names every builtin") {
  CliResult r = run_cli("list-scenarios");
  CHECK(r.exit_code == 0);
  for (const char* name : {"escaping-atom", "escaping-spike-negative", "escaping-spike-positive",
                           "uniform-spike-minorant", "escaping-mass-classic", "rational-support"}) {
    CAPTURE(name);
    CHECK(r.output.find(name) != std::string::npos);
  }
}

TEST_CASE("validate accepts the shipped scenario files and rejects bad ones") {
  std::string dir = FATOU_SCENARIO_DIR;
  std::string files;
  for (const char* name : {"escaping-atom", "escaping-spike-negative", "escaping-spike-positive",
                           "uniform-spike-minorant", "escaping-mass-classic", "rational-support"}) {
    files += " " + dir + "/" + name + ".scn";
  }
  CliResult good = run_cli("validate" + files);
  CHECK(good.exit_code == 0);
  CHECK(good.output.find("ok escaping-atom") != std::string::npos);

  std::string bad = write_temp_scenario("fatou_cli_bad",
                                        "scenario x\nspace interval [0, 1]\nwobble 3\n");
  std::string merged = std::string(FATOU_CLI_BIN) + " validate " + bad + " 2>&1";
  FILE* pipe = popen(merged.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string text;
  char buf[512];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) text.append(buf, got);
  int status = pclose(pipe);
  CHECK(WEXITSTATUS(status) == 3);
  CHECK(text.find(":3:") != std::string::npos);
  CHECK(text.find("wobble") != std::string::npos);
}

TEST_CASE("deterministic reports are byte-identical across runs and thread counts") {
  for (const char* scenario : {"escaping-atom", "rational-support"}) {
    CAPTURE(scenario);
    std::string base = "run --scenario " + std::string(scenario) +
                       " --format json --deterministic";
    CliResult one = run_cli(base + " --threads 1");
    CliResult eight = run_cli(base + " --threads 8");
    CliResult again = run_cli(base + " --threads 8");
    CHECK(one.exit_code == 0);
    CHECK(one.output == eight.output);
    CHECK(eight.output == again.output);
  }

  CliResult sweep1 = run_cli("sweep --scenario escaping-spike-negative --format csv "
                             "--deterministic --threads 1");
  CliResult sweep8 = run_cli("sweep --scenario escaping-spike-negative --format csv "
                             "--deterministic --threads 8");
  CHECK(sweep1.exit_code == 0);
  CHECK(sweep1.output == sweep8.output);

  CliResult conv1 = run_cli("converge --scenario escaping-atom --mode weak --format json "
                            "--deterministic --threads 1");
  CliResult conv8 = run_cli("converge --scenario escaping-atom --mode weak --format json "
                            "--deterministic --threads 8");
  CHECK(conv1.exit_code == 0);
  CHECK(conv1.output == conv8.output);
}

TEST_CASE("--out writes the same bytes that stdout would carry") {
  auto path = std::filesystem::temp_directory_path() / "fatou_cli_out.json";
  CliResult direct = run_cli("run --scenario escaping-atom --format json --deterministic");
  CliResult filed = run_cli("run --scenario escaping-atom --format json --deterministic --out " +
                            path.string());
  CHECK(direct.exit_code == 0);
  CHECK(filed.exit_code == 0);
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == direct.output);
}

TEST_CASE("run reports conform to the published schema") {
  for (const char* scenario : {"escaping-atom", "escaping-spike-negative", "rational-support"}) {
    CAPTURE(scenario);
    CliResult r = run_cli("run --scenario " + std::string(scenario) +
                          " --format json --deterministic");
    json report = json::parse(r.output);
    auto errors = validate_against_schema(report);
    for (const auto& e : errors) FAIL_CHECK(e);
    CHECK(errors.empty());
    CHECK_FALSE(report.contains("generated_at"));
  }

  // Without --deterministic the report carries a timestamp, still schema-valid.
  CliResult stamped = run_cli("run --scenario escaping-atom --format json");
  json report = json::parse(stamped.output);
  CHECK(report.contains("generated_at"));
  CHECK(validate_against_schema(report).empty());
}

TEST_CASE("sweep csv round-trips through printf formatting") {
  CliResult r = run_cli("sweep --scenario escaping-spike-negative --format csv --deterministic");
  CHECK(r.exit_code == 0);

  std::stringstream lines(r.output);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "n,value,bracket_lo,bracket_hi,closed_form");

  long prev_n = 0;
  double prev_value = 0;
  bool first = true;
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    auto cols = split_csv_line(line);
    REQUIRE(cols.size() == 5);

    long n = std::strtol(cols[0].c_str(), nullptr, 10);
    CHECK(n > prev_n);
    prev_n = n;

    double vals[4];
    for (int i = 0; i < 4; ++i) {
      char* end = nullptr;
      vals[i] = std::strtod(cols[i + 1].c_str(), &end);
      CHECK(*end == '\0');
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", vals[i]);
      CHECK(cols[i + 1] == buf);
    }
    double value = vals[0], lo = vals[1], hi = vals[2], closed = vals[3];
    CHECK(lo <= value);
    CHECK(value <= hi);
    CHECK(std::fabs(value - closed) <= 1e-6 * std::max(1.0, std::fabs(closed)));
    if (n == 1) CHECK(value == doctest::Approx(-2 * std::log(2.0)).epsilon(1e-12));
    if (n == 4) CHECK(value == doctest::Approx(-2.4260151319598084).epsilon(1e-12));
    if (!first) CHECK(value < prev_value);
    prev_value = value;
    first = false;
  }
  CHECK(rows >= 10);
}

TEST_CASE("converge reports carry verdicts and witnesses") {
  CliResult weak = run_cli("converge --scenario escaping-atom --mode weak --format json "
                           "--deterministic");
  CHECK(weak.exit_code == 0);
  json w = json::parse(weak.output);
  CHECK(w["report"]["mode"] == "weak");
  CHECK(w["report"]["verdict"] == "consistent");
  CHECK(w["report"]["witness"].is_null());
  CHECK(w["report"]["per_function"].size() >= 50);

  CliResult setwise = run_cli("converge --scenario escaping-atom --mode setwise --format json "
                              "--deterministic");
  CHECK(setwise.exit_code == 0);
  json s = json::parse(setwise.output);
  CHECK(s["report"]["mode"] == "setwise");
  CHECK(s["report"]["verdict"] == "falsified");
  CHECK(s["report"]["witness"] == "ind(s == 0)");
}
