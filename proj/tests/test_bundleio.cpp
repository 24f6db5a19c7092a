#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "pdgfix/bundleio.hpp"
#include "pdgfix/errors.hpp"
#include "support.hpp"

using namespace pdgfix;
namespace fs = std::filesystem;

namespace {

std::vector<PatternBundle> &builtins() {
  static std::vector<PatternBundle> bundles =
      load_pattern_set(PDGFIX_PATTERN_DIR, /*strict=*/true);
  return bundles;
}

bool bundles_equal(const PatternBundle &a, const PatternBundle &b) {
  // Serialized form is a faithful structural projection.
  return bundle_to_json(a) == bundle_to_json(b);
}

fs::path temp_dir(const std::string &name) {
  fs::path dir = fs::temp_directory_path() / ("pdgfix_bundleio_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

} // namespace

TEST_CASE("the built-in set loads with nine bundles in id order") {
  const auto &bundles = builtins();
  REQUIRE(bundles.size() == 9);
  for (size_t i = 1; i < bundles.size(); ++i)
    CHECK(bundles[i - 1].id < bundles[i].id);
  bool has_enumerate = false;
  for (const auto &bundle : bundles)
    if (bundle.id == "use-enumerate")
      has_enumerate = true;
  CHECK(has_enumerate);
}

TEST_CASE("save/load round-trip is structurally equal for every built-in") {
  fs::path dir = temp_dir("roundtrip");
  for (const PatternBundle &bundle : builtins()) {
    fs::path file = dir / (bundle.id + ".pattern.json");
    save_bundle(bundle, file);
    PatternBundle loaded = load_bundle(file);
    INFO(bundle.id);
    CHECK(bundles_equal(bundle, loaded));
  }
}

TEST_CASE("round-trip holds for 50 randomized bundle variants") {
  std::mt19937 rng(99);
  const char *suffixes[] = {".keys", ".append", ".items", ".get"};
  int produced = 0;
  while (produced < 50) {
    PatternBundle bundle = builtins()[produced % builtins().size()];
    bundle.id = "variant-" + std::to_string(produced);
    bundle.description = "randomized variant " + std::to_string(rng() % 1000);
    // shuffle mode variants while keeping them well-formed
    for (auto &[vid, mode] : bundle.modes) {
      switch (rng() % 3) {
      case 0:
        mode = {MatchingMode::MatchAnyLabel, ""};
        break;
      case 1:
        mode = {MatchingMode::MatchOriginalLabels, ""};
        break;
      case 2:
        mode = {MatchingMode::MatchLongestCommonSuffix,
                suffixes[rng() % 4]};
        break;
      }
    }
    std::string json_text = bundle_to_json(bundle);
    PatternBundle loaded = bundle_from_json(json_text);
    CHECK(bundle_to_json(loaded) == json_text);
    ++produced;
  }
  CHECK(produced == 50);
}

TEST_CASE("newer schema versions are rejected") {
  nlohmann::json j = nlohmann::json::parse(bundle_to_json(builtins()[0]));
  j["schema_version"] = PatternBundle::kSchemaVersion + 1;
  CHECK_THROWS_AS(bundle_from_json(j.dump()), VersionError);
}

TEST_CASE("a dangling script reference names the action index") {
  nlohmann::json j = nlohmann::json::parse(bundle_to_json(builtins()[0]));
  REQUIRE(!j["script"].empty());
  // point an existing-node reference far outside the canonical tree
  nlohmann::json &action = j["script"][0];
  if (action.contains("target"))
    action["target"] = {{"node", 99999}};
  else
    action["parent"] = {{"node", 99999}};
  try {
    bundle_from_json(j.dump());
    FAIL("expected SchemaError");
  } catch (const SchemaError &e) {
    CHECK(std::string(e.what()).find("action 0") != std::string::npos);
  }
}

TEST_CASE("duplicate pattern ids are rejected at set level") {
  fs::path dir = temp_dir("dup");
  PatternBundle a = builtins()[0];
  PatternBundle b = builtins()[1];
  b.id = a.id;
  save_bundle(a, dir / "one.pattern.json");
  save_bundle(b, dir / "two.pattern.json");
  CHECK_THROWS_AS(load_pattern_set(dir), DuplicateId);
}

TEST_CASE("an empty directory yields an empty list") {
  fs::path dir = temp_dir("empty");
  CHECK(load_pattern_set(dir).empty());
}

TEST_CASE("malformed bundles are reported and skipped unless strict") {
  fs::path dir = temp_dir("malformed");
  save_bundle(builtins()[0], dir / "good.pattern.json");
  std::ofstream bad(dir / "bad.pattern.json");
  bad << "{ not json";
  bad.close();
  std::vector<PatternSetDiagnostic> diagnostics;
  std::vector<PatternBundle> loaded =
      load_pattern_set(dir, /*strict=*/false, &diagnostics);
  CHECK(loaded.size() == 1);
  REQUIRE(diagnostics.size() == 1);
  CHECK(diagnostics[0].file.filename() == "bad.pattern.json");
  CHECK_THROWS_AS(load_pattern_set(dir, /*strict=*/true), SchemaError);
}
