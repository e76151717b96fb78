#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "pairbench/errors.hpp"
#include "pairbench/fixtures.hpp"
#include "pairbench/report.hpp"
#include "temp_dir.hpp"

using namespace pairbench;
using pairbench::testing::TempDir;

TEST_CASE("sha-256 known answers") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("The quick brown fox jumps over the lazy dog") ==
        "d7a8fbb307d7809469ca9abcb0082e4f8d5651e46d3cdb762d02d0bf37c9e592");
  // two-block message (56 bytes forces the length into a second block)
  CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  std::string million_a(1000000, 'a');
  CHECK(sha256_hex(million_a) ==
        "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("sha-256 of a file equals sha-256 of its bytes") {
  TempDir dir("sha");
  std::string payload = "line one\nline two\n";
  {
    std::ofstream out(dir / "f.txt", std::ios::binary);
    out << payload;
  }
  CHECK(sha256_file(dir / "f.txt") == sha256_hex(payload));
  CHECK_THROWS_AS(sha256_file(dir / "missing.txt"), Error);
}

TEST_CASE("manifest identity covers inputs and parameters, not wall time") {
  std::vector<std::pair<std::string, std::string>> inputs{
      {"b.jsonl", sha256_hex("bbb")}, {"a.jsonl", sha256_hex("aaa")}};
  RunManifest m1 = make_manifest(inputs, "stats", "answer-line", 0, 10000);
  CHECK(m1.run_id == sha256_hex(m1.canonical()));
  CHECK(m1.canonical().find("created") == std::string::npos);
  CHECK(!m1.created_utc.empty());

  // input order does not matter: canonical() sorts by label
  std::vector<std::pair<std::string, std::string>> reversed{inputs[1], inputs[0]};
  RunManifest m2 = make_manifest(reversed, "stats", "answer-line", 0, 10000);
  CHECK(m1.run_id == m2.run_id);

  RunManifest changed_seed = make_manifest(inputs, "stats", "answer-line", 1, 10000);
  CHECK(changed_seed.run_id != m1.run_id);
  RunManifest changed_policy = make_manifest(inputs, "report", "answer-line", 0, 10000);
  CHECK(changed_policy.run_id != m1.run_id);
  RunManifest changed_input =
      make_manifest({{"a.jsonl", sha256_hex("aaa")}, {"b.jsonl", sha256_hex("BBB")}},
                    "stats", "answer-line", 0, 10000);
  CHECK(changed_input.run_id != m1.run_id);

  std::string rendered = render_manifest(m1);
  CHECK(rendered.find("pairbench/manifest") != std::string::npos);
  CHECK(rendered.find(m1.run_id) != std::string::npos);
  TempDir dir("manifest");
  save_manifest(m1, dir / "manifest.json");
  CHECK(std::filesystem::exists(dir / "manifest.json"));
}

TEST_CASE("bundle loading and report rendering") {
  TempDir dir("report");
  FixtureBundle fixture = build_fixtures(dir.path());
  BundleView bundle = load_bundle(fixture.bundle_json);
  CHECK(bundle.configs.size() == 7);
  CHECK(bundle.scale_pairs.size() == 3);
  CHECK(bundle.tasks.size() == 200);
  CHECK(bundle.per_skill_config == "student-v2.0");
  CHECK(bundle.config("student-v1.9").llm_test);
  CHECK(!bundle.config("base-0.8b").llm_test);
  CHECK(bundle.config("base-4b").det_artifact);
  CHECK_THROWS_AS(bundle.config("never-heard-of-it"), ValidationError);
  // every referenced file participates in the manifest input list
  CHECK(bundle.files.size() == 2 + 3 * 7);  // bundle.json + tasks + 7x(det, llm, llm_b)

  ReportOptions options;
  options.resamples = 300;  // keep the unit test quick; acceptance runs the default
  options.seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;
  for (const auto& [label, path] : bundle.files) inputs.emplace_back(label, sha256_file(path));
  RunManifest manifest = make_manifest(inputs, "report", "answer-line+judge-a", 0, 300);

  ReportDocument doc = render_report(bundle, options, manifest);
  // landmark values that must appear bit-exact in the rendered text
  for (const char* landmark : {
           "## sft-contribution", "## pass-rates", "## pre-sft-trajectory",
           "## rejudge-shifts", "## paired-tests", "## saturation", "## attribution",
           "## per-skill",
           "+0.070", "+0.040", "+0.075",            // delta-lift by scale
           "chi2=9.03", "chi2=5.60",                 // per-model tests
           "0.00098",                                // exact binomial
           "sign_changes 3",                         // the pre-sft trajectory
           "lift 11 / flat 25 / regress 4",          // per-skill census
           "accident-fallacy", "spatial-reasoning",  // top lift skills
           "equivocation",                           // llm-view regress cluster
           manifest.run_id.c_str(),
       })
    CHECK_MESSAGE(doc.text.find(landmark) != std::string::npos, "missing: " << landmark);
  CHECK(doc.tsv.rfind("block\trow\tcol\trendered\texact", 0) == 0);

  // byte-identical regeneration for identical inputs and options
  ReportDocument again = render_report(bundle, options, manifest);
  CHECK(doc.text == again.text);
  CHECK(doc.tsv == again.tsv);

  // the artifact view is excluded from statistics: no line pairs base-4b with
  // the deterministic view, and its LLM row carries no test columns
  std::istringstream lines(doc.text);
  std::string line;
  bool base4b_llm_seen = false;
  while (std::getline(lines, line)) {
    if (line.find("base-4b") == std::string::npos) continue;
    CHECK(line.find(" det") == std::string::npos);
    if (line.find(" llm ") != std::string::npos) base4b_llm_seen = true;
  }
  CHECK(!base4b_llm_seen);  // base-4b has no reported test, so no paired-tests row
  CHECK(doc.tsv.find("base-4b/det") == std::string::npos);
}

TEST_CASE("loading a malformed bundle fails cleanly") {
  TempDir dir("bad-bundle");
  {
    std::ofstream out(dir / "bundle.json");
    out << R"({"format":"pairbench/bundle","version":1,"tasks":"tasks.jsonl","configs":[]})";
  }
  CHECK_THROWS_AS(load_bundle(dir / "bundle.json"), Error);
  {
    std::ofstream out(dir / "not-a-bundle.json");
    out << R"({"format":"pairbench/other","version":1})";
  }
  CHECK_THROWS_AS(load_bundle(dir / "not-a-bundle.json"), ValidationError);
}
