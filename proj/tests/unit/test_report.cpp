// SPDX-License-Identifier: Apache-2.0
#include <sstream>

#include <doctest.h>

#include "corpus.hpp"
#include "pcfr/report.hpp"
#include "schema_check.hpp"

using namespace pcfr;
using pcfr::testing::corpus;
using pcfr::testing::load_schema;
using pcfr::testing::validate;

namespace {

nlohmann::json schema(const char* name) {
  return load_schema(std::string(PCFR_SCHEMA_DIR) + "/" + name + ".schema.json");
}

void conforms(const nlohmann::json& doc, const nlohmann::json& s) {
  const auto errors = validate(doc, s);
  for (const auto& e : errors) MESSAGE(e);
  CHECK(errors.empty());
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("validator catches violations") {
    const auto s = schema("stability_verdict");
    auto doc = to_json(StabilityVerdict{}, "x");
    conforms(doc, s);
    doc["schema"] = 2;
    CHECK_FALSE(validate(doc, s).empty());
    doc = to_json(StabilityVerdict{}, "x");
    doc.erase("radius");
    CHECK_FALSE(validate(doc, s).empty());
    doc = to_json(StabilityVerdict{}, "x");
    doc["extra"] = 1;
    CHECK_FALSE(validate(doc, s).empty());
    doc = to_json(StabilityVerdict{}, "x");
    doc["verdict"] = "Maybe";
    CHECK_FALSE(validate(doc, s).empty());
  }

  TEST_CASE("corpus reports match their schemas") {
    const auto grad_s = schema("grad_report");
    const auto stab_s = schema("stability_verdict");
    const auto trace_s = schema("branch_trace");
    const auto scan_s = schema("scan_report");
    for (const char* stem : {"relu", "sillyid", "crelu", "eqproj", "floor", "int", "square"}) {
      const auto src = corpus(stem);
      CAPTURE(stem);
      for (const auto& pt : src.sample_points) {
        conforms(to_json(compare_at(src.program(), pt)), grad_s);
        conforms(to_json(stability_probe(src.program(), pt, 0.1, 8, 1), src.path), stab_s);
        conforms(to_json(branch_trace(src.program(), pt)), trace_s);
      }
      ScanOptions opts;
      opts.samples = 50;
      std::vector<std::pair<double, double>> box(src.arity(), {-2.0, 2.0});
      conforms(to_json(failure_scan(src.program(), box, opts), src.path), scan_s);
    }
  }

  TEST_CASE("report fields") {
    const auto r = compare_at(corpus("sillyid").program(), std::vector<double>{0});
    const auto j = to_json(r);
    CHECK(j["verdict"] == "Fail");
    CHECK(j["fd"]["kind"] == "Differentiable");
    CHECK(j["adReverse"] == nlohmann::json::array({0.0}));
    CHECK(j["schema"] == kReportSchema);

    const auto t = to_json(branch_trace(corpus("floor").program(), std::vector<double>{0.5}));
    CHECK(t["events"][0]["event"] == "FixUnfolded");
    CHECK(t["events"][1]["branch"] == "Then");
  }

  TEST_CASE("scan csv") {
    ScanOptions opts;
    opts.samples = 3;
    opts.record_samples = true;
    const std::pair<double, double> box[] = {{-1, 1}, {-1, 1}};
    const auto r = failure_scan(corpus("eqproj").program(), box, opts);
    std::ostringstream os;
    write_scan_csv(os, r);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "x1,x2,verdict,value,ad_fwd_1,ad_fwd_2,ad_rev_1,ad_rev_2,fd_1,fd_2");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      CHECK(std::count(line.begin(), line.end(), ',') == 9);
    }
    CHECK(rows == 3);
  }
}
