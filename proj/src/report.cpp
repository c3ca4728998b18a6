// SPDX-License-Identifier: Apache-2.0
#include "pcfr/report.hpp"

namespace pcfr {

using nlohmann::json;

namespace {

json optional_vector(const std::optional<std::vector<double>>& v) {
  return v ? json(*v) : json(nullptr);
}

json to_json(const DiffProbe& p) {
  json j{{"kind", to_string(p.kind)}, {"reason", p.reason}};
  j["grad"] = p.kind == DiffProbe::Kind::Differentiable ? json(p.grad) : json(nullptr);
  if (p.axis != 0) {
    j["axis"] = p.axis;
    j["leftSlope"] = p.left_slope;
    j["rightSlope"] = p.right_slope;
    j["jump"] = p.jump;
  }
  return j;
}

}  // namespace

json to_json(const GradReport& r) {
  return json{{"schema", kReportSchema},
              {"kind", "GradReport"},
              {"point", r.point},
              {"value", r.value ? json(*r.value) : json(nullptr)},
              {"adForward", optional_vector(r.ad_forward)},
              {"adReverse", optional_vector(r.ad_reverse)},
              {"fd", to_json(r.fd)},
              {"verdict", to_string(r.verdict)},
              {"maxAbsErr", r.max_abs_err},
              {"maxRelErr", r.max_rel_err}};
}

json to_json(const ScanReport& r, const std::string& program) {
  json box = json::array();
  for (const auto& [lo, hi] : r.box) box.push_back({lo, hi});
  return json{{"schema", kReportSchema},
              {"kind", "ScanReport"},
              {"program", program},
              {"box", box},
              {"samples", r.samples},
              {"seed", r.seed},
              {"counts",
               {{"evaluated", r.evaluated},
                {"divergent", r.divergent},
                {"outsideDiffDomain", r.outside_diff_domain},
                {"inconclusive", r.inconclusive},
                {"agree", r.agree},
                {"fail", r.fail}}},
              {"failPoints", r.fail_points},
              {"failFraction", r.fail_fraction}};
}

json to_json(const StabilityVerdict& v, const std::string& program) {
  return json{{"schema", kReportSchema},
              {"kind", "StabilityVerdict"},
              {"program", program},
              {"verdict", to_string(v.kind)},
              {"center", v.center},
              {"radius", v.radius},
              {"probes", v.probes},
              {"seed", v.seed},
              {"witness", v.witness.empty() ? json(nullptr) : json(v.witness)},
              {"reason", v.reason}};
}

json to_json(const BranchTrace& t) {
  json events = json::array();
  for (const auto& d : t.events) {
    if (d.kind == Decision::Kind::CondTaken) {
      events.push_back({{"event", "CondTaken"},
                        {"branch", d.branch == Branch::Then ? "Then" : "Else"},
                        {"guard", d.guard}});
    } else {
      events.push_back({{"event", "FixUnfolded"}, {"binder", d.binder.str()}});
    }
  }
  return json{{"schema", kReportSchema},
              {"kind", "BranchTrace"},
              {"outcome", to_string(t.outcome)},
              {"events", events}};
}

void write_scan_csv(std::ostream& os, const ScanReport& r) {
  const std::size_t n = r.box.size();
  for (std::size_t i = 1; i <= n; ++i) os << 'x' << i << ',';
  os << "verdict,value";
  for (const char* col : {"ad_fwd_", "ad_rev_", "fd_"}) {
    for (std::size_t i = 1; i <= n; ++i) os << ',' << col << i;
  }
  os << '\n';
  const auto cells = [&](const std::optional<std::vector<double>>& v) {
    for (std::size_t i = 0; i < n; ++i) {
      os << ',';
      if (v && i < v->size()) os << format_real((*v)[i]);
    }
  };
  for (const auto& s : r.sample_log) {
    for (double x : s.point) os << format_real(x) << ',';
    os << to_string(s.verdict) << ',';
    if (s.value) os << format_real(*s.value);
    cells(s.ad_forward);
    cells(s.ad_reverse);
    cells(s.fd);
    os << '\n';
  }
}

}  // namespace pcfr
