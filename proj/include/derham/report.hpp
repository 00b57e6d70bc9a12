#pragma once

// Deterministic JSON reports.  Every experiment writes one document with a
// fixed key order and no environment-dependent content (no timestamps, no
// hostnames, no pointers), so identical runs produce identical bytes.

#include <string>
#include <vector>

#include "json.hpp"

#include "derham/constants.hpp"

namespace derham {

using Json = nlohmann::ordered_json;

// Encodes a double for a report: finite values stay numbers, infinities and
// NaN become the strings "inf", "-inf", "nan" so the document stays valid.
Json json_number(double v);

struct Verdict {
  int checks_total = 0;
  int checks_failed = 0;
  std::vector<std::string> failures;  // names of failed checks
  bool pass() const { return checks_failed == 0; }
};

// Accumulates one experiment's output.  Layout of the finished document:
//   { "tool": "derhamlab", "kind": ..., "label": ...,
//     "config": {...}, "results": {...}, "checks": [...], "verdict": {...} }
class ReportBuilder {
 public:
  ReportBuilder(std::string kind, std::string label);

  Json& config() { return doc_["config"]; }
  Json& results() { return doc_["results"]; }

  void add_check(const CheckRecord& check);
  void add_failure(const std::string& name);  // failure that is not an inequality

  const Verdict& verdict() const { return verdict_; }
  Json finish() const;

 private:
  Json doc_;
  Verdict verdict_;
};

std::string serialize_report(const Json& doc);
void write_report(const Json& doc, const std::string& path);
Json read_report(const std::string& path);

// One line of `summarize` output per report file.
struct SummaryRow {
  std::string path;
  std::string kind;
  std::string label;
  int checks_total = 0;
  int checks_failed = 0;
  bool pass = false;
};

SummaryRow summarize_report(const Json& doc, const std::string& path);
std::string format_summary(const std::vector<SummaryRow>& rows);

}  // namespace derham
