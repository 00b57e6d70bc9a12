#include "derham/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace derham {

Json json_number(double v) {
  if (std::isnan(v)) return Json("nan");
  if (std::isinf(v)) return Json(v > 0 ? "inf" : "-inf");
  return Json(v);
}

ReportBuilder::ReportBuilder(std::string kind, std::string label) {
  doc_["tool"] = "derhamlab";
  doc_["kind"] = std::move(kind);
  doc_["label"] = std::move(label);
  doc_["config"] = Json::object();
  doc_["results"] = Json::object();
  doc_["checks"] = Json::array();
}

void ReportBuilder::add_check(const CheckRecord& check) {
  Json entry;
  entry["name"] = check.name;
  entry["lhs"] = json_number(check.lhs);
  entry["rhs"] = json_number(check.rhs);
  entry["slack"] = json_number(check.slack);
  entry["holds"] = check.holds;
  doc_["checks"].push_back(std::move(entry));
  ++verdict_.checks_total;
  if (!check.holds) {
    ++verdict_.checks_failed;
    verdict_.failures.push_back(check.name);
  }
}

void ReportBuilder::add_failure(const std::string& name) {
  Json entry;
  entry["name"] = name;
  entry["holds"] = false;
  doc_["checks"].push_back(std::move(entry));
  ++verdict_.checks_total;
  ++verdict_.checks_failed;
  verdict_.failures.push_back(name);
}

Json ReportBuilder::finish() const {
  Json doc = doc_;
  Json verdict;
  verdict["checks_total"] = verdict_.checks_total;
  verdict["checks_failed"] = verdict_.checks_failed;
  verdict["pass"] = verdict_.pass();
  doc["verdict"] = std::move(verdict);
  return doc;
}

std::string serialize_report(const Json& doc) { return doc.dump(2) + "\n"; }

void write_report(const Json& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open report file for writing: " + path);
  out << serialize_report(doc);
  if (!out) throw std::runtime_error("failed writing report file: " + path);
}

Json read_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open report file: " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const std::exception& e) {
    throw std::runtime_error("cannot parse report file " + path + ": " + e.what());
  }
  return doc;
}

SummaryRow summarize_report(const Json& doc, const std::string& path) {
  SummaryRow row;
  row.path = path;
  row.kind = doc.value("kind", std::string("?"));
  row.label = doc.value("label", std::string("?"));
  if (doc.contains("verdict")) {
    const Json& v = doc["verdict"];
    row.checks_total = v.value("checks_total", 0);
    row.checks_failed = v.value("checks_failed", 0);
    row.pass = v.value("pass", false);
  }
  return row;
}

std::string format_summary(const std::vector<SummaryRow>& rows) {
  std::size_t kind_w = 4, label_w = 5;
  for (const auto& r : rows) {
    kind_w = std::max(kind_w, r.kind.size());
    label_w = std::max(label_w, r.label.size());
  }
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(kind_w) + 2) << "kind"
      << std::setw(static_cast<int>(label_w) + 2) << "label" << std::setw(8) << "checks"
      << std::setw(8) << "failed"
      << "verdict\n";
  int passed = 0;
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(kind_w) + 2) << r.kind
        << std::setw(static_cast<int>(label_w) + 2) << r.label << std::setw(8)
        << r.checks_total << std::setw(8) << r.checks_failed
        << (r.pass ? "PASS" : "FAIL") << "\n";
    if (r.pass) ++passed;
  }
  out << rows.size() << " report(s), " << passed << " pass, "
      << (rows.size() - static_cast<std::size_t>(passed)) << " fail\n";
  return out.str();
}

}  // namespace derham
