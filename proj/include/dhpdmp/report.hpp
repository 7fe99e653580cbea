#ifndef DHPDMP_REPORT_HPP
#define DHPDMP_REPORT_HPP

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dhpdmp/contraction.hpp"
#include "dhpdmp/coupling.hpp"
#include "dhpdmp/params.hpp"
#include "dhpdmp/pdmp.hpp"
#include "dhpdmp/verify.hpp"

namespace dhpdmp {

using Json = nlohmann::ordered_json;

Json to_json(const Vector& v);
Json to_json(const State& s);
Json to_json(const Estimate& e);
Json to_json(const BetaSolution& b);
Json to_json(const DriftReport& r, bool with_nodes = false);
Json to_json(const OverlapConstants& o);
Json to_json(const B2Report& r);
Json to_json(const CouplingParams& p);
Json to_json(const PipelineResult& r);
Json to_json(const ContractionReport& r);
Json to_json(const FlowCheck& c);
Json to_json(const ThinningCheck& c);
Json to_json(const MarginalCheck& c);
Json to_json(const GeneratorCheck& c);
Json to_json(const CouplingCheck& c);
Json to_json(const DriftAgreement& c);

/// One JSON object per accepted event, tagged with the trajectory id.
void write_events_jsonl(std::ostream& out, std::size_t traj_id, const EventLog& log);
/// Same for the coupled chain, with the branch tag.
void write_events_jsonl(std::ostream& out, std::size_t traj_id, const CoupledEventLog& log);

/// RFC-4180 CSV with a fixed header; numbers printed with 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void row(std::size_t id, const std::vector<double>& values);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

std::string format_number(double x);

}  // namespace dhpdmp

#endif  // DHPDMP_REPORT_HPP
