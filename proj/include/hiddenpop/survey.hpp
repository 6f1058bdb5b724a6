#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hiddenpop/graph.hpp"
#include "hiddenpop/hashing.hpp"
#include "hiddenpop/multiset.hpp"
#include "hiddenpop/rds.hpp"

namespace hiddenpop {

// One interviewed subject as seen by the field team: only codes and the
// coupon chain are known.
struct SurveyRecord {
  Code subject_code{};
  std::optional<std::size_t> recruiter_row;  // 0-based index of the recruiter's record
  std::vector<Code> report_codes;

  bool operator==(const SurveyRecord&) const = default;
};

// The hashed view of one capture/recapture round. This is everything the
// anonymous estimators may look at; simulated trials are converted to it so
// simulated and field data go through identical code.
struct HashedSurvey {
  std::size_t hash_space = 0;
  std::vector<SurveyRecord> records;

  Multiset<Code> capture_codes() const;  // psi S
  Multiset<Code> report_codes() const;   // psi rS

  // Coupon forest with record indices as vertices.
  Graph referral_graph() const;

  bool operator==(const HashedSurvey&) const = default;
};

// Records follow the forest's interview order; each record's reports are
// the subject's R_v mapped through psi.
HashedSurvey make_hashed_survey(const RdsForest& forest, const ReportMultiset& reports,
                                const HashAssignment& psi);

// Throws std::invalid_argument naming the first offending record (1-based)
// when: the survey is empty, a code is outside [1, m], a recruiter reference
// is out of range or self-referential, the coupon chain has a cycle, or a
// record carries more than max_reports reports.
void validate_survey(const HashedSurvey& survey, std::optional<std::size_t> max_reports);

// Header values carried alongside the records so that a survey can be
// re-estimated with the parameters it was collected under.
struct SurveyMetadata {
  std::optional<std::size_t> hash_space;   // m
  std::optional<std::size_t> seeds;        // s
  std::optional<std::size_t> coupons;      // c
  std::optional<std::size_t> max_reports;  // p
  std::optional<unsigned> telefunken_digits;
};

struct SurveyFile {
  std::vector<SurveyRecord> records;
  SurveyMetadata metadata;
};

// Survey CSV:
//   # hiddenpop-survey v1 m=3125 s=6 c=3 p=25
//   subject_code,recruiter_row,report_codes
//   812,,17;2210;3001
//   45,1,
// recruiter_row is the 1-based data row of the recruiter, blank for seeds.
// Reports are ';'-separated decimal codes. The column-name line is optional.
// Format errors throw ParseError with the file line number. Codes are read
// verbatim; range checks belong to validate_survey.
void write_survey(std::ostream& out, const HashedSurvey& survey, const SurveyMetadata& metadata);
SurveyFile read_survey(std::istream& in);
SurveyFile load_survey(const std::filesystem::path& path);

}  // namespace hiddenpop
