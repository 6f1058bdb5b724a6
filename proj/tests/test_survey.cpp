#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "hiddenpop/errors.hpp"
#include "hiddenpop/survey.hpp"

using namespace hiddenpop;

namespace {

HashedSurvey parse(const std::string& text, std::size_t m) {
  std::istringstream in(text);
  HashedSurvey survey;
  survey.hash_space = m;
  survey.records = read_survey(in).records;
  return survey;
}

std::string validation_error(const HashedSurvey& survey, std::optional<std::size_t> p = std::nullopt) {
  try {
    validate_survey(survey, p);
  } catch (const std::invalid_argument& error) {
    return error.what();
  }
  return {};
}

}  // namespace

TEST_CASE("hashed view of the worked example") {
  using namespace fixtures::fig1;
  std::unordered_map<Vertex, Code> table;
  for (Vertex v = 0; v < 12; ++v) table.emplace(v, Code{v + 1});
  const HashAssignment psi(100, table);
  const auto reports = recapture(graph(), forest(), 5, 1);
  const auto survey = make_hashed_survey(forest(), reports, psi);
  REQUIRE(survey.records.size() == 7);
  CHECK_FALSE(survey.records[0].recruiter_row.has_value());
  CHECK(survey.records[4].recruiter_row == 3u);  // 5 was recruited by 4
  CHECK(survey.capture_codes() == apply_hash(psi, capture()));
  CHECK(survey.report_codes() == apply_hash(psi, fixtures::fig1::reports()));
  CHECK(survey.referral_graph().edge_count() == 6);
  CHECK_NOTHROW(validate_survey(survey, 5));
}

TEST_CASE("survey CSV round trip") {
  HashedSurvey survey;
  survey.hash_space = 50;
  survey.records = {{Code{7}, std::nullopt, {Code{1}, Code{2}}},
                    {Code{9}, 0, {}},
                    {Code{12}, 1, {Code{50}}}};
  SurveyMetadata meta;
  meta.seeds = 1;
  meta.coupons = 3;
  meta.max_reports = 4;
  std::stringstream text;
  write_survey(text, survey, meta);
  CHECK(text.str() ==
        "# hiddenpop-survey v1 m=50 s=1 c=3 p=4\n"
        "subject_code,recruiter_row,report_codes\n"
        "7,,1;2\n"
        "9,1,\n"
        "12,2,50\n");
  const auto file = read_survey(text);
  CHECK(file.records == survey.records);
  CHECK(file.metadata.hash_space == 50u);
  CHECK(file.metadata.seeds == 1u);
  CHECK(file.metadata.coupons == 3u);
  CHECK(file.metadata.max_reports == 4u);
  CHECK_FALSE(file.metadata.telefunken_digits.has_value());
}

TEST_CASE("survey parse errors") {
  const auto line_of = [](const std::string& body) {
    std::istringstream in(body);
    try {
      read_survey(in);
    } catch (const ParseError& error) {
      return static_cast<long>(error.line());
    }
    return -1L;
  };
  CHECK(line_of("") == 0);
  CHECK(line_of("# only a comment\n") == 0);
  CHECK(line_of("1,,2\n3\n") == 2);
  CHECK(line_of("1,,2\nx,,2\n") == 2);
  CHECK(line_of("1,0,2\n") == 1);
  CHECK(line_of("1,,2;;3\n") == 1);
  CHECK(line_of("1,,-2\n") == 1);
}

TEST_CASE("survey validation names the offending record") {
  std::string reports;
  for (int i = 1; i <= 26; ++i) reports += (i > 1 ? ";" : "") + std::to_string(i);
  const auto long_list = parse("5,,1\n6,1," + reports + "\n", 100);
  CHECK(validation_error(long_list, 25).find("record 2") == 0);
  CHECK(validation_error(long_list, 26).empty());
  CHECK(validation_error(long_list, std::nullopt).empty());

  CHECK(validation_error(parse("5,,1\n101,1,\n", 100)).find("record 2") == 0);
  CHECK(validation_error(parse("5,,1\n0,1,\n", 100)).find("record 2") == 0);
  CHECK(validation_error(parse("5,,1;200\n", 100)).find("record 1") == 0);
  CHECK(validation_error(parse("5,,\n6,3,\n", 100)).find("record 2") == 0);
  CHECK(validation_error(parse("5,1,\n", 100)).find("record 1") == 0);
  CHECK(validation_error(parse("5,,\n6,3,\n7,2,\n", 100)).find("cycle") != std::string::npos);
  CHECK_FALSE(validation_error(HashedSurvey{100, {}}, 25).empty());
}

TEST_CASE("telefunken digits survive the header") {
  std::istringstream in("# hiddenpop-survey v1 d=2\n3,,0;15\n");
  const auto file = read_survey(in);
  CHECK(file.metadata.telefunken_digits == 2u);
  CHECK_FALSE(file.metadata.hash_space.has_value());
  CHECK(file.records[0].report_codes == std::vector<Code>{Code{0}, Code{15}});
}
