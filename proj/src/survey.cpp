#include "hiddenpop/survey.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "hiddenpop/errors.hpp"

namespace hiddenpop {

Multiset<Code> HashedSurvey::capture_codes() const {
  Multiset<Code> out;
  for (const auto& record : records) out.add(record.subject_code);
  return out;
}

Multiset<Code> HashedSurvey::report_codes() const {
  Multiset<Code> out;
  for (const auto& record : records) {
    for (const Code code : record.report_codes) out.add(code);
  }
  return out;
}

Graph HashedSurvey::referral_graph() const {
  std::vector<Edge> edges;
  for (std::size_t row = 0; row < records.size(); ++row) {
    if (const auto& parent = records[row].recruiter_row) {
      edges.emplace_back(static_cast<Vertex>(*parent), static_cast<Vertex>(row));
    }
  }
  return Graph::from_edges(records.size(), edges);
}

HashedSurvey make_hashed_survey(const RdsForest& forest, const ReportMultiset& reports,
                                const HashAssignment& psi) {
  HashedSurvey survey;
  survey.hash_space = psi.hash_space();
  std::unordered_map<Vertex, std::size_t> row_of;
  for (std::size_t row = 0; row < forest.subjects.size(); ++row) row_of.emplace(forest.subjects[row], row);

  survey.records.resize(forest.subjects.size());
  for (std::size_t row = 0; row < forest.subjects.size(); ++row) {
    const Vertex v = forest.subjects[row];
    auto& record = survey.records[row];
    record.subject_code = psi.code_of(v);
    if (const auto it = reports.per_subject.find(v); it != reports.per_subject.end()) {
      for (const Vertex u : it->second) record.report_codes.push_back(psi.code_of(u));
    }
  }
  for (const auto& [recruiter, recruit] : forest.referrals) {
    survey.records[row_of.at(recruit)].recruiter_row = row_of.at(recruiter);
  }
  return survey;
}

void validate_survey(const HashedSurvey& survey, std::optional<std::size_t> max_reports) {
  const auto& records = survey.records;
  if (records.empty()) throw std::invalid_argument("survey has no records");
  const auto in_range = [&](Code code) {
    return code_value(code) >= 1 && code_value(code) <= survey.hash_space;
  };
  const auto fail = [](std::size_t row, const std::string& what) {
    throw std::invalid_argument("record " + std::to_string(row + 1) + ": " + what);
  };
  for (std::size_t row = 0; row < records.size(); ++row) {
    const auto& record = records[row];
    if (!in_range(record.subject_code)) {
      fail(row, "subject code " + std::to_string(code_value(record.subject_code)) + " outside [1, " +
                    std::to_string(survey.hash_space) + "]");
    }
    for (const Code code : record.report_codes) {
      if (!in_range(code)) fail(row, "report code " + std::to_string(code_value(code)) + " out of range");
    }
    if (max_reports && record.report_codes.size() > *max_reports) {
      fail(row, std::to_string(record.report_codes.size()) + " reports exceed the limit p=" +
                    std::to_string(*max_reports));
    }
    if (const auto& parent = record.recruiter_row) {
      if (*parent >= records.size()) fail(row, "recruiter row " + std::to_string(*parent + 1) + " does not exist");
      if (*parent == row) fail(row, "subject recruits itself");
    }
  }
  // Every chain must reach a seed: walking recruiter links from any row can
  // take at most |records| steps.
  std::vector<char> state(records.size(), 0);  // 0 unseen, 1 on current path, 2 reaches a seed
  for (std::size_t start = 0; start < records.size(); ++start) {
    std::vector<std::size_t> path;
    std::size_t row = start;
    while (state[row] == 0) {
      state[row] = 1;
      path.push_back(row);
      if (!records[row].recruiter_row) break;
      row = *records[row].recruiter_row;
    }
    if (state[row] == 1 && records[row].recruiter_row) fail(start, "coupon chain forms a cycle");
    for (const auto r : path) state[r] = 2;
  }
}

namespace {

const char* kSurveyMagic = "hiddenpop-survey";

void write_key(std::ostream& out, const char* key, const std::optional<std::size_t>& value) {
  if (value) out << ' ' << key << '=' << *value;
}

std::size_t parse_count(const std::string& text, std::size_t line, const std::string& what) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError(line, "bad " + what + " `" + text + "`");
  }
  try {
    return static_cast<std::size_t>(std::stoull(text));
  } catch (const std::exception&) {
    throw ParseError(line, "bad " + what + " `" + text + "`");
  }
}

Code parse_code(const std::string& text, std::size_t line) {
  const auto value = parse_count(text, line, "code");
  if (value > UINT32_MAX) throw ParseError(line, "code `" + text + "` too large");
  return Code{static_cast<std::uint32_t>(value)};
}

void parse_header(const std::string& line, std::size_t line_number, SurveyMetadata& metadata) {
  std::istringstream tokens(line.substr(1));
  std::string token;
  while (tokens >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const auto key = token.substr(0, eq);
    const auto value = token.substr(eq + 1);
    if (key == "m") metadata.hash_space = parse_count(value, line_number, "m");
    else if (key == "s") metadata.seeds = parse_count(value, line_number, "s");
    else if (key == "c") metadata.coupons = parse_count(value, line_number, "c");
    else if (key == "p") metadata.max_reports = parse_count(value, line_number, "p");
    else if (key == "d") metadata.telefunken_digits = static_cast<unsigned>(parse_count(value, line_number, "d"));
  }
}

}  // namespace

void write_survey(std::ostream& out, const HashedSurvey& survey, const SurveyMetadata& metadata) {
  out << "# " << kSurveyMagic << " v1";
  write_key(out, "m", metadata.hash_space ? metadata.hash_space : std::optional<std::size_t>(survey.hash_space));
  write_key(out, "s", metadata.seeds);
  write_key(out, "c", metadata.coupons);
  write_key(out, "p", metadata.max_reports);
  if (metadata.telefunken_digits) out << " d=" << *metadata.telefunken_digits;
  out << '\n' << "subject_code,recruiter_row,report_codes\n";
  for (const auto& record : survey.records) {
    out << record.subject_code << ',';
    if (record.recruiter_row) out << *record.recruiter_row + 1;
    out << ',';
    for (std::size_t i = 0; i < record.report_codes.size(); ++i) {
      if (i) out << ';';
      out << record.report_codes[i];
    }
    out << '\n';
  }
}

SurveyFile read_survey(std::istream& in) {
  SurveyFile file;
  std::string line;
  std::size_t line_number = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (!seen_data && line.find(kSurveyMagic) != std::string::npos) parse_header(line, line_number, file.metadata);
      continue;
    }
    if (!seen_data && line.rfind("subject_code", 0) == 0) continue;
    seen_data = true;

    const auto first = line.find(',');
    const auto second = first == std::string::npos ? std::string::npos : line.find(',', first + 1);
    if (second == std::string::npos) {
      throw ParseError(line_number, "expected `subject_code,recruiter_row,report_codes`");
    }
    SurveyRecord record;
    record.subject_code = parse_code(line.substr(0, first), line_number);
    const auto recruiter = line.substr(first + 1, second - first - 1);
    if (!recruiter.empty()) {
      const auto row = parse_count(recruiter, line_number, "recruiter row");
      if (row == 0) throw ParseError(line_number, "recruiter rows are 1-based");
      record.recruiter_row = row - 1;
    }
    const auto reports = line.substr(second + 1);
    if (!reports.empty()) {
      std::size_t start = 0;
      for (;;) {
        const auto end = reports.find(';', start);
        record.report_codes.push_back(parse_code(reports.substr(start, end - start), line_number));
        if (end == std::string::npos) break;
        start = end + 1;
      }
    }
    file.records.push_back(std::move(record));
  }
  if (file.records.empty()) throw ParseError(0, "survey file contains no records");
  return file;
}

SurveyFile load_survey(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open survey file " + path.string());
  return read_survey(in);
}

}  // namespace hiddenpop
