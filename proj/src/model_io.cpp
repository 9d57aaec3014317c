#include "twostage/model_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "twostage/error.hpp"

namespace twostage {

namespace {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto start = text.find_first_not_of(" \t", pos);
    if (start == std::string_view::npos) break;
    auto end = text.find_first_of(" \t", start);
    if (end == std::string_view::npos) end = text.size();
    words.push_back(text.substr(start, end - start));
    pos = end;
  }
  return words;
}

struct Line {
  int number = 0;
  std::string_view text;
};

/// Non-blank lines with comments stripped. Views point into `storage`.
std::vector<Line> content_lines(std::istream& in, std::vector<std::string>& storage) {
  std::string raw;
  int number = 0;
  std::vector<std::pair<int, std::size_t>> kept;
  while (std::getline(in, raw)) {
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    if (trim(raw).empty()) continue;
    storage.push_back(raw);
    kept.emplace_back(number, storage.size() - 1);
  }
  std::vector<Line> lines;
  for (const auto& [line_number, index] : kept) lines.push_back({line_number, trim(storage[index])});
  return lines;
}

[[noreturn]] void parse_error(std::string_view source, int line, const std::string& message) {
  throw Error(ErrorCode::ParseError,
              std::string(source) + ":" + std::to_string(line) + ": " + message);
}

double parse_real(std::string_view word, std::string_view source, int line, std::size_t field) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc() || ptr != word.data() + word.size()) {
    parse_error(source, line, "field " + std::to_string(field) + ": '" + std::string(word) +
                                  "' is not a decimal number");
  }
  return value;
}

std::int64_t parse_count(std::string_view word, std::string_view source, int line, std::size_t field) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc() || ptr != word.data() + word.size()) {
    parse_error(source, line, "field " + std::to_string(field) + ": '" + std::string(word) +
                                  "' is not an integer");
  }
  if (value < 0) {
    parse_error(source, line, "field " + std::to_string(field) + ": counts must be nonnegative");
  }
  return value;
}

std::ifstream open_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open file");
  return in;
}

}  // namespace

ModelFile parse_model_file(std::istream& in, std::string_view source) {
  std::vector<std::string> storage;
  const std::vector<Line> lines = content_lines(in, storage);
  if (lines.empty()) parse_error(source, 1, "empty model file");

  ModelFile file;
  const auto header = split_words(lines[0].text);
  if (header.size() != 2 || header[0] != "model") {
    parse_error(source, lines[0].number, "expected 'model <name>'");
  }
  file.name = std::string(header[1]);

  if (lines.size() < 2) parse_error(source, lines[0].number, "missing 'renormalize <on|off>'");
  const auto flag = split_words(lines[1].text);
  if (flag.size() != 2 || flag[0] != "renormalize" || (flag[1] != "on" && flag[1] != "off")) {
    parse_error(source, lines[1].number, "expected 'renormalize <on|off>'");
  }
  file.renormalize = flag[1] == "on";

  for (std::size_t k = 2; k < lines.size(); ++k) {
    const Line& line = lines[k];
    const auto colon = line.text.find(':');
    if (colon == std::string_view::npos) parse_error(source, line.number, "expected 'group <label> : <cells>'");
    const auto head = split_words(line.text.substr(0, colon));
    if (head.size() != 2 || head[0] != "group") {
      parse_error(source, line.number, "expected 'group <label> : <cells>'");
    }
    Group group;
    group.label = std::string(head[1]);
    const auto cells = split_words(line.text.substr(colon + 1));
    if (cells.empty()) parse_error(source, line.number, "group '" + group.label + "' has no cells");
    for (std::size_t j = 0; j < cells.size(); ++j) {
      group.cells.push_back(parse_real(cells[j], source, line.number, j + 1));
    }
    file.groups.push_back(std::move(group));
  }
  return file;
}

TwoStageModel to_model(ModelFile file) {
  return TwoStageModel::build(std::move(file.groups), file.renormalize, std::move(file.name));
}

std::string format_model(const TwoStageModel& model) {
  std::ostringstream out;
  out << "model " << (model.name().empty() ? "unnamed" : model.name()) << '\n';
  out << "renormalize off\n";
  char buffer[32];
  for (std::size_t i = 0; i < model.group_count(); ++i) {
    out << "group " << model.label(i) << " :";
    for (double cell : model.group(i)) {
      std::snprintf(buffer, sizeof buffer, "%.17g", cell);
      out << ' ' << buffer;
    }
    out << '\n';
  }
  return out.str();
}

TwoStageModel load_model(const std::string& name_or_path) {
  if (auto bundled = bundled_model(name_or_path)) return *std::move(bundled);
  std::ifstream in = open_file(name_or_path);
  return to_model(parse_model_file(in, name_or_path));
}

SurveyCounts parse_counts_file(std::istream& in, std::string_view source) {
  std::vector<std::string> storage;
  const std::vector<Line> lines = content_lines(in, storage);
  if (lines.empty() || lines[0].text != "present") {
    parse_error(source, lines.empty() ? 1 : lines[0].number, "expected 'present'");
  }
  std::vector<std::vector<std::int64_t>> present;
  std::optional<std::vector<std::int64_t>> prior;
  std::size_t k = 1;
  for (; k < lines.size() && lines[k].text != "prior"; ++k) {
    std::vector<std::int64_t> row;
    const auto words = split_words(lines[k].text);
    for (std::size_t j = 0; j < words.size(); ++j) row.push_back(parse_count(words[j], source, lines[k].number, j + 1));
    present.push_back(std::move(row));
  }
  if (present.empty()) parse_error(source, lines[0].number, "no present count rows");
  if (k < lines.size()) {
    const int prior_line = lines[k].number;
    if (k + 1 >= lines.size()) parse_error(source, prior_line, "'prior' must be followed by one line of counts");
    if (k + 2 < lines.size()) parse_error(source, lines[k + 2].number, "unexpected content after prior counts");
    const Line& line = lines[k + 1];
    std::vector<std::int64_t> row;
    const auto words = split_words(line.text);
    for (std::size_t j = 0; j < words.size(); ++j) row.push_back(parse_count(words[j], source, line.number, j + 1));
    if (row.size() != present.size()) {
      parse_error(source, line.number, "expected " + std::to_string(present.size()) +
                                           " prior counts, one per group, got " + std::to_string(row.size()));
    }
    prior = std::move(row);
  }
  return SurveyCounts(std::move(present), std::move(prior));
}

SurveyCounts load_counts(const std::string& path) {
  std::ifstream in = open_file(path);
  return parse_counts_file(in, path);
}

}  // namespace twostage
