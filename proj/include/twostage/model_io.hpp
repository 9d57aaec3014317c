#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twostage/model.hpp"

namespace twostage {

/// Parsed model file, before validation.
///
///   # comment
///   model <name>
///   renormalize <on|off>
///   group <label> : <p1> <p2> ... <pJ>
///   ...
struct ModelFile {
  std::string name;
  bool renormalize = false;
  std::vector<Group> groups;
};

ModelFile parse_model_file(std::istream& in, std::string_view source = "<input>");
TwoStageModel to_model(ModelFile file);

/// Writes `model` in the model file grammar with round-trip precision. The
/// output declares `renormalize off` and reloads to an identical model.
std::string format_model(const TwoStageModel& model);

/// Resolves a bundled model name, or else reads the file at `name_or_path`.
TwoStageModel load_model(const std::string& name_or_path);

/// Counts file:
///
///   present
///   <x_11> ... <x_1J1>
///   ...
///   prior            (optional)
///   <x*_1> ... <x*_I>
SurveyCounts parse_counts_file(std::istream& in, std::string_view source = "<input>");
SurveyCounts load_counts(const std::string& path);

/// Models shipped with the tool: the 100x2 uniform table and the breast
/// cancer and household tables, the latter two renormalized.
std::optional<TwoStageModel> bundled_model(std::string_view name);
std::vector<std::string> bundled_model_names();

}  // namespace twostage
