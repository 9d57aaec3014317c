#include <sstream>
#include <string>

#include "twostage/model_io.hpp"

namespace twostage {

namespace {

// Breast cancer cross-tabulation (285 patients): groups are age bands, cells
// the three malignancy degrees. Rounded relative frequencies total 1.001.
constexpr const char* kBreastCancer = R"(model example2-breast-cancer
renormalize on
group 30-39 : 0.025 0.060 0.042
group 40-49 : 0.063 0.168 0.084
group 50-59 : 0.088 0.137 0.112
group 60-69 : 0.060 0.084 0.056
group 70-79 : 0.014 0.004 0.004
)";

// Household survey (100006 households): groups are household age bands
// H1..H6, cells the yearly income bands Y1..Y10.
constexpr const char* kHousehold = R"(model example3-household
renormalize on
group H1 : 0.00161 0.00331 0.00974 0.00799 0.00547 0.00494 0.00126 0.00071 0.00011 0.00006
group H2 : 0.00232 0.0081 0.02109 0.03519 0.0376 0.05082 0.02106 0.00961 0.00201 0.00139
group H3 : 0.00512 0.00953 0.02046 0.03229 0.04362 0.09003 0.0543 0.0323 0.01204 0.00697
group H4 : 0.00395 0.00783 0.01499 0.02017 0.02442 0.05772 0.05531 0.04043 0.02184 0.01582
group H5 : 0.00468 0.01145 0.02536 0.0338 0.02675 0.03732 0.01999 0.0108 0.00466 0.00344
group H6 : 0.00066 0.00278 0.00494 0.00708 0.00398 0.00452 0.00234 0.00122 0.00052 0.00022
)";

TwoStageModel from_text(const char* text, const char* name) {
  std::istringstream in(text);
  return to_model(parse_model_file(in, name));
}

TwoStageModel uniform_100x2() {
  std::vector<Group> groups;
  for (int i = 1; i <= 2; ++i) {
    groups.push_back(Group{"col" + std::to_string(i), std::vector<double>(100, 1.0 / 200.0)});
  }
  return TwoStageModel::build(std::move(groups), false, "example1-uniform100x2");
}

}  // namespace

std::optional<TwoStageModel> bundled_model(std::string_view name) {
  if (name == "example1-uniform100x2") return uniform_100x2();
  if (name == "example2-breast-cancer") return from_text(kBreastCancer, "example2-breast-cancer");
  if (name == "example3-household") return from_text(kHousehold, "example3-household");
  return std::nullopt;
}

std::vector<std::string> bundled_model_names() {
  return {"example1-uniform100x2", "example2-breast-cancer", "example3-household"};
}

}  // namespace twostage
