#include <doctest.h>

#include <sstream>

#include "twostage/error.hpp"
#include "twostage/model_io.hpp"

using namespace twostage;

namespace {

std::string error_text(const std::string& text) {
  std::istringstream in(text);
  try {
    to_model(parse_model_file(in, "m.txt"));
  } catch (const Error& e) {
    return e.what();
  }
  return "no error";
}

std::string counts_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_counts_file(in, "c.txt");
  } catch (const Error& e) {
    return e.what();
  }
  return "no error";
}

}  // namespace

TEST_CASE("parse a model file with comments") {
  std::istringstream in(
      "# a small table\n"
      "model tiny\n"
      "\n"
      "renormalize on   # rounded input\n"
      "group a : 0.2 0.2\n"
      "group b : 0.3 0.4\n");
  const ModelFile file = parse_model_file(in);
  CHECK(file.name == "tiny");
  CHECK(file.renormalize);
  REQUIRE(file.groups.size() == 2);
  CHECK(file.groups[1].label == "b");
  CHECK(file.groups[1].cells == std::vector<double>{0.3, 0.4});
  const TwoStageModel model = to_model(file);
  CHECK(model.cell(1, 1) == doctest::Approx(0.4 / 1.1).epsilon(1e-15));
}

TEST_CASE("model file errors carry line numbers") {
  CHECK(error_text("") == "ParseError: m.txt:1: empty model file");
  CHECK(error_text("modle x\nrenormalize on\n") == "ParseError: m.txt:1: expected 'model <name>'");
  CHECK(error_text("model x\n\nrenormalize maybe\n") == "ParseError: m.txt:3: expected 'renormalize <on|off>'");
  CHECK(error_text("model x\nrenormalize on\ngroup a : 0.5 abc\n") ==
        "ParseError: m.txt:3: field 2: 'abc' is not a decimal number");
  CHECK(error_text("model x\nrenormalize on\ngroup a 0.5\n") ==
        "ParseError: m.txt:3: expected 'group <label> : <cells>'");
  CHECK(error_text("model x\nrenormalize on\ngroup a :\n") == "ParseError: m.txt:3: group 'a' has no cells");
  const std::string negative = error_text("model x\nrenormalize on\ngroup a : 0.5 -0.1\ngroup b : 0.6\n");
  CHECK(negative.rfind("NonPositiveCell", 0) == 0);
  const std::string unnormalized = error_text("model x\nrenormalize off\ngroup a : 0.5\ngroup b : 0.6\n");
  CHECK(unnormalized.rfind("NotNormalized", 0) == 0);
}

TEST_CASE("formatted models reload unchanged") {
  for (const std::string& name : bundled_model_names()) {
    const TwoStageModel model = *bundled_model(name);
    std::istringstream in(format_model(model));
    const TwoStageModel again = to_model(parse_model_file(in));
    CHECK(again.name() == model.name());
    CHECK(again.layout() == model.layout());
    for (std::size_t i = 0; i < model.group_count(); ++i) CHECK(again.label(i) == model.label(i));
    const std::vector<double> a(model.cells().begin(), model.cells().end());
    const std::vector<double> b(again.cells().begin(), again.cells().end());
    CHECK(a == b);
  }
}

TEST_CASE("bundled models") {
  CHECK(bundled_model_names().size() == 3);
  CHECK_FALSE(bundled_model("no-such-model").has_value());

  const TwoStageModel uniform = *bundled_model("example1-uniform100x2");
  CHECK(uniform.layout().group_sizes() == std::vector<std::size_t>{100, 100});
  for (double v : uniform.cells()) CHECK(v == 0.005);

  const TwoStageModel cancer = *bundled_model("example2-breast-cancer");
  CHECK(cancer.layout().group_sizes() == std::vector<std::size_t>(5, 3));
  CHECK(cancer.label(0) == "30-39");
  CHECK(cancer.cell(1, 1) == doctest::Approx(0.168 / 1.001).epsilon(1e-14));

  const TwoStageModel household = *bundled_model("example3-household");
  CHECK(household.layout().group_sizes() == std::vector<std::size_t>(6, 10));
  CHECK(household.label(5) == "H6");
  double total = 0.0;
  for (double v : household.cells()) total += v;
  CHECK(std::abs(total - 1.0) < 1e-12);

  CHECK(load_model("example2-breast-cancer").layout() == cancer.layout());
  CHECK_THROWS_AS(load_model("/nonexistent/model.txt"), Error);
}

TEST_CASE("counts files") {
  std::istringstream in(
      "present\n"
      "2 2   # group one\n"
      "3 3\n"
      "prior\n"
      "8 2\n");
  const SurveyCounts counts = parse_counts_file(in);
  CHECK(counts.n() == 10);
  CHECK(counts.n_star() == 10);
  CHECK(counts.group_total(1) == 6);

  std::istringstream no_prior("present\n1 2 3\n4\n");
  const SurveyCounts present_only = parse_counts_file(no_prior);
  CHECK_FALSE(present_only.has_prior());
  CHECK(present_only.layout().group_sizes() == std::vector<std::size_t>{3, 1});

  CHECK(counts_error("2 2\n") == "ParseError: c.txt:1: expected 'present'");
  CHECK(counts_error("present\n2 x\n") == "ParseError: c.txt:2: field 2: 'x' is not an integer");
  CHECK(counts_error("present\n2 -1\n") == "ParseError: c.txt:2: field 2: counts must be nonnegative");
  CHECK(counts_error("present\n1\n1\nprior\n") ==
        "ParseError: c.txt:4: 'prior' must be followed by one line of counts");
  CHECK(counts_error("present\n1\n1\nprior\n1 2 3\n") ==
        "ParseError: c.txt:5: expected 2 prior counts, one per group, got 3");
  CHECK(counts_error("present\n1\n1\nprior\n1 2\n7\n") == "ParseError: c.txt:6: unexpected content after prior counts");
}
