#include <doctest.h>

#include "cha/health/analysis.hpp"
#include "test_support.hpp"

using namespace cha;
using namespace cha::health;
using cha::testing::errc_of;

namespace {

Json rem_rows() {
  return Json::array({{{"date", "2020-08-01"}, {"rem_min", 60}, {"steps", 1000}},
                      {{"date", "2020-08-02"}, {"rem_min", 70}, {"steps", 2000}},
                      {{"date", "2020-08-03"}, {"rem_min", 80}, {"steps", 3000}}});
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("average, sum and trend") {
    const Json avg = analyze_records(rem_rows(), AnalysisMode::Average);
    CHECK(avg.at("fields").at("rem_min") == 70.0);
    CHECK(avg.at("count") == 3);
    CHECK(avg.at("from") == "2020-08-01");
    CHECK(avg.at("to") == "2020-08-03");

    CHECK(analyze_records(rem_rows(), AnalysisMode::Sum).at("fields").at("steps") == 6000.0);

    const Json trend = analyze_records(rem_rows(), AnalysisMode::Trend);
    CHECK(trend.at("fields").at("rem_min").at("slope_per_day").get<double>() == doctest::Approx(10.0));
    CHECK(trend.at("fields").at("rem_min").at("direction") == "increasing");
  }

  TEST_CASE("trend axis follows the dates, not the row order") {
    Json rows = Json::array({{{"date", "2020-08-01"}, {"v", 5}}, {{"date", "2020-08-11"}, {"v", 0}}});
    const Json t = analyze_records(rows, AnalysisMode::Trend);
    CHECK(t.at("fields").at("v").at("slope_per_day").get<double>() == doctest::Approx(-0.5));
    CHECK(t.at("fields").at("v").at("direction") == "decreasing");

    Json epoch = Json::array({{{"date", 1596240000000}, {"v", 1}}, {{"date", 1596326400000}, {"v", 3}}});
    CHECK(analyze_records(epoch, AnalysisMode::Trend).at("fields").at("v").at("slope_per_day").get<double>() ==
          doctest::Approx(2.0));

    Json undated = Json::array({{{"v", 4}}, {{"v", 4}}, {{"v", 4}}});
    CHECK(analyze_records(undated, AnalysisMode::Trend).at("fields").at("v").at("direction") == "flat");
  }

  TEST_CASE("records given as a JSON string") {
    CHECK(analyze_records(Json(rem_rows().dump()), AnalysisMode::Average).at("fields").at("rem_min") == 70.0);
  }

  TEST_CASE("errors") {
    CHECK(parse_analysis_mode("trend") == AnalysisMode::Trend);
    CHECK(errc_of([] { parse_analysis_mode("median"); }) == Errc::UnknownMode);
    CHECK(errc_of([] { analyze_records(Json::array(), AnalysisMode::Average); }) == Errc::EmptyInput);
    CHECK(analyze_records(Json::array(), AnalysisMode::Sum).at("count") == 0);
    CHECK(errc_of([] { analyze_records(Json(42), AnalysisMode::Sum); }) == Errc::InvalidArgument);
    CHECK(errc_of([] { analyze_records(Json("not json"), AnalysisMode::Sum); }) == Errc::InvalidArgument);
    CHECK(errc_of([] { analyze_records(Json::array({1, 2}), AnalysisMode::Sum); }) == Errc::InvalidArgument);
    CHECK(errc_of([] { fit_trend(std::vector<double>{}, std::vector<double>{}); }) == Errc::EmptyInput);
  }

  TEST_CASE("fit_trend recovers a line") {
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
      x.push_back(i);
      y.push_back(3.0 - 0.25 * i);
    }
    const Trend t = fit_trend(x, y);
    CHECK(t.slope_per_day == doctest::Approx(-0.25));
    CHECK(t.direction == "decreasing");
    CHECK(fit_trend(std::vector<double>{1}, std::vector<double>{9}).direction == "flat");
  }
}
