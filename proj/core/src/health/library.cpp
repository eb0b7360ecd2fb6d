#include "cha/health/library.hpp"

#include <algorithm>

#include "cha/error.hpp"
#include "cha/health/analysis.hpp"
#include "cha/health/hrv.hpp"

namespace cha::health {

namespace {

const std::string kPatientInput =
    "user ID in string. It can be referred to as user, patient, individual, etc. Start with 'par_' "
    "followed by a number (e.g., 'par_1').";

std::vector<std::string> date_inputs(const std::string& what) {
  return {kPatientInput,
          "start date of the " + what + " data in a string with the following format: `%Y-%m-%d.`",
          "end date of the " + what +
              " data in a string with the following format: `%Y-%m-%d.` If there is no end date, the "
              "value should be an empty string (i.e., '')"};
}

const std::string& text_arg(std::span<const Json> args, std::size_t i, std::string_view what) {
  if (i >= args.size() || !args[i].is_string()) {
    throw Error(Errc::InvalidArgument, "argument " + std::to_string(i + 1) + " must be " + std::string(what));
  }
  return args[i].get_ref<const std::string&>();
}

void need(bool present, std::string_view task, std::string_view what) {
  if (!present) throw Error(Errc::ConfigError, std::string(task) + " needs " + std::string(what));
}

template <typename Rows>
Json rows_json(const Rows& rows) {
  Json out = Json::array();
  for (const auto& r : rows) out.push_back(to_json(r));
  return out;
}

std::vector<PpgSample> ppg_series(const Json& payload) {
  if (!payload.is_array()) {
    throw Error(Errc::InvalidArgument, "expected PPG data (a list of samples or its data pipe reference)");
  }
  std::vector<PpgSample> samples;
  samples.reserve(payload.size());
  try {
    for (const auto& s : payload) samples.push_back(ppg_sample_from_json(s));
  } catch (const Json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed PPG sample: ") + e.what());
  }
  return samples;
}

}  // namespace

TaskSpec google_search_spec() {
  return {"google_search",
          "GoogleSearch",
          "Uses google to search the internet for the requested query and returns the url of the top website.",
          {},
          {"It should be a search query."},
          {"It returns a json object containing key: **url**. For example: {'url': 'http://google.com'}"},
          false};
}

TaskSpec extract_text_spec() {
  return {"extract_text",
          "ExtractText",
          "Extract all the text on the current webpage",
          {},
          {"url to extract the text from. It requires links which is gathered from other tools. Never provide "
           "urls on your own."},
          {"An string containing the text of the scraped webpage."},
          false};
}

TaskSpec affect_sleep_get_spec() {
  return {"affect_sleep_get",
          "AffectSleepGet",
          "Returns the sleep data for a specific patient over a date or a period (if two dates are provided).",
          {},
          date_inputs("sleep"),
          {"returns an array of JSON objects which contains the following keys:\n\n"
           "**date**: the night in `%Y-%m-%d` format\n\n"
           "**total_sleep_min**: total minutes asleep\n\n"
           "**rem_min**, **deep_min**, **light_min**: minutes spent in each sleep stage\n\n"
           "**efficiency**: fraction of time in bed spent asleep, between 0 and 1"},
          false};
}

TaskSpec affect_activity_get_spec() {
  return {"affect_activity_get",
          "AffectActivityGet",
          "Returns the physical activity data for a specific patient over a date or a period (if two dates "
          "are provided).",
          {},
          date_inputs("activity"),
          {"returns an array of JSON objects which contains the following keys:\n\n"
           "**date**: the day in `%Y-%m-%d` format\n\n"
           "**steps**: step count of the day\n\n"
           "**active_min**: minutes of moderate or vigorous activity"},
          false};
}

TaskSpec affect_analysis_spec() {
  return {"affect_analysis",
          "AffectAnalysis",
          "Computes the average, the total or the trend of every numeric field of sleep or activity records.",
          {"affect_sleep_get", "affect_activity_get"},
          {"the records returned by affect_sleep_get or affect_activity_get.",
           "the analysis to perform: 'average', 'sum' or 'trend'."},
          {"returns a JSON object with keys **mode**, **count** and **fields**. For 'average' and 'sum' each "
           "field maps to a number. For 'trend' each field maps to {'slope_per_day': number, 'direction': "
           "'increasing' | 'decreasing' | 'flat'}."},
          false};
}

TaskSpec affect_ppg_get_spec() {
  return {"affect_ppg_get",
          "AffectPPGGet",
          "Returns the ppg data for a specific patient over a date or a period (if two dates are provided). "
          "This will return the detailed raw data and store it in the Data Pipe.",
          {},
          date_inputs("sleep"),
          {"returns an array of JSON objects which contains the following keys:\n\n"
           "**date (in milliseconds)**: epoch format\n\n"
           "**ppg**: is the ppg value.\n\n"
           "**hr (in beats per minute)**: is the heart rate of the patient."},
          true};
}

TaskSpec affect_ppg_analysis_spec() {
  return {"affect_ppg_analysis",
          "AffectPPGAnalysis",
          "Processes the ppg data of a patient and extracts heart rate variability (HRV) parameters. The "
          "result is stored in the Data Pipe.",
          {"affect_ppg_get"},
          {"the ppg data returned by affect_ppg_get (a Data Pipe key)."},
          {"returns a JSON object with the HRV parameters **mean_nn**, **sdnn**, **rmssd** (milliseconds), "
           "**pnn50** (fraction), **mean_hr** (beats per minute), **lf**, **hf** and **lf_hf**."},
          true};
}

TaskSpec affect_stress_analysis_spec() {
  return {"affect_stress_analysis",
          "AffectStressAnalysis",
          "Estimates the stress level of a patient from HRV parameters on a scale from 0 (very low) to 4 "
          "(very high).",
          {"affect_ppg_analysis"},
          {"the HRV parameters returned by affect_ppg_analysis (a Data Pipe key)."},
          {"returns a JSON object with keys **level** (0 to 4), **label**, **score** and **rationale** naming "
           "the feature that drove the estimate."},
          false};
}

std::vector<TaskSpec> health_task_specs() {
  return {google_search_spec(),   extract_text_spec(),    affect_sleep_get_spec(),
          affect_activity_get_spec(), affect_analysis_spec(), affect_ppg_get_spec(),
          affect_ppg_analysis_spec(), affect_stress_analysis_spec()};
}

std::map<std::string, TaskBody, std::less<>> health_task_bodies(const HealthLibrary& lib) {
  std::map<std::string, TaskBody, std::less<>> bodies;
  const auto dataset = lib.dataset;
  const auto search = lib.search;
  const auto fetcher = lib.fetcher;
  const auto budget = lib.text_budget;
  const auto model = lib.stress;

  bodies["google_search"] = [search](std::span<const Json> args) {
    need(search != nullptr, "google_search", "a search client");
    const auto& query = text_arg(args, 0, "a search query");
    return TaskOutput{Json{{"url", search->top_url(query)}}, {}};
  };
  bodies["extract_text"] = [fetcher, budget](std::span<const Json> args) {
    need(fetcher != nullptr, "extract_text", "a page fetcher");
    const auto& url = text_arg(args, 0, "a url");
    const FetchedPage page = fetcher->fetch(url);
    return TaskOutput{Json(html_to_text(page.body, page.content_type, budget)), {}};
  };
  bodies["affect_sleep_get"] = [dataset](std::span<const Json> args) {
    need(dataset != nullptr, "affect_sleep_get", "a health dataset");
    const auto range = parse_range(text_arg(args, 1, "a start date"), text_arg(args, 2, "an end date"));
    return TaskOutput{rows_json(dataset->sleep(text_arg(args, 0, "a patient id"), range)), {}};
  };
  bodies["affect_activity_get"] = [dataset](std::span<const Json> args) {
    need(dataset != nullptr, "affect_activity_get", "a health dataset");
    const auto range = parse_range(text_arg(args, 1, "a start date"), text_arg(args, 2, "an end date"));
    return TaskOutput{rows_json(dataset->activity(text_arg(args, 0, "a patient id"), range)), {}};
  };
  bodies["affect_analysis"] = [](std::span<const Json> args) {
    if (args.size() != 2) throw Error(Errc::InvalidArgument, "affect_analysis takes records and a mode");
    const AnalysisMode mode = parse_analysis_mode(text_arg(args, 1, "an analysis mode"));
    return TaskOutput{analyze_records(args[0], mode), {}};
  };
  bodies["affect_ppg_get"] = [dataset](std::span<const Json> args) {
    need(dataset != nullptr, "affect_ppg_get", "a health dataset");
    const auto& patient = text_arg(args, 0, "a patient id");
    const auto range = parse_range(text_arg(args, 1, "a start date"), text_arg(args, 2, "an end date"));
    const auto samples = dataset->ppg(patient, range);
    if (samples.empty()) throw Error(Errc::EmptyInput, "no ppg data for " + patient + " in that period");
    return TaskOutput{rows_json(samples), {}};
  };
  bodies["affect_ppg_analysis"] = [](std::span<const Json> args) {
    if (args.empty()) throw Error(Errc::InvalidArgument, "affect_ppg_analysis needs ppg data");
    const auto samples = ppg_series(args[0]);
    return TaskOutput{to_json(analyze_ppg(samples)), {}};
  };
  bodies["affect_stress_analysis"] = [model](std::span<const Json> args) {
    if (args.empty()) throw Error(Errc::InvalidArgument, "affect_stress_analysis needs HRV parameters");
    return TaskOutput{to_json(classify_stress(hrv_features_from_json(args[0]), model)), {}};
  };
  return bodies;
}

void register_health_tasks(TaskRegistry& registry, const HealthLibrary& lib, std::span<const std::string> names) {
  const auto bodies = health_task_bodies(lib);
  for (auto& spec : health_task_specs()) {
    if (!names.empty() && std::find(names.begin(), names.end(), spec.name) == names.end()) continue;
    const bool data_task = spec.name.rfind("affect_", 0) == 0 && spec.name != "affect_analysis" &&
                           spec.name != "affect_ppg_analysis" && spec.name != "affect_stress_analysis";
    if (data_task) need(lib.dataset != nullptr, spec.name, "a health dataset");
    if (spec.name == "google_search") need(lib.search != nullptr, spec.name, "a search client");
    if (spec.name == "extract_text") need(lib.fetcher != nullptr, spec.name, "a page fetcher");
    const std::string name = spec.name;
    registry.register_task(std::move(spec), bodies.at(name));
  }
  for (const auto& n : names) {
    if (!registry.contains(n)) throw Error(Errc::UnknownTask, "no built-in task named '" + n + "'");
  }
}

}  // namespace cha::health
