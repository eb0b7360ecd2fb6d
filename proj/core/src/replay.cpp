#include "cha/replay.hpp"

#include <algorithm>
#include <fstream>

#include "cha/engine.hpp"
#include "cha/error.hpp"

namespace cha {

namespace {

std::string clip(std::string_view s, std::size_t n = 160) {
  return s.size() <= n ? std::string(s) : std::string(s.substr(0, n)) + "...";
}

// "line N: expected `a` got `b`" for the first differing line.
std::string line_diff(const std::string& expected, const std::string& actual, const char* unit) {
  const auto e = split_lines(expected);
  const auto a = split_lines(actual);
  const std::size_t n = std::max(e.size(), a.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::string ev = i < e.size() ? e[i] : "<missing>";
    const std::string av = i < a.size() ? a[i] : "<missing>";
    if (ev != av) {
      return std::string(unit) + " " + std::to_string(i + 1) + ": expected `" + clip(ev) + "` got `" + clip(av) + "`";
    }
  }
  return "texts differ in trailing whitespace";
}

}  // namespace

Json to_json(const Transcript& t) {
  Json turns = Json::array();
  for (const auto& turn : t.turns) {
    Json events = Json::array();
    for (const auto& e : turn.events) {
      Json ev{{"kind", e.kind}, {"text", e.text}};
      if (!e.stage.empty()) ev["stage"] = e.stage;
      events.push_back(std::move(ev));
    }
    Json j{{"query", turn.query}, {"events", std::move(events)}};
    if (turn.language) j["language"] = *turn.language;
    turns.push_back(std::move(j));
  }
  return Json{{"turns", std::move(turns)}};
}

Transcript transcript_from_json(const Json& j) {
  Transcript t;
  try {
    for (const auto& turn : j.at("turns")) {
      ReplayTurn rt;
      rt.query = turn.at("query").get<std::string>();
      if (turn.contains("language")) rt.language = turn.at("language").get<std::string>();
      for (const auto& e : turn.value("events", Json::array())) {
        rt.events.push_back({e.at("kind").get<std::string>(), e.value("stage", std::string{}),
                             e.at("text").get<std::string>()});
      }
      t.turns.push_back(std::move(rt));
    }
  } catch (const Json::exception& e) {
    throw Error(Errc::FixtureError, std::string("malformed transcript: ") + e.what());
  }
  return t;
}

Transcript load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::FixtureError, "cannot open transcript " + path.string());
  const Json doc = Json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error(Errc::FixtureError, path.string() + " is not valid JSON");
  return transcript_from_json(doc);
}

void save_transcript(const Transcript& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  out << to_json(t).dump(2) << "\n";
  if (!out) throw Error(Errc::FixtureError, "cannot write transcript " + path.string());
}

std::vector<ReplayEvent> events_of(const TurnTrace& trace) {
  std::vector<ReplayEvent> events;
  for (const auto& it : trace.iterations) {
    for (const auto& ex : it.exchanges) events.push_back({"prompt", ex.stage, ex.prompt});
    if (!it.plan_canonical.empty()) events.push_back({"plan", "", it.plan_canonical});
  }
  if (!trace.thinker_prompt.empty()) events.push_back({"prompt", "thinker", trace.thinker_prompt});
  events.push_back({"answer", "", trace.answer});
  return events;
}

std::string ReplayReport::summary() const {
  if (passed) return "PASS (" + std::to_string(turns_run) + " turns)";
  return "FAIL at turn " + std::to_string(turn + 1) + ", event " + std::to_string(event + 1) + " (" + kind +
         "): " + detail;
}

ReplayReport replay(const std::filesystem::path& fixture, const Transcript& golden, EngineConfig base) {
  if (!std::filesystem::exists(fixture)) throw Error(Errc::FixtureError, "missing fixture " + fixture.string());
  base.planner_backend = BackendConfig{"scripted", fixture, {}};
  base.responder_backend.reset();
  base.persistence_dir.clear();
  Engine engine(std::move(base));
  const std::string session = engine.create_session();

  ReplayReport report;
  for (std::size_t t = 0; t < golden.turns.size(); ++t) {
    const ReplayTurn& want = golden.turns[t];
    ReplayTurn got{want.query, want.language, {}};
    try {
      got.events = events_of(engine.respond(session, want.query, {}, want.language).trace);
    } catch (const Error& e) {
      got.events.push_back({"error", "", std::string(to_string(e.code())) + ": " + e.what()});
    }
    report.actual.turns.push_back(got);
    ++report.turns_run;
    if (!report.passed) continue;

    const std::size_t n = std::max(want.events.size(), got.events.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (i < want.events.size() && i < got.events.size() && want.events[i] == got.events[i]) continue;
      report.passed = false;
      report.turn = t;
      report.event = i;
      if (i >= got.events.size()) {
        report.kind = want.events[i].kind;
        report.detail = "run ended early; expected a " + want.events[i].kind + " event";
      } else if (i >= want.events.size()) {
        report.kind = got.events[i].kind;
        report.detail = "unexpected extra " + got.events[i].kind + " event: " + clip(got.events[i].text);
      } else if (want.events[i].kind != got.events[i].kind || want.events[i].stage != got.events[i].stage) {
        report.kind = got.events[i].kind;
        report.detail = "expected " + want.events[i].kind + "/" + want.events[i].stage + ", got " +
                        got.events[i].kind + "/" + got.events[i].stage + ": " + clip(got.events[i].text);
      } else {
        report.kind = got.events[i].kind;
        const char* unit = got.events[i].kind == "plan" ? "plan differs at step" : "line";
        report.detail = (got.events[i].stage.empty() ? "" : got.events[i].stage + " ") +
                        line_diff(want.events[i].text, got.events[i].text, unit);
      }
      break;
    }
  }
  return report;
}

ReplayReport replay(const std::filesystem::path& fixture, const std::filesystem::path& golden, EngineConfig base) {
  return replay(fixture, load_transcript(golden), std::move(base));
}

}  // namespace cha
