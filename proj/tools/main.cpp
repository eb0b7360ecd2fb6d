#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "cha/config.hpp"
#include "cha/engine.hpp"
#include "cha/error.hpp"
#include "cha/health/hrv.hpp"
#include "cha/replay.hpp"
#include "cha/service.hpp"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

std::filesystem::path default_config() {
  if (const char* env = std::getenv("CHA_CONFIG"); env && *env) return env;
  return CHA_DEFAULT_CONFIG;
}

int serve(const std::filesystem::path& config_path, std::optional<int> port, std::optional<std::string> host) {
  cha::EngineConfig config = cha::load_engine_config(config_path);
  if (port) config.port = *port;
  if (host) config.host = *host;
  cha::Engine engine(config);
  cha::Service service(engine, config.host, config.port, config.auth_token);
  const int bound = service.bind();
  std::cout << "listening on http://" << config.host << ":" << bound << std::endl;

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::thread watcher([&] {
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    service.stop();
  });
  service.run();
  g_stop = true;
  watcher.join();
  std::cout << "stopped" << std::endl;
  return 0;
}

int chat(const std::filesystem::path& config_path, const std::string& language) {
  cha::Engine engine(cha::load_engine_config(config_path));
  const std::string session = engine.create_session();
  std::cout << "session " << session << "  (/trace shows the last turn, /quit exits)\n";
  std::string line;
  std::optional<cha::TurnTrace> last;
  while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
    if (line == "/quit" || line == "/exit") break;
    if (line == "/trace") {
      std::cout << (last ? cha::to_json(*last).dump(2) : "no turn yet") << "\n";
      continue;
    }
    if (cha::trim(line).empty()) continue;
    try {
      auto r = engine.respond(session, line, {}, language.empty() ? std::nullopt : std::optional(language));
      std::cout << r.answer << "\n";
      if (!r.trace.tasks_used.empty()) std::cout << "  [tasks: " << cha::join(r.trace.tasks_used, ", ") << "]\n";
      last = std::move(r.trace);
    } catch (const cha::Error& e) {
      std::cout << "error: " << cha::to_string(e.code()) << ": " << e.what() << "\n";
    }
  }
  return 0;
}

int replay(const std::filesystem::path& fixture, const std::filesystem::path& golden,
           const std::filesystem::path& config_path, bool update) {
  cha::EngineConfig base = cha::load_engine_config(config_path);
  const cha::Transcript want = cha::load_transcript(golden);
  const cha::ReplayReport report = cha::replay(fixture, want, base);
  if (update) {
    cha::save_transcript(report.actual, golden);
    std::cout << "updated " << golden.string() << "\n";
    return 0;
  }
  std::cout << report.summary() << "\n";
  return report.passed ? 0 : 1;
}

int tasks_list(const std::filesystem::path& config_path, bool json) {
  cha::Engine engine(cha::load_engine_config(config_path));
  if (json) {
    cha::Json out = cha::Json::array();
    for (const auto& t : engine.registry()) out.push_back(cha::to_json(t.spec));
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  for (const auto& t : engine.registry()) {
    std::cout << t.spec.name << (t.spec.output_type ? "  [data pipe]" : "") << "\n    " << t.spec.description
              << "\n";
  }
  return 0;
}

// Per-patient HRV features over the fixture corpus, plus the pooled
// mean/std that seed the stress classifier's normalization.
int hrv_survey(const std::filesystem::path& data_dir) {
  cha::health::HealthDataset dataset(data_dir);
  const auto range = cha::health::parse_range("2020-01-01", "2020-12-31");
  std::vector<std::array<double, 3>> rows;
  for (const auto& entry : std::filesystem::directory_iterator(data_dir)) {
    if (!entry.is_directory()) continue;
    const std::string patient = entry.path().filename().string();
    const auto samples = dataset.ppg(patient, range);
    // One feature vector per recording day.
    std::map<std::int64_t, std::vector<cha::health::PpgSample>> by_day;
    for (const auto& s : samples) by_day[s.date_ms / 86'400'000].push_back(s);
    for (const auto& [day, day_samples] : by_day) {
      const auto f = cha::health::analyze_ppg(day_samples);
      rows.push_back({f.rmssd, f.sdnn, f.lf_hf});
      std::cout << patient << " day " << day << " rmssd=" << f.rmssd << " sdnn=" << f.sdnn << " lf_hf=" << f.lf_hf
                << " mean_hr=" << f.mean_hr << "\n";
    }
  }
  const char* names[] = {"rmssd", "sdnn", "lf_hf"};
  for (std::size_t k = 0; k < 3; ++k) {
    double mean = 0, var = 0;
    for (const auto& r : rows) mean += r[k];
    mean /= static_cast<double>(rows.size());
    for (const auto& r : rows) var += (r[k] - mean) * (r[k] - mean);
    var /= static_cast<double>(rows.size());
    std::cout << names[k] << " mean=" << mean << " std=" << std::sqrt(var) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conversational health agent engine"};
  app.require_subcommand(1);

  std::filesystem::path config = default_config();
  std::optional<int> port;
  std::optional<std::string> host;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  serve_cmd->add_option("--config", config, "Engine config file (JSON)");
  serve_cmd->add_option("--port", port, "Override the configured port (0 = ephemeral)");
  serve_cmd->add_option("--host", host, "Override the configured host");

  std::string language;
  auto* chat_cmd = app.add_subcommand("chat", "Terminal chat against the engine");
  chat_cmd->add_option("--config", config, "Engine config file (JSON)");
  chat_cmd->add_option("--language", language, "Force the user language (two-letter code)");

  std::filesystem::path fixture, golden;
  bool update = false;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a scripted fixture against a golden transcript");
  replay_cmd->add_option("--fixture", fixture, "Scripted LLM fixture")->required();
  replay_cmd->add_option("--golden", golden, "Golden transcript")->required();
  replay_cmd->add_option("--config", config, "Engine config providing tasks and data");
  replay_cmd->add_flag("--update", update, "Rewrite the golden transcript from this run");

  bool json = false;
  auto* tasks_cmd = app.add_subcommand("tasks", "Inspect the task registry");
  tasks_cmd->require_subcommand(1);
  auto* list_cmd = tasks_cmd->add_subcommand("list", "List registered tasks");
  list_cmd->add_option("--config", config, "Engine config file (JSON)");
  list_cmd->add_flag("--json", json, "Print task specs as JSON");

  std::filesystem::path data_dir;
  auto* survey_cmd = app.add_subcommand("hrv-survey", "Print HRV features of every fixture recording");
  survey_cmd->add_option("--data", data_dir, "Health data directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return serve(config, port, host);
    if (*chat_cmd) return chat(config, language);
    if (*replay_cmd) return replay(fixture, golden, config, update);
    if (*list_cmd) return tasks_list(config, json);
    if (*survey_cmd) return hrv_survey(data_dir);
  } catch (const cha::Error& e) {
    std::cerr << cha::to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}
