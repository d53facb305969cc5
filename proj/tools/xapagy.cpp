// Command-line front end: run stories, an interactive REPL and state dumps.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xapagy/agent.hpp"

using namespace xapagy;

namespace {

constexpr int kOk = 0;
constexpr int kStoryFailure = 1;
constexpr int kConfigFailure = 2;

struct Common {
  std::string domain;
  std::string config;
  std::vector<std::string> sets;
  std::string trace;
  std::optional<long long> seed;
};

void add_common(CLI::App& cmd, Common& c) {
  cmd.add_option("--domain", c.domain, "domain knowledge file")->required();
  cmd.add_option("--config", c.config, "configuration file");
  cmd.add_option("--set", c.sets, "override one configuration key, k=v");
  cmd.add_option("--trace", c.trace, "write the trace here instead of standard output");
  cmd.add_option("--seed", c.seed, "seed of the agent's random choices");
}

Config make_config(const Common& c) {
  Config config;
  if (!c.config.empty()) config.load(c.config);
  for (const auto& s : c.sets) config.set_assignment(s);
  if (c.seed) config.set("seed", static_cast<double>(*c.seed));
  return config;
}

std::optional<Purpose> purpose_named(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
  std::replace(name.begin(), name.end(), '-', '_');
  for (Purpose p : kPurposes) {
    std::string s(to_string(p));
    std::replace(s.begin(), s.end(), '-', '_');
    if (s == name) return p;
  }
  return std::nullopt;
}

std::string dump(const Agent& a, const std::string& what, const std::string& arg) {
  if (what == "focus") return a.dump_focus();
  if (what == "memory") return a.dump_memory();
  if (what == "shadows") return a.dump_shadows(arg.empty() ? std::nullopt : std::optional<std::string>(arg));
  if (what == "hls") {
    auto p = purpose_named(arg.empty() ? "continuation" : arg);
    if (!p) throw ConfigError("unknown purpose " + arg);
    return a.dump_hls(*p);
  }
  throw ConfigError("unknown dump target " + what + " (focus, shadows, hls, memory)");
}

// Trace destination shared by run and repl.
class TraceOut {
 public:
  explicit TraceOut(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw ConfigError("cannot write trace file " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void attach(Agent& a) {
    a.set_trace([this](const std::string& line) { stream() << line << '\n'; });
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int run(const Common& c, const std::string& story) {
  std::optional<Agent> agent;
  try {
    agent.emplace(Domain::load(c.domain), make_config(c));
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigFailure;
  }
  try {
    TraceOut out(c.trace);
    out.attach(*agent);
    agent->trace_config();
    agent->run_file(story);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const Error& e) {
    std::cerr << "story error: " << e.what() << "\n";
    return kStoryFailure;
  }
  return kOk;
}

void repl_help() {
  std::cout << "statements run one tick each; meta-commands:\n"
               "  :dump focus|shadows [head]|hls [purpose]|memory\n"
               "  :mood <preset|key=value>\n"
               "  :recall [n]\n"
               "  :tick [n]\n"
               "  :save <file>  :load <file>\n"
               "  :quit\n";
}

int repl(const Common& c) {
  std::optional<Agent> agent;
  std::optional<TraceOut> out;
  try {
    agent.emplace(Domain::load(c.domain), make_config(c));
    out.emplace(c.trace.empty() ? std::string("/dev/null") : c.trace);
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigFailure;
  }
  out->attach(*agent);
  agent->trace_config();
  auto echo = [&](const std::vector<ViId>& vis) {
    for (ViId v : vis) std::cout << "  " << agent->render(v) << "\n";
  };
  std::string line;
  while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
    std::istringstream words(line);
    std::string cmd;
    words >> cmd;
    try {
      if (cmd.empty() || cmd[0] != ':') {
        auto r = agent->execute(line);
        echo(r.internal);
        continue;
      }
      std::string arg, arg2;
      words >> arg >> arg2;
      auto count = [&](int fallback) { return arg.empty() ? fallback : std::stoi(arg); };
      if (cmd == ":quit" || cmd == ":q") break;
      if (cmd == ":help") {
        repl_help();
      } else if (cmd == ":dump") {
        std::cout << dump(*agent, arg, arg2);
      } else if (cmd == ":mood") {
        auto eq = arg.find('=');
        if (eq == std::string::npos) {
          agent->set_mood(arg);
        } else {
          std::string key = arg.substr(0, eq);
          agent->set_mood_value(key.rfind("mood.", 0) == 0 ? key : "mood." + key, arg.substr(eq + 1));
        }
        std::cout << "mood " << agent->mood().preset << "\n";
      } else if (cmd == ":recall") {
        echo(agent->recall(count(1)));
      } else if (cmd == ":tick") {
        echo(agent->idle(count(1)));
        std::cout << "tick " << agent->tick() << "\n";
      } else if (cmd == ":save") {
        agent->save(arg);
      } else if (cmd == ":load") {
        agent.emplace(Agent::load(arg));
        out->attach(*agent);
      } else {
        std::cout << "unknown command " << cmd << "; :help lists them\n";
      }
    } catch (const std::exception& e) {
      std::cout << "error: " << e.what() << "\n";
    }
  }
  return kOk;
}

int dump_snapshot(const std::string& snapshot, const std::string& what, const std::string& purpose) {
  try {
    Agent a = Agent::load(snapshot);
    std::cout << dump(a, what, purpose);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Narrative reasoning agent"};
  app.require_subcommand(1);

  Common run_opts, repl_opts;
  std::string story;
  auto* run_cmd = app.add_subcommand("run", "run a story file and print the trace");
  run_cmd->add_option("story", story, "Xapi story file")->required();
  add_common(*run_cmd, run_opts);

  auto* repl_cmd = app.add_subcommand("repl", "interactive session");
  add_common(*repl_cmd, repl_opts);

  std::string snapshot, what, purpose;
  auto* dump_cmd = app.add_subcommand("dump", "print part of a saved snapshot");
  dump_cmd->add_option("snapshot", snapshot, "snapshot file")->required();
  dump_cmd->add_option("what", what, "focus, shadows, hls or memory")
      ->required()
      ->check(CLI::IsMember({"focus", "shadows", "hls", "memory"}));
  dump_cmd->add_option("--purpose", purpose, "HLS purpose (default continuation)");
  dump_cmd->add_option("--head", purpose, "shadow head id");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfigFailure;
  }
  if (*run_cmd) return run(run_opts, story);
  if (*repl_cmd) return repl(repl_opts);
  return dump_snapshot(snapshot, what, purpose);
}
