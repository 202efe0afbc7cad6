// Scripted scorer process for client tests.
//   fake_sidecar [mode]
// modes: normal, reverse, hang, crash, badhello, garbage, duplicate, range
// Scores are the lexical baseline so results can be checked against it.

#include <poll.h>
#include <unistd.h>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge/consistency.hpp"

using nlohmann::json;

namespace {

bool input_ready(int ms) {
  pollfd p{STDIN_FILENO, POLLIN, 0};
  return poll(&p, 1, ms) > 0;
}

json answer(const json& req) {
  return {{"id", req["id"]},
          {"score", forge::baseline_score(req.value("code", ""), req.value("docstring", ""))}};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "normal";
  std::ios::sync_with_stdio(false);
  std::string line;
  std::vector<json> held;
  bool greeted = false;
  while (true) {
    // In reverse mode, answer everything held once the client stops writing.
    if (mode == "reverse" && !held.empty() && std::cin.rdbuf()->in_avail() <= 0 &&
        !input_ready(30)) {
      for (auto it = held.rbegin(); it != held.rend(); ++it) std::cout << answer(*it).dump() << '\n';
      std::cout.flush();
      held.clear();
    }
    if (!std::getline(std::cin, line)) break;
    const auto req = json::parse(line, nullptr, false);
    if (req.is_discarded() || !req.is_object()) {
      std::cout << json{{"id", nullptr}, {"error", "malformed request"}}.dump() << std::endl;
      continue;
    }
    if (req.value("op", "") == "hello") {
      if (mode == "badhello") {
        std::cout << json{{"ok", false}, {"proto", 0}}.dump() << std::endl;
      } else {
        std::cout << json{{"ok", true}, {"proto", 1}}.dump() << std::endl;
      }
      greeted = true;
      continue;
    }
    if (!greeted) return 5;
    if (mode == "hang") continue;
    if (mode == "crash") return 3;
    if (mode == "garbage") {
      std::cout << "this is not json" << std::endl;
      continue;
    }
    if (mode == "reverse") {
      held.push_back(req);
      continue;
    }
    auto resp = answer(req);
    if (mode == "range") resp["score"] = 1.5;
    std::cout << resp.dump() << '\n';
    if (mode == "duplicate") std::cout << resp.dump() << '\n';
    std::cout.flush();
  }
  return 0;
}
