#pragma once

// Shared fixtures: small domains, random generators and independent
// re-computations used as oracles.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "xapagy/agent.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return XAPAGY_DATA_DIR; }

inline xapagy::Domain lrrh_domain() { return xapagy::Domain::load(data_dir() / "lrrh.xapd"); }

// Tiny domain with unit areas and no overlaps unless stated.
inline constexpr const char* kTinyDomain = R"(
concept girl
concept wolf
concept young
concept female
concept human
concept alive
concept dead
concept big
concept eye
impact dead alive -1.0
overlap girl female 0.5
verb hits side_effect=action
verb bites side_effect=action
verb cries side_effect=action
verb strikes side_effect=action
overlap hits strikes 0.9
verb is-a side_effect=is_a
verb changes side_effect=changes
verb says side_effect=quote
verb owns side_effect=relation:ownership
verb loves side_effect=relation:love
verb hates side_effect=relation:hate
verb is-identical side_effect=relation:identity
verb view side_effect=scene_relation
verb in-summary side_effect=in_summary
verb are-fighting side_effect=action
conflict loves hates
word lady = female human
)";

inline xapagy::Domain tiny_domain() { return xapagy::Domain::parse(kTinyDomain); }

/// Independent evaluation of the match formula straight from its definition.
template <class Tag>
double match_oracle(const xapagy::SymbolTable& t, const xapagy::Overlay<Tag>& a, const xapagy::Overlay<Tag>& b) {
  long double num = 0, ma = 0, mb = 0;
  for (const auto& [x, ex] : a.energies()) ma += ex;
  for (const auto& [y, ey] : b.energies()) mb += ey;
  if (ma == 0 || mb == 0) return 0.0;
  for (const auto& [x, ex] : a.energies()) {
    for (const auto& [y, ey] : b.energies()) {
      long double o = (x == y) ? t.area(x) : t.overlap(x, y);
      num += ex * ey * o / std::sqrt(static_cast<long double>(t.area(x)) * t.area(y));
    }
  }
  long double r = num / std::sqrt(ma * mb);
  return static_cast<double>(r > 1 ? 1 : r);
}

/// Random overlay over the first `n` symbols of a table.
template <class Tag>
xapagy::Overlay<Tag> random_overlay(std::mt19937_64& rng, std::size_t n, std::size_t max_members = 4) {
  xapagy::Overlay<Tag> o;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> energy(0.01, 1.0);
  std::size_t k = 1 + rng() % max_members;
  for (std::size_t i = 0; i < k; ++i) o.set(static_cast<xapagy::SymbolId>(pick(rng)), energy(rng));
  return o;
}

/// Domain with `n` concepts of random areas and a random sparse overlap matrix.
inline std::string random_domain_text(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> area(n);
  std::string text;
  for (std::size_t i = 0; i < n; ++i) {
    area[i] = 0.5 + u(rng);
    text += "concept c" + std::to_string(i) + " area=" + std::to_string(area[i]) + "\n";
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (u(rng) < 0.3) {
        double limit = std::min(area[i], area[j]);
        text += "overlap c" + std::to_string(i) + " c" + std::to_string(j) + " " + std::to_string(limit * u(rng)) + "\n";
      }
      if (u(rng) < 0.2) {
        text += "impact c" + std::to_string(i) + " c" + std::to_string(j) + " " + std::to_string(2 * u(rng) - 1) + "\n";
      }
    }
  }
  return text;
}

/// Collects trace lines.
struct TraceLog {
  std::vector<std::string> lines;
  void attach(xapagy::Agent& agent) {
    agent.set_trace([this](const std::string& line) { lines.push_back(line); });
  }
  std::size_t count(const std::string& needle) const {
    std::size_t n = 0;
    for (const auto& l : lines) n += l.find(needle) != std::string::npos;
    return n;
  }
  std::string joined() const {
    std::string s;
    for (const auto& l : lines) s += l + "\n";
    return s;
  }
};

}  // namespace testing
