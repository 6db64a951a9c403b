#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mgfit/market_data.hpp"

namespace mgfit {

// The five agent incentive schemes. Minority rewards contrarians, majority
// rewards trend followers; the delayed variants pay an action at t with the
// realized sign at t+1; MixG splits the population half minority / half
// majority.
enum class GameVariant { GCMG, GCMjG, DelGCMjG, DelGCMG, MixG };

std::string to_string(GameVariant v);
std::optional<GameVariant> variant_from_string(std::string_view name);
bool is_delayed(GameVariant v);
const std::vector<GameVariant>& all_variants();

// Tables are bit-packed into one machine word, so memory is capped at 6 bits.
inline constexpr int kMaxMemory = 6;

// Per-game constants; only the strategy tables evolve.
struct GameHyper {
  int agents = 15;         // N
  int strategies = 2;      // S per agent
  int memory = 3;          // m history bits
  double threshold = 0.0;  // tau: an agent trades iff its best score > tau

  int tables() const { return agents * strategies; }
  std::uint32_t table_entries() const { return 1u << memory; }
  std::uint64_t table_mask() const {
    return table_entries() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << table_entries()) - 1;
  }
  bool operator==(const GameHyper&) const = default;
};

void validate(const GameHyper& h);  // throws GameError

// One strategy: action per m-bit history, bit set = buy (+1), clear = sell (-1).
struct StrategyTable {
  std::uint64_t bits = 0;
  std::int8_t action(std::uint32_t history_index) const {
    return (bits >> history_index) & 1u ? std::int8_t{1} : std::int8_t{-1};
  }
};

// History index: the last m binary symbols packed into an integer, oldest
// symbol in the highest bit, +1 mapped to bit value 1.
std::uint32_t history_index(std::span<const std::int8_t> symbols);
std::uint32_t push_history(std::uint32_t index, std::int8_t symbol, int memory);

struct MarketStep {
  std::uint32_t history_index = 0;     // history the step was decided under
  std::vector<std::int8_t> actions;    // per agent, in {+1, 0, -1}
  int excess_demand = 0;               // A = sum of actions
};

std::vector<int> demands(std::span<const MarketStep> steps);

// A candidate agent ensemble: N agents, S bit-packed strategy tables and S
// virtual-point counters each, plus the variant's payoff rule. Virtual points
// score every strategy against the external realized sign whether or not the
// agent traded, so the strategy ranking is independent of activity.
class ThirdPartyGame {
 public:
  // Tables laid out agent-major: table(i, s) = tables[i * S + s]. Scores all 0.
  ThirdPartyGame(GameVariant variant, GameHyper hyper, std::vector<std::uint64_t> tables);

  GameVariant variant() const { return variant_; }
  const GameHyper& hyper() const { return hyper_; }
  std::span<const std::uint64_t> tables() const { return tables_; }
  std::span<const double> scores() const { return scores_; }
  std::optional<std::uint32_t> pending() const { return pending_; }

  // Minority agents are the first ceil(N/2) slots under MixG.
  bool minority_rule(int agent) const;

  // Each agent plays its best-scored strategy (lowest index on ties) if that
  // score strictly exceeds the threshold, otherwise abstains. Pure.
  MarketStep decide(std::uint32_t history_index) const;
  MarketStep decide(std::span<const std::int8_t> history) const;

  // Applies the realized external sign for the step decided under
  // `history_index`. Delayed variants settle the previous pending step with
  // this sign and enqueue the current one.
  void score_update(std::uint32_t history_index, std::int8_t realized);
  void score_update(const MarketStep& step, std::int8_t realized);

  // Next-day excess demand with no score mutation.
  int predict_next(std::uint32_t history_index) const;
  int predict_next(std::span<const std::int8_t> history) const;

 private:
  GameVariant variant_;
  GameHyper hyper_;
  std::vector<std::uint64_t> tables_;
  std::vector<double> scores_;
  std::optional<std::uint32_t> pending_;
};

// Steps through the window: decide on the external history, record the step,
// then score against that day's realized binary sign. The history window is
// always drawn from the external series, never from the game's own output.
// warm_history supplies the m symbols immediately preceding the window.
std::vector<MarketStep> run_window(ThirdPartyGame& game,
                                   std::span<const std::int8_t> warm_history,
                                   const ReturnView& window);

// Canonical JSON (variant + hyper + tables), round-trip exact.
std::string to_json(const ThirdPartyGame& game);
ThirdPartyGame game_from_json(std::string_view text);

}  // namespace mgfit
