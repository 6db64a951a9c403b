#include "mgfit/game.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "mgfit/errors.hpp"

namespace mgfit {

std::string to_string(GameVariant v) {
  switch (v) {
    case GameVariant::GCMG: return "GCMG";
    case GameVariant::GCMjG: return "GCMjG";
    case GameVariant::DelGCMjG: return "delGCMjG";
    case GameVariant::DelGCMG: return "delGCMG";
    case GameVariant::MixG: return "MixG";
  }
  return "GCMG";
}

std::optional<GameVariant> variant_from_string(std::string_view name) {
  if (name == "GCMG") return GameVariant::GCMG;
  if (name == "GCMjG") return GameVariant::GCMjG;
  if (name == "delGCMjG") return GameVariant::DelGCMjG;
  if (name == "delGCMG") return GameVariant::DelGCMG;
  if (name == "MixG") return GameVariant::MixG;
  return std::nullopt;
}

bool is_delayed(GameVariant v) {
  return v == GameVariant::DelGCMjG || v == GameVariant::DelGCMG;
}

const std::vector<GameVariant>& all_variants() {
  static const std::vector<GameVariant> v = {GameVariant::GCMG, GameVariant::GCMjG,
                                             GameVariant::DelGCMjG, GameVariant::DelGCMG,
                                             GameVariant::MixG};
  return v;
}

void validate(const GameHyper& h) {
  if (h.agents < 1) throw GameError("agents must be >= 1");
  if (h.strategies < 1) throw GameError("strategies must be >= 1");
  if (h.memory < 1 || h.memory > kMaxMemory)
    throw GameError("memory must be in [1, " + std::to_string(kMaxMemory) + "]");
  if (!std::isfinite(h.threshold)) throw GameError("threshold must be finite");
}

std::uint32_t history_index(std::span<const std::int8_t> symbols) {
  std::uint32_t idx = 0;
  for (std::int8_t s : symbols) idx = (idx << 1) | (s > 0 ? 1u : 0u);
  return idx;
}

std::uint32_t push_history(std::uint32_t index, std::int8_t symbol, int memory) {
  const std::uint32_t mask = (1u << memory) - 1;
  return ((index << 1) | (symbol > 0 ? 1u : 0u)) & mask;
}

std::vector<int> demands(std::span<const MarketStep> steps) {
  std::vector<int> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.excess_demand);
  return out;
}

ThirdPartyGame::ThirdPartyGame(GameVariant variant, GameHyper hyper,
                               std::vector<std::uint64_t> tables)
    : variant_(variant), hyper_(hyper), tables_(std::move(tables)) {
  validate(hyper_);
  if (tables_.size() != static_cast<std::size_t>(hyper_.tables()))
    throw GameError("expected " + std::to_string(hyper_.tables()) + " strategy tables, got " +
                    std::to_string(tables_.size()));
  const std::uint64_t mask = hyper_.table_mask();
  for (auto& t : tables_) t &= mask;  // canonical form: unused bits clear
  scores_.assign(tables_.size(), 0.0);
}

bool ThirdPartyGame::minority_rule(int agent) const {
  switch (variant_) {
    case GameVariant::GCMG:
    case GameVariant::DelGCMG:
      return true;
    case GameVariant::GCMjG:
    case GameVariant::DelGCMjG:
      return false;
    case GameVariant::MixG:
      return agent < (hyper_.agents + 1) / 2;
  }
  return true;
}

MarketStep ThirdPartyGame::decide(std::uint32_t history_index) const {
  if (history_index >= hyper_.table_entries())
    throw GameError("history index out of range for memory " + std::to_string(hyper_.memory));
  MarketStep step;
  step.history_index = history_index;
  step.actions.resize(hyper_.agents);
  const int S = hyper_.strategies;
  for (int i = 0; i < hyper_.agents; ++i) {
    const double* sc = scores_.data() + static_cast<std::size_t>(i) * S;
    int best = 0;
    for (int s = 1; s < S; ++s)
      if (sc[s] > sc[best]) best = s;  // ties keep the lowest index
    std::int8_t a = 0;
    if (sc[best] > hyper_.threshold) {
      const StrategyTable t{tables_[static_cast<std::size_t>(i) * S + best]};
      a = t.action(history_index);
    }
    step.actions[i] = a;
    step.excess_demand += a;
  }
  return step;
}

MarketStep ThirdPartyGame::decide(std::span<const std::int8_t> history) const {
  if (history.size() != static_cast<std::size_t>(hyper_.memory))
    throw GameError("history length " + std::to_string(history.size()) + " != memory " +
                    std::to_string(hyper_.memory));
  return decide(mgfit::history_index(history));
}

void ThirdPartyGame::score_update(std::uint32_t history_index, std::int8_t realized) {
  if (realized != 1 && realized != -1) throw GameError("realized sign must be +1 or -1");
  auto apply = [&](std::uint32_t h) {
    const int S = hyper_.strategies;
    for (int i = 0; i < hyper_.agents; ++i) {
      const double rule = minority_rule(i) ? -1.0 : 1.0;
      for (int s = 0; s < S; ++s) {
        const StrategyTable t{tables_[static_cast<std::size_t>(i) * S + s]};
        scores_[static_cast<std::size_t>(i) * S + s] +=
            rule * static_cast<double>(t.action(h)) * static_cast<double>(realized);
      }
    }
  };

  if (!is_delayed(variant_)) {
    apply(history_index);
    return;
  }
  // Delayed payoff: the step decided at t is paid with the sign realized at
  // t+1, so settle the pending step now and queue the current one.
  if (pending_) apply(*pending_);
  pending_ = history_index;
}

void ThirdPartyGame::score_update(const MarketStep& step, std::int8_t realized) {
  score_update(step.history_index, realized);
}

int ThirdPartyGame::predict_next(std::uint32_t history_index) const {
  return decide(history_index).excess_demand;
}

int ThirdPartyGame::predict_next(std::span<const std::int8_t> history) const {
  return decide(history).excess_demand;
}

std::vector<MarketStep> run_window(ThirdPartyGame& game,
                                   std::span<const std::int8_t> warm_history,
                                   const ReturnView& window) {
  if (warm_history.size() != static_cast<std::size_t>(game.hyper().memory))
    throw GameError("warm history must supply exactly m symbols");
  if (window.size() == 0) throw GameError("empty window");

  std::uint32_t idx = history_index(warm_history);
  std::vector<MarketStep> steps;
  steps.reserve(window.size());
  for (std::size_t t = 0; t < window.size(); ++t) {
    steps.push_back(game.decide(idx));
    const std::int8_t realized = window.binary[t];
    game.score_update(idx, realized);
    idx = push_history(idx, realized, game.hyper().memory);
  }
  return steps;
}

std::string to_json(const ThirdPartyGame& game) {
  nlohmann::json j;
  j["variant"] = to_string(game.variant());
  j["agents"] = game.hyper().agents;
  j["strategies"] = game.hyper().strategies;
  j["memory"] = game.hyper().memory;
  j["threshold"] = game.hyper().threshold;
  j["tables"] = std::vector<std::uint64_t>(game.tables().begin(), game.tables().end());
  return j.dump();
}

ThirdPartyGame game_from_json(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DataError("bad game JSON");
  try {
    const auto variant = variant_from_string(j.at("variant").get<std::string>());
    if (!variant) throw DataError("unknown variant in game JSON");
    GameHyper h;
    h.agents = j.at("agents").get<int>();
    h.strategies = j.at("strategies").get<int>();
    h.memory = j.at("memory").get<int>();
    h.threshold = j.at("threshold").get<double>();
    auto tables = j.at("tables").get<std::vector<std::uint64_t>>();
    return ThirdPartyGame(*variant, h, std::move(tables));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad game JSON: ") + e.what());
  }
}

}  // namespace mgfit
