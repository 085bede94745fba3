#include "subevent/evalkit/metrics.h"

#include <stdexcept>

#include <fmt/format.h>

#include "subevent/errors.h"

namespace subevent::evalkit {
namespace {

double Ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void RequireSameStreamCount(std::size_t a, std::size_t b) {
  if (a != b) {
    throw std::invalid_argument(fmt::format("{} gold streams but {} predicted streams", a, b));
  }
}

}  // namespace

std::string ToString(Protocol protocol) {
  switch (protocol) {
    case Protocol::kBinaryEvent: return "binary-event";
    case Protocol::kRelaxed: return "relaxed";
    case Protocol::kBinLevel: return "bin-level";
  }
  return "?";
}

std::string ToString(Aggregation aggregation) {
  return aggregation == Aggregation::kMicro ? "micro" : "macro";
}

Protocol ParseProtocol(std::string_view name) {
  if (name == "binary-event") return Protocol::kBinaryEvent;
  if (name == "relaxed") return Protocol::kRelaxed;
  if (name == "bin-level") return Protocol::kBinLevel;
  throw ConfigError(fmt::format("unknown protocol '{}'", name));
}

Aggregation ParseAggregation(std::string_view name) {
  if (name == "micro") return Aggregation::kMicro;
  if (name == "macro") return Aggregation::kMacro;
  throw ConfigError(fmt::format("unknown aggregation '{}'", name));
}

Counts &Counts::operator+=(const Counts &o) {
  predicted += o.predicted;
  gold += o.gold;
  correct_predicted += o.correct_predicted;
  correct_gold += o.correct_gold;
  return *this;
}

double Counts::precision() const { return Ratio(correct_predicted, predicted); }
double Counts::recall() const { return Ratio(correct_gold, gold); }
double Counts::f1() const { return F1Score(precision(), recall()); }

double F1Score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

nlohmann::ordered_json EvalReport::ToJson() const {
  nlohmann::ordered_json j;
  j["protocol"] = ToString(protocol);
  j["aggregation"] = ToString(aggregation);
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["support"] = {{"streams", streams},
                  {"gold", totals.gold},
                  {"predicted", totals.predicted},
                  {"correct_gold", totals.correct_gold},
                  {"correct_predicted", totals.correct_predicted}};
  return j;
}

EvalReport Aggregate(Protocol protocol, Aggregation aggregation,
                     std::span<const Counts> per_stream) {
  EvalReport report;
  report.protocol = protocol;
  report.aggregation = aggregation;
  report.streams = static_cast<std::int64_t>(per_stream.size());
  for (const auto &c : per_stream) report.totals += c;
  if (aggregation == Aggregation::kMicro) {
    report.precision = report.totals.precision();
    report.recall = report.totals.recall();
    report.f1 = report.totals.f1();
  } else if (!per_stream.empty()) {
    for (const auto &c : per_stream) {
      report.precision += c.precision();
      report.recall += c.recall();
      report.f1 += c.f1();
    }
    const auto n = static_cast<double>(per_stream.size());
    report.precision /= n;
    report.recall /= n;
    report.f1 /= n;
  }
  return report;
}

Counts BinLevelCounts(std::span<const int> gold, std::span<const int> predicted) {
  if (gold.size() != predicted.size()) {
    throw std::invalid_argument(
        fmt::format("bin-level: {} gold bins but {} predicted", gold.size(), predicted.size()));
  }
  Counts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const int g = LabelScheme::TypeOf(gold[i]);
    const int p = LabelScheme::TypeOf(predicted[i]);
    if (g >= 0) ++c.gold;
    if (p >= 0) {
      ++c.predicted;
      if (p == g) {
        ++c.correct_predicted;
        ++c.correct_gold;
      }
    }
  }
  return c;
}

EvalReport EvalBinLevel(std::span<const std::vector<int>> gold,
                        std::span<const std::vector<int>> predicted, Aggregation aggregation) {
  RequireSameStreamCount(gold.size(), predicted.size());
  std::vector<Counts> per_stream;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    per_stream.push_back(BinLevelCounts(gold[s], predicted[s]));
  }
  return Aggregate(Protocol::kBinLevel, aggregation, per_stream);
}

Counts RelaxedCounts(std::span<const SubEventSpan> gold, std::span<const int> predicted,
                     const LabelScheme &scheme) {
  Counts c;
  for (const auto &span : gold) {
    if (span.first_bin < 0 || span.last_bin < span.first_bin ||
        static_cast<std::size_t>(span.last_bin) >= predicted.size()) {
      throw std::invalid_argument(fmt::format("relaxed: span {} outside {} predicted bins",
                                              SpanToString(span), predicted.size()));
    }
    const int type = scheme.RequireType(span.type);
    bool hit = false;
    for (int b = span.first_bin; b <= span.last_bin && !hit; ++b) {
      hit = LabelScheme::TypeOf(predicted[b]) == type;
    }
    ++c.gold;
    ++c.predicted;
    if (hit) {
      ++c.correct_gold;
      ++c.correct_predicted;
    }
  }
  return c;
}

EvalReport EvalRelaxed(std::span<const std::vector<SubEventSpan>> gold,
                       std::span<const std::vector<int>> predicted, const LabelScheme &scheme,
                       Aggregation aggregation) {
  RequireSameStreamCount(gold.size(), predicted.size());
  std::vector<Counts> per_stream;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    per_stream.push_back(RelaxedCounts(gold[s], predicted[s], scheme));
  }
  return Aggregate(Protocol::kRelaxed, aggregation, per_stream);
}

std::vector<std::pair<int, int>> PositiveRuns(std::span<const int> flags) {
  std::vector<std::pair<int, int>> runs;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i] == 0) continue;
    if (!runs.empty() && runs.back().second == static_cast<int>(i) - 1) {
      runs.back().second = static_cast<int>(i);
    } else {
      runs.emplace_back(static_cast<int>(i), static_cast<int>(i));
    }
  }
  return runs;
}

Counts BinaryEventCounts(std::span<const SubEventSpan> gold, std::span<const int> predicted) {
  Counts c;
  // covered[b] marks bins inside some gold span, for the precision side.
  std::vector<char> covered(predicted.size(), 0);
  for (const auto &span : gold) {
    if (span.first_bin < 0 || span.last_bin < span.first_bin ||
        static_cast<std::size_t>(span.last_bin) >= predicted.size()) {
      throw std::invalid_argument(fmt::format("binary-event: span {} outside {} predicted bins",
                                              SpanToString(span), predicted.size()));
    }
    bool hit = false;
    for (int b = span.first_bin; b <= span.last_bin; ++b) {
      covered[b] = 1;
      hit = hit || predicted[b] != 0;
    }
    ++c.gold;
    if (hit) ++c.correct_gold;
  }
  for (const auto &[first, last] : PositiveRuns(predicted)) {
    ++c.predicted;
    for (int b = first; b <= last; ++b) {
      if (covered[b]) {
        ++c.correct_predicted;
        break;
      }
    }
  }
  return c;
}

EvalReport EvalBinaryEvent(std::span<const std::vector<SubEventSpan>> gold,
                           std::span<const std::vector<int>> predicted, Aggregation aggregation) {
  RequireSameStreamCount(gold.size(), predicted.size());
  std::vector<Counts> per_stream;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    per_stream.push_back(BinaryEventCounts(gold[s], predicted[s]));
  }
  return Aggregate(Protocol::kBinaryEvent, aggregation, per_stream);
}

std::vector<int> BioToBinary(std::span<const int> labels) {
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] != LabelScheme::kOutside;
  return out;
}

}  // namespace subevent::evalkit
