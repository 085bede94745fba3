#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "subevent/evalkit/bio.h"
#include "subevent/evalkit/label_scheme.h"

namespace subevent::evalkit {

enum class Protocol { kBinaryEvent, kRelaxed, kBinLevel };
enum class Aggregation { kMicro, kMacro };

std::string ToString(Protocol protocol);
std::string ToString(Aggregation aggregation);
Protocol ParseProtocol(std::string_view name);
Aggregation ParseAggregation(std::string_view name);

// Raw counts behind one P/R/F1 triple. Precision and recall may have
// different numerators: in the binary event protocol a predicted run and a
// gold span are matched separately.
struct Counts {
  std::int64_t predicted = 0;
  std::int64_t gold = 0;
  std::int64_t correct_predicted = 0;
  std::int64_t correct_gold = 0;

  Counts &operator+=(const Counts &o);
  double precision() const;
  double recall() const;
  double f1() const;
};

// f1 = 2PR/(P+R), or 0 when P+R = 0.
double F1Score(double precision, double recall);

struct EvalReport {
  Protocol protocol = Protocol::kBinLevel;
  Aggregation aggregation = Aggregation::kMicro;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Counts totals;
  std::int64_t streams = 0;

  nlohmann::ordered_json ToJson() const;
};

// Micro pools counts over streams; macro averages per-stream P, R and F1.
EvalReport Aggregate(Protocol protocol, Aggregation aggregation,
                     std::span<const Counts> per_stream);

// Per-bin type match: B-t and I-t both count as t; a non-O prediction is
// correct iff the gold bin has the same type.
Counts BinLevelCounts(std::span<const int> gold, std::span<const int> predicted);
EvalReport EvalBinLevel(std::span<const std::vector<int>> gold,
                        std::span<const std::vector<int>> predicted, Aggregation aggregation);

// A gold span is correct iff at least one of its bins is predicted with the
// span's type. Every gold span is one decision, so P = R = F1 = accuracy.
Counts RelaxedCounts(std::span<const SubEventSpan> gold, std::span<const int> predicted,
                     const LabelScheme &scheme);
EvalReport EvalRelaxed(std::span<const std::vector<SubEventSpan>> gold,
                       std::span<const std::vector<int>> predicted, const LabelScheme &scheme,
                       Aggregation aggregation);

// Maximal runs [first, last] of non-zero entries.
std::vector<std::pair<int, int>> PositiveRuns(std::span<const int> flags);

// Recall: gold spans containing a predicted-event bin. Precision: predicted
// runs of consecutive event bins that overlap some gold span.
Counts BinaryEventCounts(std::span<const SubEventSpan> gold, std::span<const int> predicted);
EvalReport EvalBinaryEvent(std::span<const std::vector<SubEventSpan>> gold,
                           std::span<const std::vector<int>> predicted, Aggregation aggregation);

// Event/no-event view of a BIO sequence (any non-O bin is an event).
std::vector<int> BioToBinary(std::span<const int> labels);

}  // namespace subevent::evalkit
