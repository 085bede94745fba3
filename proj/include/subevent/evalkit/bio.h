#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "subevent/evalkit/label_scheme.h"

namespace subevent::evalkit {

// A typed sub-event over an inclusive range of bins.
struct SubEventSpan {
  std::string type;
  int first_bin = 0;
  int last_bin = 0;

  friend bool operator==(const SubEventSpan &, const SubEventSpan &) = default;
};

std::string SpanToString(const SubEventSpan &span);

// Checks first <= last, range [0, n_bins) and pairwise disjointness; throws
// AnnotationError naming the offending span(s).
void ValidateSpans(std::size_t n_bins, std::span<const SubEventSpan> spans);

// B-t on the first bin of each span, I-t on the rest, O elsewhere.
std::vector<int> SpansToBio(std::size_t n_bins, std::span<const SubEventSpan> spans,
                            const LabelScheme &scheme);

// Decodes maximal runs, repairing illegal sequences: an I-t with no open span
// of type t opens one (as if B-t); B-t always opens a new span; O closes.
// Spans are returned in bin order.
std::vector<SubEventSpan> BioToSpans(std::span<const int> labels, const LabelScheme &scheme);

}  // namespace subevent::evalkit
