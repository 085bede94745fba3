#include "subevent/evalkit/bio.h"

#include <algorithm>

#include <fmt/format.h>

#include "subevent/errors.h"

namespace subevent::evalkit {

std::string SpanToString(const SubEventSpan &span) {
  return fmt::format("{}({},{})", span.type, span.first_bin, span.last_bin);
}

void ValidateSpans(std::size_t n_bins, std::span<const SubEventSpan> spans) {
  std::vector<const SubEventSpan *> order;
  for (const auto &s : spans) {
    if (s.first_bin > s.last_bin) {
      throw AnnotationError(fmt::format("span {} ends before it starts", SpanToString(s)));
    }
    if (s.first_bin < 0 || static_cast<std::size_t>(s.last_bin) >= n_bins) {
      throw AnnotationError(
          fmt::format("span {} outside the {} bins of the stream", SpanToString(s), n_bins));
    }
    order.push_back(&s);
  }
  std::sort(order.begin(), order.end(),
            [](const SubEventSpan *a, const SubEventSpan *b) { return a->first_bin < b->first_bin; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i]->first_bin <= order[i - 1]->last_bin) {
      throw AnnotationError(fmt::format("overlapping spans {} and {}", SpanToString(*order[i - 1]),
                                        SpanToString(*order[i])));
    }
  }
}

std::vector<int> SpansToBio(std::size_t n_bins, std::span<const SubEventSpan> spans,
                            const LabelScheme &scheme) {
  ValidateSpans(n_bins, spans);
  std::vector<int> labels(n_bins, LabelScheme::kOutside);
  for (const auto &s : spans) {
    const int type = scheme.RequireType(s.type);
    labels[s.first_bin] = LabelScheme::Begin(type);
    for (int b = s.first_bin + 1; b <= s.last_bin; ++b) labels[b] = LabelScheme::Inside(type);
  }
  return labels;
}

std::vector<SubEventSpan> BioToSpans(std::span<const int> labels, const LabelScheme &scheme) {
  std::vector<SubEventSpan> spans;
  int open_type = -1;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    const int type = LabelScheme::TypeOf(label);
    if (type >= static_cast<int>(scheme.num_types())) {
      throw AnnotationError(fmt::format("label id {} outside scheme", label));
    }
    if (type < 0) {
      open_type = -1;
    } else if (LabelScheme::IsInside(label) && type == open_type) {
      spans.back().last_bin = static_cast<int>(i);
    } else {
      spans.push_back({scheme.types()[type], static_cast<int>(i), static_cast<int>(i)});
      open_type = type;
    }
  }
  return spans;
}

}  // namespace subevent::evalkit
