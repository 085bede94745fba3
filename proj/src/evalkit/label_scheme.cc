#include "subevent/evalkit/label_scheme.h"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "subevent/errors.h"

namespace subevent::evalkit {

LabelScheme::LabelScheme(std::vector<std::string> types) : types_(std::move(types)) {
  std::set<std::string> seen;
  for (const auto &t : types_) {
    if (t.empty()) throw AnnotationError("label scheme: empty type name");
    if (!seen.insert(t).second) {
      throw AnnotationError(fmt::format("label scheme: duplicate type '{}'", t));
    }
  }
}

std::optional<int> LabelScheme::TypeIndex(std::string_view type) const {
  auto it = std::find(types_.begin(), types_.end(), type);
  if (it == types_.end()) return std::nullopt;
  return static_cast<int>(it - types_.begin());
}

int LabelScheme::RequireType(std::string_view type) const {
  if (auto idx = TypeIndex(type)) return *idx;
  throw AnnotationError(fmt::format("sub-event type '{}' is not in the label scheme", type));
}

std::string LabelScheme::LabelName(int label) const {
  if (label == kOutside) return "O";
  const int type = TypeOf(label);
  if (type < 0 || static_cast<std::size_t>(type) >= types_.size()) {
    throw AnnotationError(fmt::format("label id {} outside scheme", label));
  }
  return fmt::format("{}-{}", IsBegin(label) ? "B" : "I", types_[type]);
}

int LabelScheme::LabelId(std::string_view name) const {
  if (name == "O") return kOutside;
  if (name.size() > 2 && (name[0] == 'B' || name[0] == 'I') && name[1] == '-') {
    const int type = RequireType(name.substr(2));
    return name[0] == 'B' ? Begin(type) : Inside(type);
  }
  throw AnnotationError(fmt::format("malformed BIO label '{}'", name));
}

}  // namespace subevent::evalkit
