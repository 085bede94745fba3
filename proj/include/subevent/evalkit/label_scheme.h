#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace subevent::evalkit {

// BIO label inventory over an ordered list of sub-event types.
// Label ids: O = 0, B-<type k> = 1 + 2k, I-<type k> = 2 + 2k.
class LabelScheme {
 public:
  static constexpr int kOutside = 0;

  LabelScheme() = default;
  explicit LabelScheme(std::vector<std::string> types);

  const std::vector<std::string> &types() const { return types_; }
  std::size_t num_types() const { return types_.size(); }
  std::size_t num_labels() const { return 2 * types_.size() + 1; }

  std::optional<int> TypeIndex(std::string_view type) const;
  // Throws AnnotationError naming the type when it is not in the scheme.
  int RequireType(std::string_view type) const;

  static int Begin(int type) { return 1 + 2 * type; }
  static int Inside(int type) { return 2 + 2 * type; }
  static bool IsBegin(int label) { return label > 0 && label % 2 == 1; }
  static bool IsInside(int label) { return label > 0 && label % 2 == 0; }
  // -1 for O.
  static int TypeOf(int label) { return label <= 0 ? -1 : (label - 1) / 2; }

  std::string LabelName(int label) const;
  int LabelId(std::string_view name) const;

  friend bool operator==(const LabelScheme &, const LabelScheme &) = default;

 private:
  std::vector<std::string> types_;
};

}  // namespace subevent::evalkit
