#pragma once

#include <string>
#include <vector>

#include "subevent/autodiff/gradcheck.h"
#include "subevent/labeler/model.h"

namespace subevent::cli {

struct GradCheckCase {
  std::string name;
  labeler::ModelConfig config;
};

// Small-dimension configurations covering every encoder variant with the
// chronological layer on and off, TL on and off for tweet-level variants,
// two-level attention, and the binary head. `variant` restricts the matrix
// to one encoder ("all" keeps every case).
std::vector<GradCheckCase> GradCheckMatrix(const labeler::ModelConfig &base, const std::string &variant);

// Checks the full training loss (train-mode dropout with a fixed mask) of a
// 3-bin toy stream against central differences. With `inject_fault` the loss
// gains a term whose backward has the wrong sign, which must fail.
ad::GradCheckReport CheckModelGradients(const labeler::ModelConfig &config, bool inject_fault,
                                        const ad::GradCheckOptions &options);

}  // namespace subevent::cli
