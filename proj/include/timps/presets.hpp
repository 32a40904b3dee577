#pragma once
// The named example states: class, b-matrix, and the displayed tensor.
#include <timps/mps.hpp>

#include <optional>
#include <string>
#include <vector>

namespace timps {

struct Preset {
  std::string name;
  ClassLabel cls;
  CMat b;             // 3x3 family parameter
  MpsTensor tensor;   // the displayed tensor (gauge-equivalent to tensor_from_b)
  std::string description;
};

std::optional<Preset> preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace timps
