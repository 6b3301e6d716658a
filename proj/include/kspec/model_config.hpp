#pragma once

#include "kspec/errors.hpp"

namespace kspec {

// Shape of the deep SSM: input linear -> SiLU -> [SSM bank -> SiLU] x l_ssm
// -> output linear. Each SSM bank holds `channels` independent SISO systems
// with `state_dim` states.
struct DeepSsmConfig {
  int state_dim = 4;    // d
  int channels = 4;     // d_in
  int ssm_layers = 1;   // l_ssm
  int input_dim = 1;
  int output_dim = 1;

  int num_ssm_channels() const { return channels * ssm_layers; }

  void validate() const {
    if (state_dim < 1 || channels < 1 || ssm_layers < 1 || input_dim < 1 ||
        output_dim < 1) {
      throw ConfigError("DeepSsmConfig: all dimensions must be >= 1");
    }
  }
};

}  // namespace kspec
