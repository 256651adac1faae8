#pragma once

#include "dsner/config.hpp"

namespace dsner {

/// The four workflows behind the CLI. Each returns a process exit status and
/// throws std::runtime_error with a user-facing message on bad inputs.
int cmd_train(const RunConfig& config);
int cmd_tag(const RunConfig& config);
int cmd_eval(const RunConfig& config);
int cmd_inspect_offsets(const RunConfig& config);

}  // namespace dsner
