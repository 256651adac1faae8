#pragma once

#include <iosfwd>
#include <string>

#include "dsner/model.hpp"

namespace dsner {

/// Versioned model container: a text manifest (config snapshot, label types,
/// vocabulary, tensor names and shapes) followed by the raw little-endian
/// float64 payload. Reloading reproduces outputs bit-exactly and re-saving a
/// loaded model reproduces the bytes.
void save_model(std::ostream& out, NerModel& model);
void save_model(const std::string& path, NerModel& model);

NerModel load_model(std::istream& in);
NerModel load_model(const std::string& path);

}  // namespace dsner
