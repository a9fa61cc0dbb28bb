#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <variant>

#include "poolbench/heads/bilstm.hpp"
#include "poolbench/heads/cnn.hpp"
#include "poolbench/heads/linear.hpp"

namespace poolbench {

using AnyModel = std::variant<LinearModel, CnnHead, BiLstmHead>;

// Binary model blob, little-endian. See docs/model_format.md.
inline constexpr unsigned char kModelFormatVersion = 1;

void save_model(const AnyModel& model, std::ostream& out);
// Throws DataError on unknown version/kind, truncation or non-finite values.
AnyModel load_model(std::istream& in);

void save_model_file(const AnyModel& model, const std::filesystem::path& path);
AnyModel load_model_file(const std::filesystem::path& path);

}  // namespace poolbench
