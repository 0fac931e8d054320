#pragma once

#include <iosfwd>
#include <string>

#include "ffcc/model.hpp"
#include "ffcc/trainer.hpp"

namespace ffcc {

/// A trained model together with the settings it was trained with.
struct ModelFile {
  ModelParams params;
  DealiasMode dealias = DealiasMode::kGrayLight;
  TrainConfig config;

  friend bool operator==(const ModelFile&, const ModelFile&) = default;
};

inline constexpr const char* kModelMagic = "ffcc-model-v1";

/// Versioned text format. Numbers use the shortest representation that
/// reads back to the same double, so load(save(m)) == m bit for bit.
void write_model(std::ostream& out, const ModelFile& model);
ModelFile read_model(std::istream& in);

void save_model(const std::string& path, const ModelFile& model);
ModelFile load_model(const std::string& path);

}  // namespace ffcc
