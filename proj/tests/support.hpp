#pragma once

#include <filesystem>
#include <string>

#include "winoreg/resources.hpp"
#include "winoreg/schema.hpp"

namespace testsupport {

/// Repository fixture directory (set at compile time).
std::filesystem::path fixtures_dir();

/// Per-process scratch directory under the build tree; wiped on first use.
std::filesystem::path scratch_dir();

/// Copies the fixture resource files into <scratch>/res and builds the
/// corpus index there. Assembled once per process, then reused.
std::filesystem::path resource_root();

winoreg::ResourceBundle load_bundle(bool network_enabled = false);

winoreg::Dataset fixture_dataset(const std::string& name = "schemas.json");

const winoreg::SchemaHalf& half_by_id(const winoreg::Dataset& d, const std::string& id);

} // namespace testsupport
