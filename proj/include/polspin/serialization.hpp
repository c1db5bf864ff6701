#pragma once

// Versioned JSON documents for states, block density matrices,
// constellations and basis sets, plus the counts CSV.  Readers validate
// structure and numeric sanity and throw ValidationError on bad input.

#include <string>
#include <vector>

#include <json.hpp>

#include "polspin/constellation.hpp"
#include "polspin/spin_core.hpp"
#include "polspin/tomography.hpp"

namespace polspin {

using json = nlohmann::json;

json state_to_json(const PureSpinState& s);
PureSpinState state_from_json(const json& doc);

json density_to_json(const BlockDensityMatrix& rho);
BlockDensityMatrix density_from_json(const json& doc);

json constellation_to_json(const Constellation& c);
Constellation constellation_from_json(const json& doc);

json bases_to_json(const std::vector<BasisSetting>& bases);
std::vector<BasisSetting> bases_from_json(const json& doc);

json reconstruction_to_json(const ReconstructionResult& r);

void write_json_file(const std::string& path, const json& doc);
json read_json_file(const std::string& path);

void write_counts_csv(const std::string& path, const std::vector<CountRecord>& counts);
std::vector<CountRecord> read_counts_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace polspin
