// Copyright 2026 qmem developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once
// Scenario files: INI sections [source], [memory], [chains.signal],
// [chains.idler] and [run]. Keys carry their unit in the name; unknown keys
// are errors.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "qmem/montecarlo.hpp"
#include "qmem/tagfile.hpp"

namespace qmem {

struct Scenario {
    std::string name;
    mc::ExperimentConfig experiment;
    double window_s = 0;      //!< coincidence window of the analyses
    double bin_s = 0;         //!< histogram bin width
    std::vector<double> powers_mw;  //!< pump powers for the statistics table
    //! Every key after overrides, as `section.key` → value text.
    std::map<std::string, std::string> values;

    KeyValues echo() const;
};

//! Directory holding the bundled presets.
std::filesystem::path preset_directory();

//! `spec` is a file path or the name of a bundled preset. Overrides are
//! `section.key=value`. Throws ConfigError on syntax, unknown keys or
//! unparsable values, IoError when the file cannot be read and DomainError
//! when the values violate model invariants.
Scenario load_scenario(const std::string& spec,
                       const std::vector<std::string>& overrides = {});

Scenario parse_scenario(const std::string& text, const std::string& name,
                        const std::vector<std::string>& overrides = {});

}  // namespace qmem
