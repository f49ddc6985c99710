#ifndef MCSR_FIXTURES_HPP
#define MCSR_FIXTURES_HPP

#include <string>
#include <vector>

#include "mcsr/ontology.hpp"

namespace mcsr {

// Size knobs for the bundled fixtures whose fact-base contents are
// immaterial. Each fixture interprets them as documented on its builder.
struct FixtureConfig {
  int classes = 2;
  int students = 12;
};

std::vector<std::string> fixture_names();
bool is_fixture_name(const std::string& name);

// Builds a bundled fixture by name. Throws std::invalid_argument for
// unknown names.
Problem make_fixture(const std::string& name, const FixtureConfig& cfg = {});

}  // namespace mcsr

#endif
