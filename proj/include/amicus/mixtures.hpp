#pragma once

#include <map>
#include <string>
#include <vector>

namespace amicus {

// Stage-one output for one case: merits mixture plus one mixture per brief,
// aligned with Case::briefs by index.
struct CaseMixtures {
  std::vector<double> theta;
  std::vector<std::vector<double>> briefs;
};

// Keyed by case id. Ordered map so serialization is byte-stable.
using CorpusMixtures = std::map<std::string, CaseMixtures>;

void save_mixtures(const CorpusMixtures& mixtures, const std::string& path);
CorpusMixtures load_mixtures(const std::string& path);

}  // namespace amicus
