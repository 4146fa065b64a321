#include "amicus/mixtures.hpp"

#include <fstream>

#include "amicus/errors.hpp"
#include "json.hpp"

namespace amicus {

using nlohmann::json;

void save_mixtures(const CorpusMixtures& mixtures, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write mixtures file " + path);
  json rec = json::object();
  for (const auto& [id, mix] : mixtures) {
    rec[id] = {{"theta", mix.theta}, {"briefs", mix.briefs}};
  }
  out << rec.dump() << '\n';
  if (!out) throw ValidationError("failed writing mixtures file " + path);
}

CorpusMixtures load_mixtures(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open mixtures file " + path);
  json rec;
  try {
    in >> rec;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed mixtures file: ") + e.what());
  }
  CorpusMixtures mixtures;
  try {
    for (const auto& [id, mix] : rec.items()) {
      CaseMixtures m;
      m.theta = mix.at("theta").get<std::vector<double>>();
      m.briefs = mix.at("briefs").get<std::vector<std::vector<double>>>();
      mixtures[id] = std::move(m);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed mixtures file: ") + e.what());
  }
  return mixtures;
}

}  // namespace amicus
