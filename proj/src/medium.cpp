#include "uswb/medium.hpp"

#include <fstream>

#include "json.hpp"
#include "uswb/csv.hpp"

namespace uswb {

using nlohmann::json;

TissueTable TissueTable::defaults() {
  // Literature-typical values. Attenuation is given here in Np/(m * MHz^b);
  // e.g. muscle ~1.09 dB/(cm*MHz) -> 12.55 Np/(m*MHz).
  TissueTable t;
  t.set("bone", MediumParams{3476.0, 1975.0, 79.44, 1.0});
  t.set("muscle", MediumParams{1580.0, 1050.0, 12.55, 1.0});
  t.set("fat", MediumParams{1450.0, 950.0, 5.53, 1.0});
  t.set("skin", MediumParams{1624.0, 1109.0, 21.18, 1.0});
  return t;
}

TissueTable TissueTable::load(const std::string& path) {
  auto f = open_input(path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("tissue table " + path + ": " + e.what());
  }
  if (!j.is_object())
    throw std::runtime_error("tissue table " + path + ": expected an object");
  TissueTable t;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const json& e = it.value();
    for (auto f2 = e.begin(); f2 != e.end(); ++f2) {
      const std::string& k = f2.key();
      if (k != "c" && k != "rho" && k != "a" && k != "b")
        throw std::runtime_error("tissue table: unknown key '" + k + "' in '" +
                                 it.key() + "'");
    }
    MediumParams p;
    p.c = e.at("c").get<double>();
    p.rho = e.at("rho").get<double>();
    p.a = e.at("a").get<double>();
    p.b = e.value("b", 1.0);
    try {
      t.set(it.key(), p);
    } catch (const std::exception& ex) {
      throw std::runtime_error("tissue '" + it.key() + "': " + ex.what());
    }
  }
  return t;
}

void TissueTable::save(const std::string& path) const {
  json j = json::object();
  for (const auto& [name, p] : table_)
    j[name] = {{"c", p.c}, {"rho", p.rho}, {"a", p.a}, {"b", p.b}};
  auto f = open_output(path);
  f << j.dump(2) << "\n";
}

}  // namespace uswb
