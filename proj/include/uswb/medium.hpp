#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace uswb {

// Acoustic properties of one tissue type.
//   c    speed of sound [m/s]
//   rho  density [kg/m^3]
//   a    attenuation parameter [Np * m^-1 * MHz^-b]
//   b    attenuation frequency exponent [-]
struct MediumParams {
  double c = 0.0;
  double rho = 0.0;
  double a = 0.0;
  double b = 1.0;

  void validate() const {
    if (!(c > 0.0)) throw std::invalid_argument("MediumParams: c must be > 0");
    if (!(rho > 0.0)) throw std::invalid_argument("MediumParams: rho must be > 0");
    if (a < 0.0) throw std::invalid_argument("MediumParams: a must be >= 0");
    if (b < 0.0) throw std::invalid_argument("MediumParams: b must be >= 0");
  }
};

// Named tissue table. Values ship as configuration (data/tissues.json);
// they are literature-typical, not normative.
class TissueTable {
 public:
  TissueTable() = default;

  void set(const std::string& name, const MediumParams& p) {
    p.validate();
    table_[name] = p;
  }

  const MediumParams& get(const std::string& name) const {
    auto it = table_.find(name);
    if (it == table_.end())
      throw std::out_of_range("TissueTable: unknown tissue '" + name + "'");
    return it->second;
  }

  bool has(const std::string& name) const { return table_.count(name) != 0; }
  const std::map<std::string, MediumParams>& all() const { return table_; }

  // Bundled defaults used when no tissue file is given.
  static TissueTable defaults();

  static TissueTable load(const std::string& path);
  void save(const std::string& path) const;

 private:
  std::map<std::string, MediumParams> table_;
};

}  // namespace uswb
