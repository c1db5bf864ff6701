#include "polspin/serialization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "polspin/errors.hpp"
#include "polspin/metrology.hpp"

namespace polspin {

namespace {

json complex_to_json(const cxd& z) { return json::array({z.real(), z.imag()}); }

cxd complex_from_json(const json& v) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ValidationError("expected [re, im] pair");
  const cxd z(v[0].get<double>(), v[1].get<double>());
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw ValidationError("non-finite complex entry");
  return z;
}

void require_format(const json& doc, const std::string& name) {
  if (!doc.is_object() || doc.value("format", "") != name)
    throw ValidationError("document is not a '" + name + "' file");
  if (doc.value("version", 0) != 1)
    throw ValidationError("unsupported '" + name + "' version");
}

}  // namespace

json state_to_json(const PureSpinState& s) {
  json amps = json::array();
  for (int i = 0; i < s.amps.size(); ++i) amps.push_back(complex_to_json(s.amps(i)));
  return json{{"format", "spin_state"}, {"version", 1}, {"two_j", s.two_j},
              {"amps", amps}};
}

PureSpinState state_from_json(const json& doc) {
  require_format(doc, "spin_state");
  PureSpinState s;
  if (!doc.contains("two_j") || !doc["two_j"].is_number_integer())
    throw ValidationError("spin_state: missing integer two_j");
  s.two_j = doc["two_j"].get<int>();
  if (s.two_j < 0) throw ValidationError("spin_state: two_j must be >= 0");
  const auto& amps = doc.at("amps");
  if (!amps.is_array() || int(amps.size()) != s.two_j + 1)
    throw ValidationError("spin_state: amps must hold two_j + 1 entries");
  s.amps.resize(s.two_j + 1);
  for (int i = 0; i <= s.two_j; ++i) s.amps(i) = complex_from_json(amps[i]);
  const double n = s.amps.norm();
  if (std::abs(n - 1.0) > 1e-6)
    throw ValidationError("spin_state: amplitudes are not normalized");
  s.amps /= n;
  return s;
}

json density_to_json(const BlockDensityMatrix& rho) {
  json sectors = json::array();
  for (const auto& sec : rho.sectors) {
    json rows = json::array();
    for (int r = 0; r < sec.block.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < sec.block.cols(); ++c)
        row.push_back(complex_to_json(sec.block(r, c)));
      rows.push_back(row);
    }
    sectors.push_back(
        json{{"two_j", sec.two_j}, {"mult", sec.mult}, {"block", rows}});
  }
  return json{{"format", "block_density"}, {"version", 1}, {"sectors", sectors}};
}

BlockDensityMatrix density_from_json(const json& doc) {
  require_format(doc, "block_density");
  if (!doc.contains("sectors") || !doc["sectors"].is_array() || doc["sectors"].empty())
    throw ValidationError("block_density: missing sectors");
  BlockDensityMatrix rho;
  for (const auto& jsec : doc["sectors"]) {
    BlockDensityMatrix::Sector sec;
    if (!jsec.contains("two_j") || !jsec["two_j"].is_number_integer())
      throw ValidationError("block_density: sector needs integer two_j");
    sec.two_j = jsec["two_j"].get<int>();
    sec.mult = jsec.value("mult", 1);
    const auto& rows = jsec.at("block");
    const int d = sec.two_j + 1;
    if (!rows.is_array() || int(rows.size()) != d)
      throw ValidationError("block_density: block row count mismatch");
    sec.block.resize(d, d);
    for (int r = 0; r < d; ++r) {
      if (!rows[r].is_array() || int(rows[r].size()) != d)
        throw ValidationError("block_density: block column count mismatch");
      for (int c = 0; c < d; ++c) sec.block(r, c) = complex_from_json(rows[r][c]);
    }
    rho.sectors.push_back(std::move(sec));
  }
  validate_density(rho, 1e-6);
  return rho;
}

json constellation_to_json(const Constellation& c) {
  json pts = json::array();
  for (const auto& p : c.points) pts.push_back(json::array({p.theta, p.phi}));
  return json{{"format", "constellation"}, {"version", 1}, {"points", pts}};
}

Constellation constellation_from_json(const json& doc) {
  require_format(doc, "constellation");
  const auto& pts = doc.at("points");
  if (!pts.is_array() || pts.empty())
    throw ValidationError("constellation: needs a nonempty points array");
  Constellation c;
  for (const auto& jp : pts) {
    if (!jp.is_array() || jp.size() != 2)
      throw ValidationError("constellation: points are [theta, phi] pairs");
    SpherePoint p{jp[0].get<double>(), jp[1].get<double>()};
    if (!std::isfinite(p.theta) || !std::isfinite(p.phi) || p.theta < 0.0 ||
        p.theta > pi)
      throw ValidationError("constellation: theta outside [0, pi]");
    c.points.push_back(p);
  }
  return c;
}

json bases_to_json(const std::vector<BasisSetting>& bases) {
  json axes = json::array();
  for (const auto& b : bases)
    axes.push_back(json::array({b.axis.x(), b.axis.y(), b.axis.z()}));
  return json{{"format", "bases"}, {"version", 1}, {"axes", axes}};
}

std::vector<BasisSetting> bases_from_json(const json& doc) {
  require_format(doc, "bases");
  const auto& axes = doc.at("axes");
  if (!axes.is_array() || axes.empty())
    throw ValidationError("bases: needs a nonempty axes array");
  std::vector<BasisSetting> bases;
  for (const auto& ja : axes) {
    if (!ja.is_array() || ja.size() != 3)
      throw ValidationError("bases: axes are [x, y, z] triples");
    Vec3 v(ja[0].get<double>(), ja[1].get<double>(), ja[2].get<double>());
    if (!v.allFinite() || v.norm() < 1e-12)
      throw ValidationError("bases: axis must be a finite nonzero vector");
    bases.push_back({v.normalized()});
  }
  return bases;
}

json reconstruction_to_json(const ReconstructionResult& r) {
  json doc{{"format", "reconstruction"},
           {"version", 1},
           {"rho", density_to_json(r.rho)},
           {"log_likelihood", r.log_likelihood},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"phi", r.phi}};
  if (r.mc.n_resamples > 0) {
    json mc{{"n_resamples", r.mc.n_resamples},
            {"n_failures", r.mc.n_failures},
            {"fidelity_std", r.mc.fidelity_std},
            {"sqcrb_std", r.mc.sqcrb_std},
            {"symmetric_population_std", r.mc.symmetric_population_std}};
    json sectors = json::array();
    for (size_t s = 0; s < r.mc.std_real.size(); ++s) {
      json re = json::array(), im = json::array();
      for (int i = 0; i < r.mc.std_real[s].rows(); ++i) {
        json rrow = json::array(), irow = json::array();
        for (int c = 0; c < r.mc.std_real[s].cols(); ++c) {
          rrow.push_back(r.mc.std_real[s](i, c));
          irow.push_back(r.mc.std_imag[s](i, c));
        }
        re.push_back(rrow);
        im.push_back(irow);
      }
      sectors.push_back(json{{"std_real", re}, {"std_imag", im}});
    }
    mc["sectors"] = sectors;
    doc["mc"] = mc;
  }
  return doc;
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw ValidationError("write failed: " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ValidationError("malformed JSON in " + path + ": " + e.what());
  }
  return doc;
}

void write_counts_csv(const std::string& path, const std::vector<CountRecord>& counts) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  out << "basis_index,outcome,count\n";
  for (const auto& c : counts)
    out << c.basis_index << ',' << c.outcome << ',' << c.count << '\n';
  if (!out) throw ValidationError("write failed: " + path);
}

std::vector<CountRecord> read_counts_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("basis_index,outcome,count", 0) != 0)
    throw ValidationError("counts CSV: bad header in " + path);
  std::vector<CountRecord> counts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    CountRecord c;
    char c1 = 0, c2 = 0;
    if (!(ss >> c.basis_index >> c1 >> c.outcome >> c2 >> c.count) || c1 != ',' ||
        c2 != ',')
      throw ValidationError("counts CSV: malformed row '" + line + "'");
    if (c.count < 0) throw ValidationError("counts CSV: negative count");
    counts.push_back(c);
  }
  return counts;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  out << text;
  if (!out) throw ValidationError("write failed: " + path);
}

}  // namespace polspin
