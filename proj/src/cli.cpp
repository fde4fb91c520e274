#include "ghz3/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "ghz3/contradiction.hpp"
#include "ghz3/errors.hpp"

namespace ghz3::cli {

using nlohmann::json;
namespace fs = std::filesystem;

double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // no negative zero
}

namespace {

// ---- reading ----------------------------------------------------------------

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void check_object(const json& j, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail(where, "unknown key '" + key + "'");
  }
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  const auto i = v.get<std::int64_t>();
  if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) fail(where, "integer out of range");
  return static_cast<int>(i);
}

bool as_bool(const json& v, const std::string& where) {
  if (!v.is_boolean()) fail(where, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

template <typename F>
void optional_field(const json& j, const char* key, const std::string& where, F&& assign) {
  if (auto it = j.find(key); it != j.end()) assign(*it, where + "." + key);
}

void read_number(const json& j, const char* key, const std::string& where, double& target) {
  optional_field(j, key, where, [&](const json& v, const std::string& w) { target = as_number(v, w); });
}

void read_bool(const json& j, const char* key, const std::string& where, bool& target) {
  optional_field(j, key, where, [&](const json& v, const std::string& w) { target = as_bool(v, w); });
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

// Runs a validate() that reports through std::invalid_argument or MissingPair.
template <typename T>
void validated(const T& value, const std::string& where) {
  try {
    value.validate();
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  } catch (const MissingPair& e) {
    fail(where, e.what());
  }
}

std::array<PathId, 2> read_path_pair(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) fail(where, "expected two path names");
  return {PathId(as_string(v[0], where)), PathId(as_string(v[1], where))};
}

SourceAmplitudes read_amplitudes(const json& j, const std::string& where) {
  check_object(j, where, {"c0", "c1", "c2", "c0_over_c1", "c1_over_c2"});
  const bool ratios = j.contains("c0_over_c1") || j.contains("c1_over_c2");
  const bool direct = j.contains("c0") || j.contains("c1") || j.contains("c2");
  if (ratios && direct) fail(where, "give either c0/c1/c2 or the ratio form, not both");
  SourceAmplitudes a;
  if (ratios) {
    double c0_c1 = 1.0, c1_c2 = 0.0;
    read_number(j, "c0_over_c1", where, c0_c1);
    read_number(j, "c1_over_c2", where, c1_c2);
    try {
      a = SourceAmplitudes::from_ratios(c0_c1, c1_c2);
    } catch (const std::invalid_argument& e) {
      fail(where, e.what());
    }
  } else {
    read_number(j, "c0", where, a.c0);
    read_number(j, "c1", where, a.c1);
    read_number(j, "c2", where, a.c2);
  }
  validated(a, where);
  return a;
}

std::map<std::string, int> read_mirrors(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object of path -> count");
  std::map<std::string, int> out;
  for (const auto& [key, value] : j.items()) out[key] = as_int(value, where + "." + key);
  return out;
}

SorterConvention read_sorter(const json& j, const std::string& where) {
  SorterConvention c;
  optional_field(j, "routing", where, [&](const json& v, const std::string& w) {
    const auto s = as_string(v, w);
    if (s == "even_stays") c.routing = SorterConvention::Routing::kEvenStays;
    else if (s == "even_swaps") c.routing = SorterConvention::Routing::kEvenSwaps;
    else fail(w, "expected even_stays or even_swaps");
  });
  optional_field(j, "phase", where, [&](const json& v, const std::string& w) {
    const auto s = as_string(v, w);
    if (s == "real") c.phase = SorterConvention::Phase::kReal;
    else if (s == "quadrature") c.phase = SorterConvention::Phase::kQuadrature;
    else fail(w, "expected real or quadrature");
  });
  return c;
}

BeamSplitterOam read_bs_oam(const json& v, const std::string& where) {
  const auto s = as_string(v, where);
  if (s == "reflection_flips") return BeamSplitterOam::kReflectionFlips;
  if (s == "preserve") return BeamSplitterOam::kPreserve;
  fail(where, "expected reflection_flips or preserve");
}

cplx read_complex(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2) return {as_number(v[0], where), as_number(v[1], where)};
  fail(where, "expected a number or [re, im]");
}

ElementSpec read_element(const json& j, const std::string& where) {
  check_object(j, where, {"kind", "paths", "params"});
  if (!j.contains("kind")) fail(where, "missing kind");
  ElementSpec spec;
  try {
    spec.kind = element_kind_from_string(as_string(j.at("kind"), where + ".kind"));
  } catch (const std::invalid_argument& e) {
    fail(where + ".kind", e.what());
  }
  optional_field(j, "paths", where, [&](const json& v, const std::string& w) {
    if (!v.is_array()) fail(w, "expected an array of path names");
    for (const auto& p : v) spec.paths.emplace_back(as_string(p, w));
  });
  const json params = j.value("params", json::object());
  const std::string pw = where + ".params";
  switch (spec.kind) {
    case ElementKind::kSppReflect:
      check_object(params, pw, {"charge"});
      optional_field(params, "charge", pw, [&](const json& v, const std::string& w) { spec.spp_charge = as_int(v, w); });
      break;
    case ElementKind::kBeamSplitter:
      check_object(params, pw, {"reflection_flips_oam"});
      optional_field(params, "reflection_flips_oam", pw, [&](const json& v, const std::string& w) {
        spec.bs_oam = as_bool(v, w) ? BeamSplitterOam::kReflectionFlips : BeamSplitterOam::kPreserve;
      });
      break;
    case ElementKind::kParitySorter:
      check_object(params, pw, {"routing", "phase"});
      spec.sorter = read_sorter(params, pw);
      break;
    case ElementKind::kLocalUnitary:
      check_object(params, pw, {"matrix", "basis"});
      optional_field(params, "matrix", pw, [&](const json& v, const std::string& w) {
        if (!v.is_array() || v.size() != 3) fail(w, "expected a 3x3 array");
        for (int r = 0; r < 3; ++r) {
          if (!v[r].is_array() || v[r].size() != 3) fail(w, "expected a 3x3 array");
          for (int c = 0; c < 3; ++c) spec.unitary(r, c) = read_complex(v[r][c], w);
        }
      });
      optional_field(params, "basis", pw, [&](const json& v, const std::string& w) {
        if (!v.is_array() || v.size() != 3) fail(w, "expected three OAM values");
        for (int k = 0; k < 3; ++k) spec.unitary_basis[k] = as_int(v[k], w);
      });
      try {
        check_unitary(spec.unitary);
      } catch (const NotUnitary& e) {
        fail(pw + ".matrix", e.what());
      }
      break;
    case ElementKind::kMirror:
    case ElementKind::kRelabel:
      check_object(params, pw, {});
      break;
  }
  validated(spec, where);
  return spec;
}

PipelineConfig read_pipeline(const json& j) {
  const std::string where = "pipeline";
  check_object(j, where,
               {"source1", "source2", "amps1", "amps2", "source_mirrors", "detector_mirrors", "extra_elements", "sorter",
                "beam_splitter", "overlap", "include_c2", "include_cmp", "source2_enabled", "max_oam"});
  PipelineConfig cfg;
  optional_field(j, "source1", where, [&](const json& v, const std::string& w) { cfg.source1 = read_path_pair(v, w); });
  optional_field(j, "source2", where, [&](const json& v, const std::string& w) { cfg.source2 = read_path_pair(v, w); });
  optional_field(j, "amps1", where, [&](const json& v, const std::string& w) { cfg.amps1 = read_amplitudes(v, w); });
  optional_field(j, "amps2", where, [&](const json& v, const std::string& w) { cfg.amps2 = read_amplitudes(v, w); });
  optional_field(j, "source_mirrors", where,
                 [&](const json& v, const std::string& w) { cfg.source_mirrors = read_mirrors(v, w); });
  optional_field(j, "detector_mirrors", where,
                 [&](const json& v, const std::string& w) { cfg.detector_mirrors = read_mirrors(v, w); });
  optional_field(j, "extra_elements", where, [&](const json& v, const std::string& w) {
    if (!v.is_array()) fail(w, "expected an array");
    for (std::size_t i = 0; i < v.size(); ++i) cfg.extra_elements.push_back(read_element(v[i], w + "[" + std::to_string(i) + "]"));
  });
  optional_field(j, "sorter", where, [&](const json& v, const std::string& w) {
    check_object(v, w, {"routing", "phase"});
    cfg.sorter = read_sorter(v, w);
  });
  optional_field(j, "beam_splitter", where, [&](const json& v, const std::string& w) { cfg.bs_oam = read_bs_oam(v, w); });
  read_number(j, "overlap", where, cfg.overlap);
  read_bool(j, "include_c2", where, cfg.include_c2);
  read_bool(j, "include_cmp", where, cfg.include_cmp);
  read_bool(j, "source2_enabled", where, cfg.source2_enabled);
  optional_field(j, "max_oam", where, [&](const json& v, const std::string& w) { cfg.max_oam = as_int(v, w); });
  validated(cfg, where);
  return cfg;
}

SpectralModel read_spectral(const json& j) {
  const std::string where = "spectral";
  check_object(j, where, {"sigma_f_hz", "sigma_p_hz", "length_m", "delta_inv_gv_s_per_m", "lambda_c_m", "include_pump"});
  SpectralModel m;
  read_number(j, "sigma_f_hz", where, m.sigma_f);
  read_number(j, "sigma_p_hz", where, m.sigma_p);
  read_number(j, "length_m", where, m.length);
  read_number(j, "delta_inv_gv_s_per_m", where, m.delta_inv_gv);
  read_number(j, "lambda_c_m", where, m.lambda_c);
  read_bool(j, "include_pump", where, m.include_pump);
  validated(m, where);
  return m;
}

DipSettings read_dip(const json& j) {
  const std::string where = "dip";
  check_object(j, where, {"baseline", "width_m", "center_m"});
  DipSettings d;
  read_number(j, "baseline", where, d.baseline);
  read_number(j, "width_m", where, d.width_m);
  read_number(j, "center_m", where, d.center_m);
  if (!(d.baseline >= 0.0) || !std::isfinite(d.baseline)) fail(where, "baseline must be non-negative");
  if (!(d.width_m > 0.0) || !std::isfinite(d.width_m)) fail(where, "width_m must be positive");
  if (!std::isfinite(d.center_m)) fail(where, "center_m must be finite");
  return d;
}

NoiseParams read_noise(const json& j) {
  const std::string where = "noise";
  check_object(j, where, {"p", "c", "alpha", "beta", "gamma"});
  NoiseParams n;
  read_number(j, "p", where, n.p);
  read_number(j, "c", where, n.c);
  read_number(j, "alpha", where, n.alpha);
  read_number(j, "beta", where, n.beta);
  read_number(j, "gamma", where, n.gamma);
  validated(n, where);
  return n;
}

RateFile read_rates(const json& j, const std::string& where) {
  check_object(j, where, {"rep_rate_hz", "tau_int_s", "eta", "singles", "pairs", "fourfold_observed", "pair_rate_hz"});
  RateFile r;
  read_number(j, "rep_rate_hz", where, r.model.rep_rate);
  read_number(j, "tau_int_s", where, r.model.tau_int);
  read_number(j, "eta", where, r.model.eta);
  optional_field(j, "singles", where, [&](const json& v, const std::string& w) {
    if (!v.is_object()) fail(w, "expected an object of detector -> counts");
    for (const auto& [key, value] : v.items()) {
      if (key.size() != 1) fail(w, "detector names are single letters");
      r.model.singles[key[0]] = as_number(value, w + "." + key);
    }
  });
  optional_field(j, "pairs", where, [&](const json& v, const std::string& w) {
    if (!v.is_object()) fail(w, "expected an object of pair -> counts");
    for (const auto& [key, value] : v.items()) {
      if (key.size() != 2) fail(w, "pair names have two letters");
      r.model.pairs[pair_key(key[0], key[1])] = as_number(value, w + "." + key);
    }
  });
  optional_field(j, "fourfold_observed", where, [&](const json& v, const std::string& w) {
    r.fourfold_observed = as_number(v, w);
    if (!(*r.fourfold_observed >= 0.0)) fail(w, "must be non-negative");
  });
  optional_field(j, "pair_rate_hz", where, [&](const json& v, const std::string& w) {
    r.pair_rate_hz = as_number(v, w);
    if (!(*r.pair_rate_hz >= 0.0)) fail(w, "must be non-negative");
  });
  validated(r.model, where);
  return r;
}

// ---- writing ----------------------------------------------------------------

json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round12(v);
}

json complex_json(cplx z) { return json::array({num(z.real()), num(z.imag())}); }

std::string csv_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", round12(v));
  return buf;
}

json state_json(const PhotonicState& s) {
  json terms = json::array();
  for (const auto& [occ, amp] : s.terms()) {
    json modes = json::array();
    for (const auto& m : occ) modes.push_back({{"path", m.path.name}, {"oam", m.oam}, {"tag", m.tag}});
    terms.push_back({{"modes", modes}, {"amplitude", complex_json(amp)}});
  }
  return terms;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
  os << text;
  if (!os) throw std::runtime_error("write failed for " + file.string());
}

void write_json(const fs::path& file, const json& j) { write_text(file, j.dump(2) + "\n"); }

void prepare(const fs::path& out) { fs::create_directories(out); }

std::string digits(const std::array<int, 3>& d) {
  return std::to_string(d[0]) + std::to_string(d[1]) + std::to_string(d[2]);
}

std::string read_file(const fs::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw ConfigError("cannot read config file " + file.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

RunConfig parse_run_config(std::string_view text) {
  const json j = parse_json(text);
  check_object(j, "config", {"pipeline", "spectral", "dip", "noise", "rates", "seed"});
  RunConfig cfg;
  if (j.contains("pipeline")) cfg.pipeline = read_pipeline(j["pipeline"]);
  if (j.contains("spectral")) cfg.spectral = read_spectral(j["spectral"]);
  if (j.contains("dip")) cfg.dip = read_dip(j["dip"]);
  if (j.contains("noise")) cfg.noise = read_noise(j["noise"]);
  if (j.contains("rates")) cfg.rates = read_rates(j["rates"], "rates");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("config.seed", "expected a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  return cfg;
}

RateFile parse_rate_file(std::string_view text) { return read_rates(parse_json(text), "rates"); }

// ---- commands -----------------------------------------------------------------

void cmd_simulate(const RunConfig& cfg, const fs::path& out) {
  prepare(out);
  const PipelineResult res = run_pipeline(cfg.pipeline);
  const auto& pc = cfg.pipeline;

  write_json(out / "state.json", {{"four_photon", state_json(res.four_photon)},
                                  {"pre_cmp", state_json(res.pre_cmp)},
                                  {"a_state", state_json(res.a_state)},
                                  {"bcd_state", state_json(res.bcd_state)}});

  json report;
  report["probability"] = {{"fourfold", num(res.fourfold_probability)},
                           {"cmp", num(res.cmp_probability)},
                           {"total", num(res.probability)}};
  report["factorization_fidelity"] = num(res.factorization_fidelity);
  report["factorized"] = !res.four_photon.empty() && factorization_check(res);

  report["fidelity"] = nullptr;
  report["srv"] = nullptr;
  report["ghz_weights"] = nullptr;
  report["relabeling"] = nullptr;
  report["relabeling_error"] = nullptr;
  const std::array<PathId, 3> parties{pc.source1[1], pc.source2[0], pc.source2[1]};
  try {
    const GhzRelabeling relabel = derive_relabeling(res.bcd_state, parties);
    PartyBasis basis;
    basis.paths = parties;
    const StateVector psi = state_vector(relabel.apply_to(res.bcd_state), basis);
    report["fidelity"] = num(fidelity(DensityMatrix::pure(psi), ideal_ghz()));
    const auto ranks = srv(psi);
    report["srv"] = json(ranks);
    report["ghz_weights"] = json::array({num(std::abs(psi(0))), num(std::abs(psi(13))), num(std::abs(psi(26)))});
    json parties_json = json::array();
    for (const auto& p : relabel.parties) {
      json phases = json::array();
      for (const auto& ph : p.phase) phases.push_back(complex_json(ph));
      parties_json.push_back({{"path", p.path.name}, {"oam", json(p.oam)}, {"phase", phases}});
    }
    report["relabeling"] = parties_json;
  } catch (const std::invalid_argument& e) {
    report["relabeling_error"] = e.what();
  } catch (const UnsupportedMode& e) {
    report["relabeling_error"] = e.what();
  }

  const TermClassification cls = classify_terms(pc);
  json combos = json::array();
  for (const auto& c : cls.combos) {
    combos.push_back({{"first", to_string(c.first)},
                      {"second", to_string(c.second)},
                      {"verdict", to_string(c.verdict)},
                      {"hom_involved", c.hom_involved},
                      {"cmp_blocked", c.cmp_blocked},
                      {"probability_identical", num(c.probability_identical)},
                      {"probability_distinguishable", num(c.probability_distinguishable)}});
  }
  report["classification"] = {{"combos", combos},
                              {"survives", cls.count(Verdict::kSurvives)},
                              {"parity_blocked", cls.count(Verdict::kParityBlocked)},
                              {"cross_blocked", cls.count(Verdict::kCrossBlocked)}};
  write_json(out / "report.json", report);
}

void cmd_hom(const RunConfig& cfg, const HomRange& range, const fs::path& out) {
  if (!std::isfinite(range.x_min) || !std::isfinite(range.x_max) || !(range.x_min < range.x_max)) {
    throw ConfigError("hom: need finite x-min < x-max");
  }
  if (range.steps < 2) throw ConfigError("hom: x-steps must be at least 2");
  prepare(out);
  const SpectralModel& m = cfg.spectral;
  const double gvm = m.gvm_width();
  DipModel dip{cfg.dip.baseline, visibility(m.sigma_f, gvm), cfg.dip.width_m, cfg.dip.center_m};

  std::vector<double> xs;
  for (int i = 0; i < range.steps; ++i) {
    xs.push_back(range.x_min + (range.x_max - range.x_min) * i / (range.steps - 1));
  }
  std::string csv = "x_m,rate\n";
  double floor = std::numeric_limits<double>::infinity();
  for (const auto& s : dip_curve(dip, xs)) {
    csv += csv_num(s.x) + "," + csv_num(s.rate) + "\n";
    floor = std::min(floor, s.rate);
  }
  write_text(out / "dip.csv", csv);

  json quadrature = nullptr;
  try {
    quadrature = num(p4_visibility(m));
  } catch (const QuadratureNotConverged&) {
  }
  write_json(out / "hom_report.json", {{"visibility", num(dip.visibility)},
                                       {"visibility_quadrature", quadrature},
                                       {"sigma_f_hz", num(m.sigma_f)},
                                       {"sigma_gvm_hz", num(gvm)},
                                       {"gvm_bandwidth_m", num(bandwidth_to_wavelength(gvm, m.lambda_c))},
                                       {"baseline", num(dip.baseline)},
                                       {"width_m", num(dip.width)},
                                       {"center_m", num(dip.center)},
                                       {"floor_rate", num(floor)},
                                       {"x_min", num(range.x_min)},
                                       {"x_max", num(range.x_max)},
                                       {"x_steps", range.steps}});
}

void cmd_witness(const RunConfig& cfg, std::int64_t events, const fs::path& out) {
  if (events < 0) throw ConfigError("witness: events must be non-negative");
  prepare(out);
  const DensityMatrix rho = noise_model(cfg.noise);
  const MeasurementPlan plan = witness_plan();
  const bool sample = events > 0;
  // Expected counts stand in for infinite statistics; the scale is irrelevant.
  const double total = sample ? static_cast<double>(events) : 1e6;
  const auto records = simulate_counts(rho, plan, total, cfg.seed, sample);
  const StateVector target = ideal_ghz();
  const FidelityEstimate est = estimate_fidelity(records, target, sample ? 1000 : 0, derive_seed(cfg.seed, 1));
  const double f_max = witness_bound(target);

  write_json(out / "witness.json", {{"F", num(est.fidelity)},
                                    {"sigma_F", num(est.sigma)},
                                    {"F_max", num(f_max)},
                                    {"pass", est.fidelity > f_max},
                                    {"events", events},
                                    {"seed", cfg.seed},
                                    {"settings", plan.settings.size()}});

  std::string elements = "row,col,re,im\n";
  for (int k = 0; k < kDim; ++k) {
    const auto d = digits(basis_digits(k));
    elements += d + "," + d + "," + csv_num(est.populations[static_cast<std::size_t>(k)]) + ",0\n";
  }
  for (const auto& e : est.coherences) {
    elements += digits(e.row) + "," + digits(e.col) + "," + csv_num(e.value.real()) + "," + csv_num(e.value.imag()) + "\n";
  }
  write_text(out / "elements.csv", elements);

  std::string counts = "projB,projC,projD,counts,duration_s\n";
  for (const auto& r : records) {
    const auto& k = r.projector.kets;
    counts += k[0].descriptor + "," + k[1].descriptor + "," + k[2].descriptor + "," + csv_num(r.counts) + "," +
              csv_num(r.duration_s) + "\n";
  }
  write_text(out / "counts.csv", counts);
}

void cmd_mermin(const RunConfig& cfg, const fs::path& out) {
  prepare(out);
  const QutritOperators ops = build_operators(0);
  const Eigen::MatrixXcd op = mermin_operator(ops);
  const LrEnumeration lr = lr_enumerate();
  json values = json::array();
  for (const auto& v : lr.distinct_values) values.push_back({{"a", v.a()}, {"b", v.b()}});
  write_json(out / "mermin.json",
             {{"quantum_value", num(quantum_expectation(op, DensityMatrix::pure(ideal_ghz())).real())},
              {"lr_max_modulus", num(std::sqrt(static_cast<double>(lr.max_modulus_sq)))},
              {"lr_max_modulus_sq", lr.max_modulus_sq},
              {"lr_max_real", num(static_cast<double>(lr.max_twice_real) / 2.0)},
              {"assignments", lr.count},
              {"distinct_value_count", lr.distinct_values.size()},
              {"distinct_values", values},
              {"noise_expectation", num(noise_expectation(cfg.noise))},
              {"noise_trace", num(quantum_expectation(op, noise_model(cfg.noise)).real())},
              {"branch", ops.branch}});
}

void cmd_counts(const RateFile& rates, const fs::path& out) {
  prepare(out);
  const CountsReport rep = analyze_rates(rates.model);
  json acc = json::object();
  for (const auto& [k, v] : rep.acc_pairs) acc[k] = num(v);
  json j{{"p4_predicted", num(rep.p4_predicted)},
         {"acc_pairs", acc},
         {"acc_fourfold", num(rep.acc_fourfold)},
         {"corrected", nullptr},
         {"mean_photon_number", nullptr},
         {"higher_order_ratio", nullptr}};
  if (rates.fourfold_observed) j["corrected"] = num(subtract(*rates.fourfold_observed, rep.acc_fourfold));
  if (rates.pair_rate_hz) {
    const double mu = mean_photon_number(*rates.pair_rate_hz, rates.model.eta, rates.model.rep_rate);
    j["mean_photon_number"] = num(mu);
    j["higher_order_ratio"] = num(higher_order_ratio(mu, rates.model.eta));
  }
  write_json(out / "counts.json", j);
}

// ---- entry point ----------------------------------------------------------------

int run(int argc, const char* const* argv) {
  CLI::App app{"Three-qutrit GHZ simulator"};
  app.name("ghz3");
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::int64_t events = 1652;
  HomRange range;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "random seed (overrides the config)");
  };
  auto* simulate = app.add_subcommand("simulate", "propagate the sources and report the output state");
  auto* hom = app.add_subcommand("hom", "four-photon dip curve");
  auto* witness = app.add_subcommand("witness", "simulated fidelity witness run");
  auto* mermin = app.add_subcommand("mermin", "Mermin operator and local-realistic bounds");
  auto* counts = app.add_subcommand("counts", "predicted and accidental coincidences from a rate file");
  for (auto* sub : {simulate, hom, witness, mermin, counts}) add_common(sub);
  counts->get_option("--config")->required();
  witness->add_option("--events", events, "total four-fold events; 0 for infinite statistics")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  hom->add_option("--x-min", range.x_min, "first delay position (m)")->capture_default_str();
  hom->add_option("--x-max", range.x_max, "last delay position (m)")->capture_default_str();
  hom->add_option("--x-steps", range.steps, "number of positions")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const fs::path out(out_dir);
    if (counts->parsed()) {
      const std::string text = read_file(config_path);
      const json j = parse_json(text);
      const RateFile rates = j.is_object() && j.contains("rates") ? parse_run_config(text).rates.value()
                                                                  : parse_rate_file(text);
      cmd_counts(rates, out);
      return 0;
    }
    RunConfig cfg = config_path.empty() ? RunConfig{} : parse_run_config(read_file(config_path));
    for (auto* sub : {simulate, hom, witness, mermin}) {
      if (sub->parsed() && sub->count("--seed") > 0) cfg.seed = seed;
    }
    if (simulate->parsed()) cmd_simulate(cfg, out);
    if (hom->parsed()) cmd_hom(cfg, range, out);
    if (witness->parsed()) cmd_witness(cfg, events, out);
    if (mermin->parsed()) cmd_mermin(cfg, out);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ghz3::cli
