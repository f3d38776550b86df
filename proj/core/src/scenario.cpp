#include "gridhop/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gridhop {

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::indirect: return "indirect";
    case Algorithm::direct: return "direct";
    case Algorithm::hop: return "hop";
  }
  throw std::invalid_argument("unknown algorithm");
}

Algorithm algorithm_from_name(std::string_view name) {
  if (name == "indirect") return Algorithm::indirect;
  if (name == "direct") return Algorithm::direct;
  if (name == "hop") return Algorithm::hop;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                              "' (valid: indirect, direct, hop)");
}

namespace {

struct Line {
  int no;
  std::string key;
  std::vector<std::string> values;
};

[[noreturn]] void fail(const std::string& origin, int line_no,
                       const std::string& message) {
  throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": " +
                              message);
}

double parse_num(const std::string& origin, int line_no, const std::string& tok) {
  size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(tok, &used);
  } catch (const std::exception&) {
    fail(origin, line_no, "expected a number, got '" + tok + "'");
  }
  if (used != tok.size())
    fail(origin, line_no, "expected a number, got '" + tok + "'");
  return value;
}

int parse_int(const std::string& origin, int line_no, const std::string& tok) {
  const double v = parse_num(origin, line_no, tok);
  if (v != std::floor(v) || std::abs(v) > 2.0e9)
    fail(origin, line_no, "expected an integer, got '" + tok + "'");
  return static_cast<int>(v);
}

Vec2 parse_pair(const std::string& origin, const Line& l) {
  if (l.values.size() != 2)
    fail(origin, l.no, "'" + l.key + "' expects two numbers");
  return {parse_num(origin, l.no, l.values[0]),
          parse_num(origin, l.no, l.values[1])};
}

double parse_scalar(const std::string& origin, const Line& l) {
  if (l.values.size() != 1)
    fail(origin, l.no, "'" + l.key + "' expects one number");
  return parse_num(origin, l.no, l.values[0]);
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  Scenario sc;
  sc.geom.rx.clear();
  bool have_tx = false, have_origin = false, have_extent = false;
  bool have_thresholds = false;

  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string key;
    if (!(ls >> key)) continue;

    std::string eq;
    if (!(ls >> eq) || eq != "=")
      fail(origin, line_no, "expected 'key = value...'");
    Line l{line_no, key, {}};
    std::string tok;
    while (ls >> tok) l.values.push_back(tok);
    if (l.values.empty()) fail(origin, line_no, "'" + key + "' has no value");

    if (key == "f0") sc.cfg.f0 = parse_scalar(origin, l);
    else if (key == "bandwidth") sc.cfg.bandwidth = parse_scalar(origin, l);
    else if (key == "chirp_duration") sc.cfg.chirp_duration = parse_scalar(origin, l);
    else if (key == "n_chirps") sc.cfg.n_chirps = parse_int(origin, line_no, l.values[0]);
    else if (key == "n_samples") sc.cfg.n_samples = parse_int(origin, line_no, l.values[0]);
    else if (key == "c") sc.cfg.c = parse_scalar(origin, l);
    else if (key == "tx") { sc.geom.tx = parse_pair(origin, l); have_tx = true; }
    else if (key == "rx") sc.geom.rx.push_back(parse_pair(origin, l));
    else if (key == "grid_origin") { sc.grid_origin = parse_pair(origin, l); have_origin = true; }
    else if (key == "grid_extent") { sc.grid_extent = parse_pair(origin, l); have_extent = true; }
    else if (key == "speed_bound") sc.speed_bound = parse_scalar(origin, l);
    else if (key == "velocity_density") sc.velocity_density = parse_scalar(origin, l);
    else if (key == "mode") {
      if (l.values.size() != 1 || (l.values[0] != "offgrid" && l.values[0] != "ongrid"))
        fail(origin, line_no, "'mode' must be 'offgrid' or 'ongrid'");
      sc.mode = l.values[0] == "ongrid" ? SceneMode::ongrid : SceneMode::offgrid;
    } else if (key == "snr_db") {
      sc.snr_db.clear();
      for (const std::string& v : l.values) {
        if (v == "none")
          sc.snr_db.push_back(std::nullopt);
        else
          sc.snr_db.push_back(parse_num(origin, line_no, v));
      }
    } else if (key == "densities") {
      sc.densities.clear();
      for (const std::string& v : l.values)
        sc.densities.push_back(parse_num(origin, line_no, v));
    } else if (key == "thresholds") {
      sc.thresholds_m.clear();
      for (const std::string& v : l.values)
        sc.thresholds_m.push_back(parse_num(origin, line_no, v));
      have_thresholds = true;
    } else if (key == "trials") {
      sc.trials = parse_int(origin, line_no, l.values[0]);
    } else if (key == "frames") {
      sc.frames = parse_int(origin, line_no, l.values[0]);
    } else if (key == "seed") {
      const double v = parse_num(origin, line_no, l.values[0]);
      if (v < 0.0 || v != std::floor(v))
        fail(origin, line_no, "'seed' must be a nonnegative integer");
      sc.seed = static_cast<uint64_t>(v);
    } else if (key == "algorithms") {
      sc.algorithms.clear();
      for (const std::string& v : l.values) {
        try {
          sc.algorithms.push_back(algorithm_from_name(v));
        } catch (const std::invalid_argument& e) {
          fail(origin, line_no, e.what());
        }
      }
    } else if (key == "scheme") {
      try {
        sc.scheme = scheme_from_name(l.values[0]);
      } catch (const std::invalid_argument& e) {
        fail(origin, line_no, e.what());
      }
    } else if (key == "oversample") {
      sc.os_range = parse_int(origin, line_no, l.values[0]);
    } else if (key == "doppler_oversample") {
      sc.os_doppler = parse_int(origin, line_no, l.values[0]);
    } else if (key == "timing") {
      const std::string& v = l.values[0];
      if (v == "on" || v == "true") sc.timing = true;
      else if (v == "off" || v == "false") sc.timing = false;
      else fail(origin, line_no, "'timing' must be 'on' or 'off'");
    } else {
      fail(origin, line_no, "unknown key '" + key + "'");
    }
  }

  if (!have_tx) throw std::invalid_argument(origin + ": missing 'tx'");
  if (sc.geom.rx.empty()) throw std::invalid_argument(origin + ": missing 'rx'");
  if (!have_origin) throw std::invalid_argument(origin + ": missing 'grid_origin'");
  if (!have_extent) throw std::invalid_argument(origin + ": missing 'grid_extent'");
  if (!have_thresholds)
    for (int i = 1; i <= 15; ++i)
      sc.thresholds_m.push_back(0.2 * static_cast<double>(i));

  sc.cfg.validate();
  sc.geom.validate();
  if (sc.trials < 1) throw std::invalid_argument(origin + ": 'trials' must be >= 1");
  if (sc.frames < 1) throw std::invalid_argument(origin + ": 'frames' must be >= 1");
  if (sc.os_range < 1 || sc.os_doppler < 1)
    throw std::invalid_argument(origin + ": oversampling must be >= 1");
  if (sc.grid_extent.x() <= 0.0 || sc.grid_extent.y() <= 0.0)
    throw std::invalid_argument(origin + ": 'grid_extent' must be positive");
  if (sc.speed_bound <= 0.0)
    throw std::invalid_argument(origin + ": 'speed_bound' must be positive");
  if (sc.velocity_density <= 0.0)
    throw std::invalid_argument(origin + ": 'velocity_density' must be positive");
  if (sc.snr_db.empty())
    throw std::invalid_argument(origin + ": 'snr_db' must not be empty");
  for (const auto& s : sc.snr_db)
    if (s && !std::isfinite(*s))
      throw std::invalid_argument(origin + ": 'snr_db' must be finite or 'none'");
  if (sc.densities.empty())
    throw std::invalid_argument(origin + ": 'densities' must not be empty");
  for (double d : sc.densities)
    if (!(d > 0.0))
      throw std::invalid_argument(origin + ": densities must be positive");
  if (sc.algorithms.empty())
    throw std::invalid_argument(origin + ": 'algorithms' must not be empty");
  if (sc.thresholds_m.empty())
    throw std::invalid_argument(origin + ": 'thresholds' must not be empty");
  for (size_t i = 0; i < sc.thresholds_m.size(); ++i) {
    if (!(sc.thresholds_m[i] > 0.0))
      throw std::invalid_argument(origin + ": thresholds must be positive");
    if (i > 0 && sc.thresholds_m[i] <= sc.thresholds_m[i - 1])
      throw std::invalid_argument(origin + ": thresholds must ascend");
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument(path + ": cannot open scenario file");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_scenario(buf.str(), path);
}

}  // namespace gridhop
