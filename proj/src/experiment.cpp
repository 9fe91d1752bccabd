#include "mbmp/experiment.hpp"

#include "mbmp/error.hpp"
#include "mbmp/guarantees.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

namespace mbmp {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

double parse_double(const std::string& key, const std::string& text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::ParseError, "bad value for " + key + ": '" + text + "'");
  }
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw Error(ErrorCode::ParseError, "bad integer for " + key + ": '" + text + "'");
  return v;
}

ArrayShape parse_shape(const std::string& token, DictionaryKind kind) {
  if (const auto x = token.find('x'); x != std::string::npos) {
    return {parse_integer("mn", token.substr(0, x)), parse_integer("mn", token.substr(x + 1))};
  }
  const long long value = parse_integer("mn", token);
  if (kind != DictionaryKind::MimoRadar) return {value, 1};
  const auto side = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(value))));
  if (side * side != value) {
    throw Error(ErrorCode::ParseError, "mn entry " + token + " is not a perfect square; write it as MxN");
  }
  return {side, side};
}

std::string method_id(const BranchVector& d) { return "mbmp[" + d.to_string() + "]"; }

}  // namespace

Index ExperimentConfig::atom_count() const {
  return dictionary == DictionaryKind::MimoRadar ? static_cast<Index>(aperture) + 1 : atoms;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, "experiment config: " + what); };
  if (trials < 1) fail("trials must be at least 1");
  if (K < 1) fail("K must be at least 1");
  if (snapshots < 1) fail("l must be at least 1");
  if (shapes.empty()) fail("no measurement configuration (mn, or M/N/m)");
  if (snr_db.empty()) fail("snr_db is empty");
  for (const auto& s : shapes) {
    if (s.M < 1 || s.N < 1) fail("array shapes must be positive");
  }
  if (dictionary == DictionaryKind::MimoRadar) {
    if (!(aperture >= 1.0) || std::floor(aperture) != aperture) fail("Z must be a positive integer");
  } else if (atoms < 1) {
    fail("n must be positive");
  }
  if (dictionary == DictionaryKind::Identity) {
    for (const auto& s : shapes) {
      if (s.rows() < atoms) fail("identity dictionaries need at least n rows");
    }
  }
  if (K >= atom_count()) fail("K must be below the number of atoms");

  if (kind == ExperimentKind::Condition) {
    if (d1_values.empty()) fail("d1 is empty");
    for (Index d : d1_values) {
      if (d < 1 || d > atom_count() - K) fail("d1 values must lie in [1, n - K]");
    }
    return;
  }
  if (branch_vectors.empty() && !music && !beamform) fail("no methods to compare");
  for (const auto& d : branch_vectors) {
    if (d.sparsity() != K) fail("branch vector " + d.to_string() + " does not have K entries");
  }
  if (music && snapshots < 2) fail("MUSIC needs l > 1");
  if (beamform && snapshots != 1) fail("beamforming needs l = 1");
  if (snr_db.size() > 1 && shapes.size() > 1) fail("sweep either snr_db or mn, not both");
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  std::map<std::string, std::string> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected key=value");
    }
    entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  ExperimentConfig cfg;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    std::string value = it->second;
    entries.erase(it);
    return value;
  };

  if (auto v = take("kind")) {
    if (*v == "condition") cfg.kind = ExperimentKind::Condition;
    else if (*v == "recovery") cfg.kind = ExperimentKind::Recovery;
    else throw Error(ErrorCode::ParseError, "kind must be condition or recovery");
  } else {
    throw Error(ErrorCode::ParseError, "missing key 'kind'");
  }
  if (auto v = take("dictionary")) {
    if (*v == "mimo") cfg.dictionary = DictionaryKind::MimoRadar;
    else if (*v == "gaussian") cfg.dictionary = DictionaryKind::Gaussian;
    else if (*v == "identity") cfg.dictionary = DictionaryKind::Identity;
    else throw Error(ErrorCode::ParseError, "dictionary must be mimo, gaussian or identity");
  }
  if (auto v = take("Z")) cfg.aperture = parse_double("Z", *v);
  if (auto v = take("n")) cfg.atoms = parse_integer("n", *v);
  if (auto v = take("K")) cfg.K = parse_integer("K", *v);
  if (auto v = take("l")) cfg.snapshots = parse_integer("l", *v);
  if (auto v = take("trials")) cfg.trials = static_cast<std::uint64_t>(parse_integer("trials", *v));
  if (auto v = take("seed")) cfg.seed = static_cast<Seed>(parse_integer("seed", *v));
  if (auto v = take("out")) cfg.out = *v;
  if (auto v = take("snr_db")) {
    cfg.snr_db.clear();
    for (const auto& t : split(*v, ',')) cfg.snr_db.push_back(parse_double("snr_db", t));
  }
  if (auto v = take("d1")) {
    cfg.d1_values.clear();
    for (const auto& t : split(*v, ',')) cfg.d1_values.push_back(parse_integer("d1", t));
  }
  if (auto v = take("branch_vectors")) {
    std::string body = *v;
    if (!body.empty() && body.front() == '[') body.erase(0, 1);
    if (!body.empty() && body.back() == ']') body.pop_back();
    for (const auto& t : split(body, '|')) cfg.branch_vectors.push_back(BranchVector::parse(t));
  }
  if (auto v = take("baselines")) {
    for (const auto& t : split(*v, ',')) {
      if (t == "music") cfg.music = true;
      else if (t == "beamform") cfg.beamform = true;
      else if (t != "none") throw Error(ErrorCode::ParseError, "unknown baseline '" + t + "'");
    }
  }

  const auto M = take("M");
  const auto N = take("N");
  const auto m = take("m");
  if (auto v = take("mn")) {
    for (const auto& t : split(*v, ',')) cfg.shapes.push_back(parse_shape(t, cfg.dictionary));
  } else if (cfg.dictionary == DictionaryKind::MimoRadar && M && N) {
    cfg.shapes.push_back({parse_integer("M", *M), parse_integer("N", *N)});
  } else if (cfg.dictionary != DictionaryKind::MimoRadar && m) {
    cfg.shapes.push_back({parse_integer("m", *m), 1});
  } else if (cfg.dictionary == DictionaryKind::Identity) {
    cfg.shapes.push_back({cfg.atoms, 1});
  }

  if (!entries.empty()) throw Error(ErrorCode::ParseError, "unknown key '" + entries.begin()->first + "'");
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  return parse_experiment_config(in);
}

Dictionary draw_dictionary(const ExperimentConfig& cfg, const ArrayShape& shape, Seed seed) {
  switch (cfg.dictionary) {
    case DictionaryKind::MimoRadar:
      return mimo_radar_dictionary(random_geometry(shape.M, shape.N, cfg.aperture, seed));
    case DictionaryKind::Gaussian:
      return gaussian_dictionary(shape.rows(), cfg.atoms, seed);
    case DictionaryKind::Identity:
      return make_dictionary(ComplexMatrix::Identity(shape.rows(), cfg.atoms));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown dictionary kind");
}

std::vector<ConditionRow> run_condition_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const double coherence_threshold = 1.0 / static_cast<double>(2 * cfg.K - 1);
  std::vector<ConditionRow> rows;
  for (std::size_t p = 0; p < cfg.shapes.size(); ++p) {
    const ArrayShape& shape = cfg.shapes[p];
    std::uint64_t coherent = 0, cumulative = 0;
    std::vector<std::uint64_t> mb(cfg.d1_values.size(), 0);
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
      const Seed trial = derive_seed(cfg.seed, p, t);
      const Dictionary A = draw_dictionary(cfg, shape, derive_seed(trial, 1));
      const Eigen::MatrixXd Q = abs_gram(A.matrix);
      if (coherence_from_gram(Q) < coherence_threshold) ++coherent;
      if (babel_from_gram(Q, cfg.K - 1) + babel_from_gram(Q, cfg.K) < 1.0) ++cumulative;
      const std::vector<double> lhs = mb_coherence_lhs(Q, cfg.K, cfg.d1_values, 1.0);
      for (std::size_t i = 0; i < lhs.size(); ++i) {
        if (lhs[i] < 2.0) ++mb[i];
      }
    }
    auto row = [&](std::string condition, std::uint64_t hits) {
      rows.push_back({shape.rows(), std::move(condition), hits, cfg.trials, wilson_interval(hits, cfg.trials)});
    };
    row("coherence", coherent);
    row("cumulative-coherence", cumulative);
    for (std::size_t i = 0; i < mb.size(); ++i) row(std::to_string(cfg.d1_values[i]), mb[i]);
  }
  return rows;
}

std::vector<RecoveryRow> run_recovery_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Point {
    ArrayShape shape;
    double snr_db;
    double param;
  };
  std::vector<Point> points;
  if (cfg.snr_db.size() > 1) {
    for (double snr : cfg.snr_db) points.push_back({cfg.shapes.front(), snr, snr});
  } else {
    for (const auto& s : cfg.shapes) points.push_back({s, cfg.snr_db.front(), static_cast<double>(s.rows())});
  }

  std::vector<std::string> methods;
  for (const auto& d : cfg.branch_vectors) methods.push_back(method_id(d));
  if (cfg.music) methods.push_back("music");
  if (cfg.beamform) methods.push_back("beamform");

  const Index n = cfg.atom_count();
  std::vector<RecoveryRow> rows;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const Point& point = points[p];
    std::vector<std::uint64_t> errors(methods.size(), 0);
    std::vector<double> elapsed_ms(methods.size(), 0.0);
    std::vector<double> nodes(methods.size(), 0.0);

    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
      const Seed trial = derive_seed(cfg.seed, p, t);
      const Dictionary A = draw_dictionary(cfg, point.shape, derive_seed(trial, 1));
      const TargetScene scene = generate_scene(n, cfg.K, cfg.snapshots, derive_seed(trial, 2));
      const ObservationSet obs = add_noise(noiseless_observations(A, scene), point.snr_db, derive_seed(trial, 3));

      for (std::size_t i = 0; i < methods.size(); ++i) {
        IndexList estimate;
        const auto start = std::chrono::steady_clock::now();
        if (i < cfg.branch_vectors.size()) {
          const RecoveryResult r = mbmp(obs.Y, A, cfg.branch_vectors[i], cfg.pursuit);
          estimate = r.support;
          nodes[i] += static_cast<double>(r.nodes_expanded);
        } else if (methods[i] == "music") {
          estimate = music_discrete(obs.Y, A, cfg.K);
        } else {
          estimate = beamform_smv(obs.Y, A, cfg.K);
        }
        elapsed_ms[i] += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (support_error(estimate, scene.support)) ++errors[i];
      }
    }
    const double trials = static_cast<double>(cfg.trials);
    for (std::size_t i = 0; i < methods.size(); ++i) {
      rows.push_back({methods[i], point.param, errors[i], cfg.trials, wilson_interval(errors[i], cfg.trials),
                      elapsed_ms[i] / trials, nodes[i] / trials});
    }
  }
  return rows;
}

std::string to_csv(const std::vector<ConditionRow>& rows) {
  std::string out = "MN;d1;prob;ci95;trials\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%lld;%s;%.6f;[%.6f,%.6f];%llu\n", static_cast<long long>(r.measurements),
                  r.condition.c_str(), r.probability(), r.ci95.lo, r.ci95.hi,
                  static_cast<unsigned long long>(r.trials));
    out += buf;
  }
  return out;
}

std::string to_csv(const std::vector<RecoveryRow>& rows) {
  std::string out = "method;param;error_prob;ci95;mean_ms;mean_nodes\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s;%g;%.6f;[%.6f,%.6f];%.4f;%.2f\n", r.method.c_str(), r.param,
                  r.error_probability(), r.ci95.lo, r.ci95.hi, r.mean_ms, r.mean_nodes);
    out += buf;
  }
  return out;
}

std::string run_experiment(const ExperimentConfig& cfg) {
  return cfg.kind == ExperimentKind::Condition ? to_csv(run_condition_sweep(cfg)) : to_csv(run_recovery_sweep(cfg));
}

}  // namespace mbmp
