#include "rsirs/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rsirs/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rsirs {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t hash) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    hash ^= p[i];
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::uint64_t hash_channels(const ChannelSet& ch) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& v : ch.direct) h = fnv1a(v.data(), sizeof(std::complex<double>) * v.size(), h);
  h = fnv1a(ch.bs_to_irs.data(), sizeof(std::complex<double>) * ch.bs_to_irs.size(), h);
  for (const auto& v : ch.irs_to_user) {
    h = fnv1a(v.data(), sizeof(std::complex<double>) * v.size(), h);
  }
  for (const auto& m : ch.cascade) h = fnv1a(m.data(), sizeof(std::complex<double>) * m.size(), h);
  h = fnv1a(&ch.noise_power_w, sizeof(double), h);
  return h;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

constexpr const char* kCsvHeader =
    "drop_id,scheme,qos_bps,weighted_power_dbm,unweighted_power_dbm,outer_iters,feasible,"
    "wall_time_s,channel_hash";

OptResult run_scheme(const std::string& scheme, const ChannelSet& channels,
                     const SystemConfig& config, Rng& rng) {
  if (scheme == "rs_irs") return alternating_optimize(channels, config, rng, {}, "rs_irs");
  if (scheme == "rs_noirs") return run_no_irs_rs(channels, config, rng);
  if (scheme == "tin_irs") return run_tin(channels, config, true, rng);
  if (scheme == "tin_noirs") return run_tin(channels, config, false, rng);
  throw std::invalid_argument("unknown scheme: " + scheme);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(drops >= 1, "drops must be >= 1");
  require(!sweep_qos_bps.empty(), "sweep must be non-empty");
  require(!schemes.empty(), "schemes must be non-empty");
  for (double q : sweep_qos_bps) require(q >= 0.0, "qos values must be >= 0");
  for (const auto& s : schemes) {
    require(std::find(kAllSchemes.begin(), kAllSchemes.end(), s) != kAllSchemes.end(),
            "unknown scheme: " + s);
  }
  require(!output_path.empty(), "output path must be set");
  SystemConfig probe = system;
  probe.qos_min_bps.assign(probe.n_users, sweep_qos_bps.front());
  probe.power_weights.assign(probe.n_users, 1.0);
  probe.validate();
}

double watts_to_dbm(double watts) {
  if (watts <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(watts * 1000.0);
}

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  char hashbuf[32];
  for (const auto& r : rows) {
    std::snprintf(hashbuf, sizeof(hashbuf), "%016llx",
                  static_cast<unsigned long long>(r.channel_hash));
    out += std::to_string(r.drop_id);
    out += ',';
    out += r.scheme;
    out += ',';
    out += format_double(r.qos_bps);
    out += ',';
    out += format_double(r.weighted_power_dbm);
    out += ',';
    out += format_double(r.unweighted_power_dbm);
    out += ',';
    out += std::to_string(r.outer_iterations);
    out += ',';
    out += r.feasible ? '1' : '0';
    out += ',';
    out += format_double(r.wall_time_s);
    out += ',';
    out += hashbuf;
    out += '\n';
  }
  return out;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  require(static_cast<bool>(std::getline(ss, line)), "empty CSV");
  require(line == kCsvHeader, "unexpected CSV header");
  std::vector<ResultRow> rows;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    require(fields.size() == 9, "bad CSV row: " + line);
    ResultRow r;
    r.drop_id = std::stoi(fields[0]);
    r.scheme = fields[1];
    r.qos_bps = std::strtod(fields[2].c_str(), nullptr);
    r.weighted_power_dbm = std::strtod(fields[3].c_str(), nullptr);
    r.unweighted_power_dbm = std::strtod(fields[4].c_str(), nullptr);
    r.outer_iterations = std::stoi(fields[5]);
    r.feasible = fields[6] == "1";
    r.wall_time_s = std::strtod(fields[7].c_str(), nullptr);
    r.channel_hash = std::stoull(fields[8], nullptr, 16);
    rows.push_back(std::move(r));
  }
  return rows;
}

const SummaryTable::Cell* SummaryTable::find_cell(const std::string& scheme, double qos_bps) const {
  for (const auto& c : cells) {
    if (c.scheme == scheme && c.qos_bps == qos_bps) return &c;
  }
  return nullptr;
}

std::string SummaryTable::to_string() const {
  std::ostringstream os;
  os << "scheme          qos_mbps   n  feas  mean_dbm  dbm_per_mbps\n";
  for (const auto& c : cells) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-14s %9.3f %3d %5d %9.3f %13.3f\n", c.scheme.c_str(),
                  c.qos_bps / 1e6, c.n_total, c.n_feasible, c.mean_weighted_dbm,
                  c.mean_dbm_per_mbps);
    os << line;
  }
  for (const auto& s : savings) {
    char line[320];
    std::snprintf(line, sizeof(line),
                  "qos %.3f Mbps: irs saving (tin) %.3f dB, irs saving (rs) %.3f dB, rs saving "
                  "(no-irs) %.3f dB, rs saving (irs) %.3f dB, combined %.3f dB, synergy %.3f dB\n",
                  s.qos_bps / 1e6, s.irs_saving_tin_db, s.irs_saving_rs_db, s.rs_saving_noirs_db,
                  s.rs_saving_irs_db, s.combined_saving_db, s.synergy_db);
    os << line;
  }
  for (const auto& [scheme, rate] : feasibility_rate) {
    os << "feasibility " << scheme << ": " << rate << "\n";
  }
  for (const auto& [scheme, slope] : slope_dbm_per_mbps) {
    os << "slope " << scheme << ": " << slope << " dBm/Mbps\n";
  }
  return os.str();
}

SummaryTable summarize(const std::vector<ResultRow>& rows) {
  require(!rows.empty(), "summarize needs at least one row");
  SummaryTable table;

  std::vector<double> qos_points;
  std::vector<std::string> schemes;
  for (const auto& r : rows) {
    if (std::find(qos_points.begin(), qos_points.end(), r.qos_bps) == qos_points.end()) {
      qos_points.push_back(r.qos_bps);
    }
    if (std::find(schemes.begin(), schemes.end(), r.scheme) == schemes.end()) {
      schemes.push_back(r.scheme);
    }
  }
  std::sort(qos_points.begin(), qos_points.end());

  auto row_of = [&](int drop, const std::string& scheme, double qos) -> const ResultRow* {
    for (const auto& r : rows) {
      if (r.drop_id == drop && r.scheme == scheme && r.qos_bps == qos) return &r;
    }
    return nullptr;
  };

  for (const auto& scheme : schemes) {
    int total = 0, feas = 0;
    for (double q : qos_points) {
      SummaryTable::Cell cell;
      cell.scheme = scheme;
      cell.qos_bps = q;
      double sum_dbm = 0.0;
      for (const auto& r : rows) {
        if (r.scheme != scheme || r.qos_bps != q) continue;
        ++cell.n_total;
        ++total;
        if (r.feasible) {
          ++cell.n_feasible;
          ++feas;
          sum_dbm += r.weighted_power_dbm;
        }
      }
      cell.mean_weighted_dbm = cell.n_feasible > 0 ? sum_dbm / cell.n_feasible : 0.0;
      cell.mean_dbm_per_mbps = q > 0.0 ? cell.mean_weighted_dbm / (q / 1e6) : 0.0;
      table.cells.push_back(cell);
    }
    table.feasibility_rate[scheme] = total > 0 ? static_cast<double>(feas) / total : 0.0;

    // Least-squares slope of the per-qos mean dBm against qos in Mbps.
    if (qos_points.size() >= 2) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int n = 0;
      for (double q : qos_points) {
        const auto* cell = table.find_cell(scheme, q);
        if (cell == nullptr || cell->n_feasible == 0) continue;
        const double x = q / 1e6, y = cell->mean_weighted_dbm;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
      }
      if (n >= 2 && n * sxx - sx * sx > 0.0) {
        table.slope_dbm_per_mbps[scheme] = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      }
    }
  }

  // Pairwise savings from drops where both schemes are feasible.
  std::vector<int> drop_ids;
  for (const auto& r : rows) {
    if (std::find(drop_ids.begin(), drop_ids.end(), r.drop_id) == drop_ids.end()) {
      drop_ids.push_back(r.drop_id);
    }
  }
  auto paired_mean_diff = [&](const std::string& a, const std::string& b, double qos,
                              double& out) -> bool {
    double sum = 0.0;
    int n = 0;
    for (int d : drop_ids) {
      const ResultRow* ra = row_of(d, a, qos);
      const ResultRow* rb = row_of(d, b, qos);
      if (ra == nullptr || rb == nullptr || !ra->feasible || !rb->feasible) continue;
      sum += ra->weighted_power_dbm - rb->weighted_power_dbm;
      ++n;
    }
    if (n == 0) return false;
    out = sum / n;
    return true;
  };

  for (double q : qos_points) {
    SummaryTable::Savings s;
    s.qos_bps = q;
    const bool a = paired_mean_diff("tin_noirs", "tin_irs", q, s.irs_saving_tin_db);
    const bool b = paired_mean_diff("rs_noirs", "rs_irs", q, s.irs_saving_rs_db);
    const bool c = paired_mean_diff("tin_noirs", "rs_noirs", q, s.rs_saving_noirs_db);
    const bool d = paired_mean_diff("tin_irs", "rs_irs", q, s.rs_saving_irs_db);
    const bool e = paired_mean_diff("tin_noirs", "rs_irs", q, s.combined_saving_db);
    if (a && c && e) s.synergy_db = s.combined_saving_db - (s.irs_saving_tin_db + s.rs_saving_noirs_db);
    if (a || b || c || d || e) table.savings.push_back(s);
  }
  return table;
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  config.validate();

  // Fail on an unwritable output before any solve.
  {
    std::ofstream probe(config.output_path, std::ios::trunc);
    if (!probe.good()) throw std::runtime_error("cannot write output: " + config.output_path);
  }

#ifdef _OPENMP
  if (config.threads > 0) omp_set_num_threads(config.threads);
#endif

  const int nq = static_cast<int>(config.sweep_qos_bps.size());
  const int ns = static_cast<int>(config.schemes.size());
  const Rng root(config.seed);

  std::vector<ResultRow> rows(static_cast<std::size_t>(config.drops) * nq * ns);
  const par::Exec exec = config.threads == 1 ? par::Exec::Serial : par::Exec::OpenMP;

  par::for_each_dynamic(static_cast<std::size_t>(config.drops), exec, [&](std::size_t d) {
    Rng drop_rng = root.stream(d);
    Rng channel_rng = drop_rng.stream(0);

    SystemConfig base = config.system;
    base.rng_seed = config.seed;
    base.qos_min_bps.assign(base.n_users, config.sweep_qos_bps.front());
    base.power_weights.assign(base.n_users, 1.0);

    const Topology topology = sample_topology(base, channel_rng);
    const ChannelSet channels = sample_channels(base, topology, channel_rng);
    std::vector<double> alpha(base.n_users);
    for (int k = 0; k < base.n_users; ++k) alpha[k] = channel_rng.uniform(1.0, 2.0);
    const std::uint64_t chash = hash_channels(channels);

    for (int qi = 0; qi < nq; ++qi) {
      for (int si = 0; si < ns; ++si) {
        SystemConfig run_config = base;
        run_config.qos_min_bps.assign(base.n_users, config.sweep_qos_bps[qi]);
        run_config.power_weights = alpha;
        Rng run_rng = drop_rng.stream(1 + static_cast<std::uint64_t>(qi) * 64 + si);

        const auto start = std::chrono::steady_clock::now();
        const OptResult res =
            run_scheme(config.schemes[si], channels, run_config, run_rng);
        const auto end = std::chrono::steady_clock::now();

        ResultRow row;
        row.drop_id = static_cast<int>(d);
        row.scheme = config.schemes[si];
        row.qos_bps = config.sweep_qos_bps[qi];
        row.weighted_power_dbm = watts_to_dbm(total_power(res.omega, run_config.power_weights));
        row.unweighted_power_dbm = watts_to_dbm(
            total_power(res.omega, std::vector<double>(base.n_users, 1.0)));
        row.outer_iterations = res.outer_iterations;
        row.feasible = res.feasible;
        row.wall_time_s = config.zero_walltime
                              ? 0.0
                              : std::chrono::duration<double>(end - start).count();
        row.channel_hash = chash;
        rows[(d * nq + qi) * ns + si] = std::move(row);
      }
    }
  });

  ExperimentOutput out;
  out.rows = std::move(rows);
  out.csv_path = config.output_path;
  {
    std::ofstream file(config.output_path, std::ios::trunc);
    if (!file.good()) throw std::runtime_error("cannot write output: " + config.output_path);
    file << format_csv(out.rows);
  }
  out.summary = summarize(out.rows);
  return out;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream file(path);
  if (!file.good()) throw std::runtime_error("cannot read config: " + path);
  nlohmann::json doc;
  file >> doc;

  ExperimentConfig config;
  for (const auto& [key, value] : doc.items()) {
    if (key == "system") {
      for (const auto& [skey, svalue] : value.items()) {
        if (skey == "n_bs") {
          config.system.n_bs = svalue.get<int>();
        } else if (skey == "antennas_per_bs") {
          config.system.antennas_per_bs = svalue.get<int>();
        } else if (skey == "n_users") {
          config.system.n_users = svalue.get<int>();
        } else if (skey == "n_reflect") {
          config.system.n_reflect = svalue.get<int>();
        } else if (skey == "bandwidth_hz") {
          config.system.bandwidth_hz = svalue.get<double>();
        } else if (skey == "noise_dbm_per_hz") {
          config.system.noise_dbm_per_hz = svalue.get<double>();
        } else if (skey == "decode_group_max") {
          config.system.decode_group_max = svalue.get<int>();
        } else if (skey == "n_randomizations") {
          config.system.n_randomizations = svalue.get<int>();
        } else if (skey == "penalty_tradeoff") {
          config.system.penalty_tradeoff = svalue.get<double>();
        } else if (skey == "sca_step") {
          config.system.sca_step = svalue.get<double>();
        } else if (skey == "stop_epsilon") {
          config.system.stop_epsilon = svalue.get<double>();
        } else if (skey == "max_outer_iters") {
          config.system.max_outer_iters = svalue.get<int>();
        } else if (skey == "area_halfwidth_m") {
          config.system.area_halfwidth_m = svalue.get<double>();
        } else {
          throw std::invalid_argument("unknown config key: system." + skey);
        }
      }
    } else if (key == "sweep_qos_bps") {
      config.sweep_qos_bps = value.get<std::vector<double>>();
    } else if (key == "drops") {
      config.drops = value.get<int>();
    } else if (key == "schemes") {
      config.schemes = value.get<std::vector<std::string>>();
    } else if (key == "output") {
      config.output_path = value.get<std::string>();
    } else if (key == "seed") {
      config.seed = value.get<std::uint64_t>();
    } else if (key == "threads") {
      config.threads = value.get<int>();
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  return config;
}

}  // namespace rsirs
