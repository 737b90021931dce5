#include "qcdma/experiment.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qcdma/codes.hpp"
#include "qcdma/parallel.hpp"

namespace qcdma {
namespace {

std::string normalize_key(std::string_view key) {
  std::string k(key);
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw std::invalid_argument("invalid value for '" + std::string(key) + "': '" + std::string(value) +
                              "' (expected " + std::string(expected) + ")");
}

template <typename Int>
Int parse_integer(std::string_view key, std::string_view value) {
  value = trim(value);
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value, "an integer");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  value = trim(value);
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "true or false");
}

std::vector<std::string> split_list(std::string_view value) {
  std::string cleaned(value);
  for (char& c : cleaned) {
    if (c == '[' || c == ']' || c == ',') c = ' ';
  }
  std::istringstream in(cleaned);
  std::vector<std::string> items;
  for (std::string item; in >> item;) items.push_back(item);
  return items;
}

std::vector<int> parse_int_list(std::string_view key, std::string_view value) {
  std::vector<int> out;
  for (const auto& item : split_list(value)) out.push_back(parse_integer<int>(key, item));
  if (out.empty()) bad_value(key, value, "a non-empty list of integers");
  return out;
}

template <typename Parser>
auto parse_enum(std::string_view key, std::string_view value, Parser parser) {
  try {
    return parser(trim(value));
  } catch (const std::invalid_argument&) {
    bad_value(key, value, "a known option");
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string scientific(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

void write_header(std::ostream& os, const ExperimentSpec& spec) {
  os << "# qcdma " << to_json(spec).dump() << '\n';
}

nlohmann::json result_json(const MetricResult& r) {
  return {{"S", r.spreading_factor}, {"N", r.users},     {"metric", r.name()}, {"mean", r.mean},
          {"stderr", r.standard_error}, {"trials", r.trials}, {"seed", r.seed}};
}

void write_results(std::ostream& os, const ExperimentSpec& spec, const std::vector<MetricResult>& results) {
  switch (spec.format) {
    case OutputFormat::csv:
      write_header(os, spec);
      os << "S,N,metric,mean,stderr,trials,seed\n";
      for (const auto& r : results) {
        os << r.spreading_factor << ',' << r.users << ',' << r.name() << ',' << format_double(r.mean) << ','
           << format_double(r.standard_error) << ',' << r.trials << ',' << r.seed << '\n';
      }
      break;
    case OutputFormat::json: {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : results) rows.push_back(result_json(r));
      os << nlohmann::json{{"spec", to_json(spec)}, {"results", rows}}.dump(2) << '\n';
      break;
    }
    case OutputFormat::text: {
      write_header(os, spec);
      // Rows are metric rows (spreading factor or state), columns are user counts.
      std::vector<std::string> row_keys;
      for (const auto& r : results) {
        std::string key = r.state ? r.name() : "S = 2^" + std::to_string(std::bit_width(
                                                              static_cast<unsigned>(r.spreading_factor))) +
                                                   " - 1";
        if (r.state) key += " (S=" + std::to_string(r.spreading_factor) + ")";
        if (std::find(row_keys.begin(), row_keys.end(), key) == row_keys.end()) row_keys.push_back(key);
      }
      std::vector<int> cols;
      for (const auto& r : results) {
        if (std::find(cols.begin(), cols.end(), r.users) == cols.end()) cols.push_back(r.users);
      }
      char cell[64];
      std::snprintf(cell, sizeof cell, "%-32s", results.empty() ? "" : results.front().name().c_str());
      os << cell;
      for (int n : cols) {
        std::snprintf(cell, sizeof cell, "%14s", ("N = " + std::to_string(n)).c_str());
        os << cell;
      }
      os << '\n';
      for (const auto& key : row_keys) {
        std::snprintf(cell, sizeof cell, "%-32s", key.c_str());
        os << cell;
        for (int n : cols) {
          std::string value = "-";
          for (const auto& r : results) {
            std::string rk = r.state ? r.name() + " (S=" + std::to_string(r.spreading_factor) + ")"
                                     : "S = 2^" +
                                           std::to_string(std::bit_width(static_cast<unsigned>(r.spreading_factor))) +
                                           " - 1";
            if (rk == key && r.users == n) {
              value = r.metric == Metric::infidelity ? scientific(r.mean) : fixed4(r.mean);
            }
          }
          std::snprintf(cell, sizeof cell, "%14s", value.c_str());
          os << cell;
        }
        os << '\n';
      }
      break;
    }
  }
}

void check_large(const ExperimentSpec& spec, int n) {
  if (n > 15 && !spec.allow_large) {
    throw std::invalid_argument("n = " + std::to_string(n) + " exceeds 15; pass --allow-large to run it");
  }
}

bool run_code_check(const ExperimentSpec& spec, std::ostream& os) {
  bool ok = true;
  nlohmann::json entries = nlohmann::json::array();
  if (spec.format != OutputFormat::json) write_header(os, spec);
  if (spec.format == OutputFormat::csv) os << "n,i,j,correlation\n";
  for (int n : spec.exponents) {
    check_large(spec, n);
    const LfsrSpec lfsr = LfsrSpec::canonical(n);
    const Code base = generate_mseq(lfsr);
    const int s = base.length();
    const Eigen::MatrixXi corr = correlation_matrix(lfsr);
    const int diag_min = corr.diagonal().minCoeff();
    const int diag_max = corr.diagonal().maxCoeff();
    Eigen::MatrixXi off = corr;
    off.diagonal().setConstant(-1);
    const int off_min = off.minCoeff();
    const int off_max = off.maxCoeff();
    const bool identities = diag_min == s && diag_max == s && off_min == -1 && off_max == -1 &&
                            std::abs(base.chips().sum()) == 1 && lfsr_period(lfsr) == s;
    ok = ok && identities;

    switch (spec.format) {
      case OutputFormat::text:
        os << "n = " << n << ", S = " << s << ", taps = {";
        for (std::size_t t = 0; t < lfsr.taps.size(); ++t) os << (t ? "," : "") << lfsr.taps[t];
        os << "}, period = " << lfsr_period(lfsr) << ", balance = " << base.chips().sum() << '\n';
        if (s <= 127) {
          for (int i = 0; i < s; ++i) {
            for (int j = 0; j < s; ++j) os << (j ? " " : "") << corr(i, j);
            os << '\n';
          }
        }
        os << "diagonal: " << diag_min << ".." << diag_max << ", off-diagonal: " << off_min << ".." << off_max
           << (identities ? " [ok]" : " [FAILED]") << '\n';
        break;
      case OutputFormat::csv:
        for (int i = 0; i < s; ++i) {
          for (int j = 0; j < s; ++j) os << n << ',' << i << ',' << j << ',' << corr(i, j) << '\n';
        }
        break;
      case OutputFormat::json: {
        nlohmann::json e{{"n", n},           {"S", s},
                         {"taps", lfsr.taps}, {"period", lfsr_period(lfsr)},
                         {"balance", base.chips().sum()}, {"diagonal", {diag_min, diag_max}},
                         {"off_diagonal", {off_min, off_max}}, {"ok", identities}};
        if (s <= 127) {
          std::vector<std::vector<int>> rows(static_cast<std::size_t>(s));
          for (int i = 0; i < s; ++i) {
            for (int j = 0; j < s; ++j) rows[static_cast<std::size_t>(i)].push_back(corr(i, j));
          }
          e["matrix"] = rows;
        }
        entries.push_back(e);
        break;
      }
    }
  }
  if (spec.format == OutputFormat::json) os << nlohmann::json{{"spec", to_json(spec)}, {"codes", entries}}.dump(2) << '\n';
  return ok;
}

void run_codes(const ExperimentSpec& spec, std::ostream& os) {
  nlohmann::json all = nlohmann::json::array();
  if (spec.format != OutputFormat::json) write_header(os, spec);
  for (int n : spec.exponents) {
    check_large(spec, n);
    const LfsrSpec lfsr = LfsrSpec::canonical(n);
    const int count = std::min(spec.users.front(), (1 << n) - 1);
    const CodeFamily family = build_family(lfsr, count);
    for (int u = 0; u < count; ++u) {
      const Code& code = family.members[static_cast<std::size_t>(u)];
      if (spec.format == OutputFormat::json) {
        all.push_back(code_to_json(code, lfsr));
      } else {
        os << "# n=" << n << " user=" << u + 1 << " shift=" << code.shift() << '\n';
        write_code_text(os, code);
      }
    }
  }
  if (spec.format == OutputFormat::json) os << nlohmann::json{{"spec", to_json(spec)}, {"codes", all}}.dump(2) << '\n';
}

void run_density(const ExperimentSpec& spec, std::ostream& os) {
  nlohmann::json traces = nlohmann::json::array();
  if (spec.format != OutputFormat::json) write_header(os, spec);
  for (int n : spec.exponents) {
    check_large(spec, n);
    for (int users : spec.users) {
      const NetworkConfig config = spec.network(n, users);
      const auto bits = trace_bits(spec, users);
      const DensityTrace trace = photon_number_density(propagate(config, bits, spec.seed));
      const TimeGrid& grid = trace.grid;

      std::vector<std::string> bit_text;
      for (const auto& row : bits) {
        std::string s;
        for (int b : row) s += static_cast<char>('0' + b);
        bit_text.push_back(s);
      }
      switch (spec.format) {
        case OutputFormat::csv: {
          for (int k = 0; k < users; ++k) {
            os << "# bin_integrals n=" << n << " N=" << users << " channel=" << k + 1 << " bits=" << bit_text[k];
            for (int b = 0; b < grid.bins; ++b) os << ' ' << format_double(trace.bin_integrals(k, b));
            os << '\n';
          }
          os << "n,N,t";
          for (int k = 0; k < users; ++k) os << ",channel_" << k + 1;
          os << '\n';
          for (Eigen::Index i = 0; i < grid.size(); i += spec.stride) {
            os << n << ',' << users << ',' << format_double(grid.time(i));
            for (int k = 0; k < users; ++k) os << ',' << format_double(trace.channels[k][i]);
            os << '\n';
          }
          break;
        }
        case OutputFormat::text: {
          os << "n = " << n << ", N = " << users << " (bin integrals per channel)\n";
          for (int k = 0; k < users; ++k) {
            os << "channel " << k + 1 << " bits " << bit_text[k] << ':';
            for (int b = 0; b < grid.bins; ++b) os << ' ' << fixed4(trace.bin_integrals(k, b));
            os << '\n';
          }
          break;
        }
        case OutputFormat::json: {
          nlohmann::json channels = nlohmann::json::array();
          for (int k = 0; k < users; ++k) {
            std::vector<double> integrals(static_cast<std::size_t>(grid.bins));
            for (int b = 0; b < grid.bins; ++b) integrals[static_cast<std::size_t>(b)] = trace.bin_integrals(k, b);
            std::vector<double> samples;
            for (Eigen::Index i = 0; i < grid.size(); i += spec.stride) samples.push_back(trace.channels[k][i]);
            channels.push_back({{"channel", k + 1}, {"bits", bit_text[k]}, {"bin_integrals", integrals},
                                {"density", samples}});
          }
          traces.push_back({{"n", n}, {"S", config.spreading_factor()}, {"N", users},
                            {"dt", grid.dt() * spec.stride}, {"channels", channels}});
          break;
        }
      }
    }
  }
  if (spec.format == OutputFormat::json) os << nlohmann::json{{"spec", to_json(spec)}, {"traces", traces}}.dump(2) << '\n';
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::loss_table: return "loss-table";
    case ExperimentKind::crosstalk_table: return "crosstalk-table";
    case ExperimentKind::fidelity_table: return "fidelity-table";
    case ExperimentKind::density_trace: return "density-trace";
    case ExperimentKind::code_check: return "code-check";
    case ExperimentKind::codes: return "codes";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (auto kind : {ExperimentKind::loss_table, ExperimentKind::crosstalk_table, ExperimentKind::fidelity_table,
                    ExperimentKind::density_trace, ExperimentKind::code_check, ExperimentKind::codes}) {
    if (normalize_key(text) == normalize_key(to_string(kind))) return kind;
  }
  throw std::invalid_argument("unknown experiment '" + std::string(text) + "'");
}

std::string_view to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::text: return "text-table";
  }
  return "?";
}

OutputFormat parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  if (text == "text" || text == "text-table") return OutputFormat::text;
  throw std::invalid_argument("unknown output format '" + std::string(text) + "'");
}

void ExperimentSpec::validate() const {
  if (exponents.empty()) throw std::invalid_argument("the n sweep list is empty");
  if (users.empty()) throw std::invalid_argument("the users sweep list is empty");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (runs < 1) throw std::invalid_argument("runs must be at least 1");
  if (stride < 1) throw std::invalid_argument("stride must be at least 1");
  if (states.empty()) throw std::invalid_argument("the state list is empty");
  for (int n : exponents) {
    if (n < 2 || n > 20) throw std::invalid_argument("n must lie in [2, 20]");
    if (n > 15 && !allow_large) {
      throw std::invalid_argument("n = " + std::to_string(n) + " exceeds 15; pass --allow-large to run it");
    }
  }
  for (int u : users) {
    if (u < 1) throw std::invalid_argument("users must be at least 1");
  }
  if (!bits.empty()) {
    for (const auto& s : bits) {
      if (static_cast<int>(s.size()) != bits_per_user || s.find_first_not_of("01") != std::string::npos) {
        throw std::invalid_argument("bit string '" + s + "' must hold bits_per_user characters of 0/1");
      }
    }
  }
}

NetworkConfig ExperimentSpec::network(int exponent, int user_count) const {
  NetworkConfig c;
  c.users = user_count;
  c.exponent = exponent;
  c.samples_per_chip = samples_per_chip;
  c.bits_per_user = bits_per_user;
  c.filter_rule = filter_rule;
  c.topology = topology;
  c.in_phase = in_phase;
  c.validate();
  return c;
}

nlohmann::json to_json(const ExperimentSpec& s) {
  std::vector<std::string> states;
  for (auto l : s.states) states.emplace_back(to_string(l));
  return {{"experiment", to_string(s.kind)},
          {"n", s.exponents},
          {"users", s.users},
          {"trials", s.trials},
          {"runs", s.runs},
          {"bits_per_user", s.bits_per_user},
          {"bits", s.bits},
          {"seed", s.seed},
          {"samples_per_chip", s.samples_per_chip},
          {"filter_rule", to_string(s.filter_rule)},
          {"background", to_string(s.background)},
          {"topology", to_string(s.topology)},
          {"states", states},
          {"in_phase", s.in_phase},
          {"allow_large", s.allow_large},
          {"stride", s.stride},
          {"format", to_string(s.format)}};
}

void apply_setting(ExperimentSpec& spec, std::string_view raw_key, std::string_view value) {
  const std::string key = normalize_key(trim(raw_key));
  value = trim(value);
  if (key == "experiment") {
    spec.kind = parse_enum(key, value, parse_experiment_kind);
  } else if (key == "n") {
    spec.exponents = parse_int_list(key, value);
  } else if (key == "users") {
    spec.users = parse_int_list(key, value);
  } else if (key == "trials") {
    spec.trials = parse_integer<int>(key, value);
  } else if (key == "runs") {
    spec.runs = parse_integer<int>(key, value);
  } else if (key == "bits_per_user") {
    spec.bits_per_user = parse_integer<int>(key, value);
  } else if (key == "bits") {
    spec.bits = split_list(value);
    if (!spec.bits.empty()) spec.bits_per_user = static_cast<int>(spec.bits.front().size());
  } else if (key == "seed") {
    spec.seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "samples_per_chip") {
    spec.samples_per_chip = parse_integer<int>(key, value);
  } else if (key == "filter_rule") {
    spec.filter_rule = parse_enum(key, value, parse_filter_rule);
  } else if (key == "background") {
    spec.background = parse_enum(key, value, parse_background);
  } else if (key == "topology") {
    spec.topology = parse_enum(key, value, parse_topology);
  } else if (key == "states") {
    std::vector<TimeBinLabel> states;
    for (const auto& item : split_list(value)) states.push_back(parse_enum(key, item, parse_timebin_label));
    if (states.empty()) bad_value(key, value, "a non-empty list of states");
    spec.states = states;
  } else if (key == "in_phase") {
    spec.in_phase = parse_bool(key, value);
  } else if (key == "allow_large") {
    spec.allow_large = parse_bool(key, value);
  } else if (key == "stride") {
    spec.stride = parse_integer<int>(key, value);
  } else if (key == "format") {
    spec.format = parse_enum(key, value, parse_output_format);
  } else if (key == "out") {
    spec.out = std::string(value);
  } else {
    throw std::invalid_argument("unknown key '" + std::string(trim(raw_key)) + "'");
  }
}

ExperimentSpec parse_config(std::istream& in) {
  ExperimentSpec spec;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto sep = view.find_first_of(":=");
    if (sep == std::string_view::npos) {
      throw std::invalid_argument("line " + std::to_string(number) + ": expected 'key: value'");
    }
    apply_setting(spec, view.substr(0, sep), view.substr(sep + 1));
  }
  return spec;
}

ExperimentSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path.string() + "'");
  return parse_config(in);
}

std::vector<std::vector<int>> trace_bits(const ExperimentSpec& spec, int users) {
  std::vector<std::vector<int>> bits(static_cast<std::size_t>(users),
                                     std::vector<int>(static_cast<std::size_t>(spec.bits_per_user), 0));
  if (!spec.bits.empty()) {
    if (static_cast<int>(spec.bits.size()) != users) {
      throw std::invalid_argument("got " + std::to_string(spec.bits.size()) + " bit strings for " +
                                  std::to_string(users) + " users");
    }
    for (int u = 0; u < users; ++u) {
      for (int b = 0; b < spec.bits_per_user; ++b) bits[u][b] = spec.bits[u][b] == '1' ? 1 : 0;
    }
    return bits;
  }
  Rng rng = trial_rng(spec.seed, 1);
  std::bernoulli_distribution coin(0.5);
  for (auto& row : bits) {
    for (auto& b : row) b = coin(rng) ? 1 : 0;
  }
  return bits;
}

bool run_experiment(const ExperimentSpec& spec, std::ostream& out) {
  spec.validate();
  switch (spec.kind) {
    case ExperimentKind::code_check: return run_code_check(spec, out);
    case ExperimentKind::codes: run_codes(spec, out); return true;
    case ExperimentKind::density_trace: run_density(spec, out); return true;
    case ExperimentKind::loss_table:
    case ExperimentKind::crosstalk_table: {
      std::vector<MetricResult> results;
      for (int n : spec.exponents) {
        for (int users : spec.users) {
          const NetworkConfig config = spec.network(n, users);
          results.push_back(spec.kind == ExperimentKind::loss_table
                                ? photon_loss_probability(config, spec.trials, spec.seed)
                                : crosstalk_probability(config, spec.runs, spec.seed));
        }
      }
      write_results(out, spec, results);
      return true;
    }
    case ExperimentKind::fidelity_table: {
      std::vector<MetricResult> results;
      for (int n : spec.exponents) {
        for (int users : spec.users) {
          const auto sweep =
              state_fidelity_sweep(spec.network(n, users), spec.states, spec.trials, spec.seed, spec.background);
          for (const auto& r : sweep) {
            results.push_back(r.fidelity);
            results.push_back(r.infidelity);
          }
        }
      }
      write_results(out, spec, results);
      return true;
    }
  }
  return false;
}

}  // namespace qcdma
