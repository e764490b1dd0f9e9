#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "terradeploy/harness.hpp"

namespace terradeploy {

using nlohmann::json;

namespace {

constexpr std::string_view kRunsHeader =
    "scheme,M,run,run_seed,seed,scenario_hash,p_sum,e_avg_ex,fitness,violation,feasible,error";

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Splits one CSV record starting at `pos`; advances pos past the line end.
std::vector<std::string> csv_record(std::string_view text, std::size_t& pos) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  while (pos < text.size()) {
    const char c = text[pos++];
    if (quoted) {
      if (c == '"') {
        if (pos < text.size() && text[pos] == '"') {
          fields.back() += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw std::runtime_error("runs.csv: unterminated quoted field");
  return fields;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw std::runtime_error("runs.csv line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

template <typename Int>
Int parse_int(const std::string& s, std::size_t line) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::runtime_error("runs.csv line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

json metric_stats(const std::vector<double>& v) {
  json j;
  if (v.empty()) return {{"mean", nullptr}, {"ci95", nullptr}, {"median", nullptr}};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  j["mean"] = mean;
  j["ci95"] = v.size() >= 2 ? json(confidence_interval(v, 0.95).half_width) : json(nullptr);
  j["median"] = median(v);
  return j;
}

struct Group {
  std::size_t total = 0;
  std::size_t feasible = 0;
  std::vector<double> p_sum, e_avg_ex, fitness;
};

std::map<std::pair<int, std::size_t>, Group> group(std::span<const RunRecord> records) {
  std::map<std::pair<int, std::size_t>, Group> groups;
  for (const auto& r : records) {
    Group& g = groups[{static_cast<int>(r.scheme), r.uavs}];
    ++g.total;
    if (!r.ok()) continue;
    if (r.feasible) ++g.feasible;
    g.p_sum.push_back(r.p_sum);
    g.e_avg_ex.push_back(r.e_avg_ex);
    g.fitness.push_back(r.fitness);
  }
  return groups;
}

}  // namespace

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string runs_csv(std::span<const RunRecord> records) {
  std::string out(kRunsHeader);
  out += '\n';
  for (const auto& r : records) {
    out += std::string(scheme_name(r.scheme)) + ',' + std::to_string(r.uavs) + ',' +
           std::to_string(r.run) + ',' + std::to_string(r.run_seed) + ',' +
           std::to_string(r.seed) + ',' + csv_quote(r.scenario_hash) + ',' +
           fmt_double(r.p_sum) + ',' + fmt_double(r.e_avg_ex) + ',' + fmt_double(r.fitness) +
           ',' + fmt_double(r.violation) + ',' + (r.feasible ? "1" : "0") + ',' +
           csv_quote(r.error) + '\n';
  }
  return out;
}

std::vector<RunRecord> parse_runs_csv(std::string_view text) {
  std::size_t pos = 0;
  std::size_t line = 1;
  const auto header = csv_record(text, pos);
  std::string joined;
  for (std::size_t i = 0; i < header.size(); ++i) joined += (i ? "," : "") + header[i];
  if (joined != kRunsHeader) throw std::runtime_error("runs.csv: unexpected header");
  std::vector<RunRecord> out;
  while (pos < text.size()) {
    ++line;
    const auto f = csv_record(text, pos);
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 12)
      throw std::runtime_error("runs.csv line " + std::to_string(line) + ": expected 12 fields");
    RunRecord r;
    r.scheme = parse_scheme(f[0]);
    r.uavs = parse_int<std::size_t>(f[1], line);
    r.run = parse_int<int>(f[2], line);
    r.run_seed = parse_int<std::uint64_t>(f[3], line);
    r.seed = parse_int<std::uint64_t>(f[4], line);
    r.scenario_hash = f[5];
    r.p_sum = parse_double(f[6], line);
    r.e_avg_ex = parse_double(f[7], line);
    r.fitness = parse_double(f[8], line);
    r.violation = parse_double(f[9], line);
    r.feasible = f[10] == "1";
    r.error = f[11];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_runs_csv(ss.str());
}

json summarize(std::span<const RunRecord> records) {
  json groups = json::array();
  for (const auto& [key, g] : group(records)) {
    groups.push_back({{"scheme", scheme_name(static_cast<Scheme>(key.first))},
                      {"M", key.second},
                      {"runs", g.total},
                      {"succeeded", g.p_sum.size()},
                      {"feasible", g.feasible},
                      {"p_sum", metric_stats(g.p_sum)},
                      {"e_avg_ex", metric_stats(g.e_avg_ex)},
                      {"fitness", metric_stats(g.fitness)}});
  }
  return {{"confidence_level", 0.95}, {"groups", groups}};
}

std::string curves_csv(std::span<const RunRecord> records) {
  std::string out = "scheme,M,metric,mean,ci\n";
  for (const auto& [key, g] : group(records)) {
    const std::pair<const char*, const std::vector<double>*> metrics[] = {
        {"p_sum", &g.p_sum}, {"e_avg_ex", &g.e_avg_ex}, {"fitness", &g.fitness}};
    for (const auto& [name, v] : metrics) {
      out += std::string(scheme_name(static_cast<Scheme>(key.first))) + ',' +
             std::to_string(key.second) + ',' + name + ',';
      if (v->empty()) {
        out += ",\n";
        continue;
      }
      double mean = 0.0;
      for (double x : *v) mean += x;
      mean /= static_cast<double>(v->size());
      out += fmt_double(mean) + ',' +
             (v->size() >= 2 ? fmt_double(confidence_interval(*v).half_width) : std::string()) +
             '\n';
    }
  }
  return out;
}

void emit_report(std::span<const RunRecord> records, const std::filesystem::path& out_dir,
                 bool force) {
  if (records.empty()) throw std::invalid_argument("emit_report: no records");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());
  if (!force && std::filesystem::exists(out_dir / "runs.csv"))
    throw std::runtime_error(out_dir.string() + " already holds results (use --force)");
  write_text_file(out_dir / "runs.csv", runs_csv(records));
  write_text_file(out_dir / "summary.json", dump_json(summarize(records)));
  write_text_file(out_dir / "curves.csv", curves_csv(records));
  std::string timings = "scheme,M,run,wall_seconds\n";
  for (const auto& r : records)
    timings += std::string(scheme_name(r.scheme)) + ',' + std::to_string(r.uavs) + ',' +
               std::to_string(r.run) + ',' + fmt_double(r.wall_seconds) + '\n';
  write_text_file(out_dir / "timings.csv", timings);
}

}  // namespace terradeploy
