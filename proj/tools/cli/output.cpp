#include "cli/output.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <system_error>

#include "ghzperc/error.hpp"

namespace ghzperc::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string rate_csv(const RateTable& table) {
  std::ostringstream out;
  out << "axis,axis_value,p,q,n,k,mu,distance,width,height,trials,rate,stderr,region\n";
  for (const auto& row : table) {
    const auto& e = row.estimate;
    out << to_string(row.axis) << ',' << format_double(row.axis_value) << ','
        << format_double(e.params.p) << ',' << format_double(e.params.q) << ',' << e.params.n << ','
        << e.params.k << ',' << format_double(e.params.mu) << ',' << e.distance << ',' << row.width
        << ',' << row.height << ',' << e.trials << ',' << format_double(e.mean_rate) << ','
        << format_double(e.std_error) << ',' << row.region << '\n';
  }
  return out.str();
}

std::string boundary_csv(const std::vector<CriticalBoundary>& curves, int width, int height,
                         std::uint64_t trials) {
  std::ostringstream out;
  out << "q,p_c,err,k,mu,n,width,height,trials\n";
  for (const auto& c : curves)
    for (const auto& pt : c.points)
      out << format_double(pt.q) << ',' << format_double(pt.p_c) << ',' << format_double(pt.err)
          << ',' << c.k << ',' << format_double(c.mu) << ',' << c.n << ',' << width << ','
          << height << ',' << trials << '\n';
  return out.str();
}

nlohmann::ordered_json rate_row_json(const RateRow& row) {
  const auto& e = row.estimate;
  nlohmann::ordered_json j;
  j["axis"] = to_string(row.axis);
  j["axis_value"] = row.axis_value;
  j["p"] = e.params.p;
  j["q"] = e.params.q;
  j["n"] = e.params.n;
  j["k"] = e.params.k;
  j["mu"] = std::isinf(e.params.mu) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(e.params.mu);
  j["distance"] = e.distance;
  j["width"] = row.width;
  j["height"] = row.height;
  j["trials"] = e.trials;
  j["rate"] = e.mean_rate;
  j["stderr"] = e.std_error;
  return j;
}

nlohmann::ordered_json optimal_k_json(const OptimalK& result) {
  nlohmann::ordered_json j;
  j["k_star"] = result.k_star;
  j["table"] = nlohmann::ordered_json::array();
  for (const auto& row : result.table) j["table"].push_back(rate_row_json(row));
  return j;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot move output into '" + path.string() + "'");
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace ghzperc::cli
