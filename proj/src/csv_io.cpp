#include "ebcm/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ebcm/errors.hpp"

namespace ebcm {

std::string format_real(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& s, int line_no) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError("records line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

void write_records(std::ostream& out, std::span<const FringeRecord> records) {
  out << "# ebcm records v1\n" << kRecordColumns << '\n';
  for (const auto& r : records) {
    out << format_real(r.phi0) << ',' << r.protocol.tag() << ',' << r.set_index << ','
        << r.counts_port0 << ',' << r.counts_port1 << ',' << r.darks_recorded << ',' << r.trials
        << ',' << r.seed << ',' << r.trials_by_x[0] << ',' << r.trials_by_x[1] << ','
        << r.counts_port0_by_x[0] << ',' << r.counts_port0_by_x[1] << ',' << r.background << '\n';
  }
}

std::vector<FringeRecord> read_records(std::istream& in) {
  std::vector<FringeRecord> out;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::vector<double> phases;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kRecordColumns) throw IoError("records table has an unexpected header");
      header_seen = true;
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != 13) {
      throw IoError("records line " + std::to_string(line_no) + ": expected 13 columns");
    }
    FringeRecord r;
    r.phi0 = parse_number<double>(cells[0], line_no);
    auto protocol = PhaseProtocol::parse(cells[1]);
    if (!protocol) throw IoError("records line " + std::to_string(line_no) + ": bad protocol");
    r.protocol = *protocol;
    r.set_index = parse_number<int>(cells[2], line_no);
    r.counts_port0 = parse_number<std::int64_t>(cells[3], line_no);
    r.counts_port1 = parse_number<std::int64_t>(cells[4], line_no);
    r.darks_recorded = parse_number<std::int64_t>(cells[5], line_no);
    r.trials = parse_number<std::int64_t>(cells[6], line_no);
    r.seed = parse_number<std::uint64_t>(cells[7], line_no);
    r.trials_by_x = {parse_number<std::int64_t>(cells[8], line_no),
                     parse_number<std::int64_t>(cells[9], line_no)};
    r.counts_port0_by_x = {parse_number<std::int64_t>(cells[10], line_no),
                           parse_number<std::int64_t>(cells[11], line_no)};
    r.background = parse_number<std::int64_t>(cells[12], line_no);

    auto it = std::find(phases.begin(), phases.end(), r.phi0);
    r.phi0_index = static_cast<int>(it - phases.begin());
    if (it == phases.end()) phases.push_back(r.phi0);
    out.push_back(r);
  }
  if (!header_seen) throw IoError("records table has no header");
  return out;
}

void write_fits(std::ostream& out, std::span<const FitRow> rows) {
  out << "# ebcm fit v1\n" << kFitColumns << '\n';
  for (const auto& row : rows) {
    const auto& f = row.fit;
    out << row.protocol << ',' << context_tag(row.context) << ',' << format_real(f.amplitude)
        << ',' << format_real(f.visibility) << ',' << format_real(f.phase_offset) << ','
        << format_real(f.sigma[0]) << ',' << format_real(f.sigma[1]) << ','
        << format_real(f.sigma[2]) << ',' << format_real(f.residual_sum) << ',' << f.n_points
        << ',' << int{f.converged} << ',' << int{f.phase_identifiable} << ','
        << int{f.visibility_above_one} << '\n';
  }
}

void write_alpha_scan(std::ostream& out, const AlphaScanResult& result) {
  out << "# ebcm alpha-scan v1\n" << kAlphaScanColumns << '\n';
  for (const auto& row : result.rows) {
    const bool qm = std::isnan(row.alpha);
    out << (qm ? "" : format_real(row.alpha)) << ',' << context_tag(row.context) << ','
        << (qm ? "QM" : "EBCM") << ',' << format_real(row.report.chi2) << ',' << row.report.dof
        << ',' << format_real(row.report.reduced_chi2) << ',' << row.report.n_free << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::filesystem::path meta_path_for(const std::filesystem::path& out) {
  std::filesystem::path p = out;
  p += ".meta.json";
  return p;
}

}  // namespace ebcm
