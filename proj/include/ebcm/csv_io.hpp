#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ebcm/acquisition.hpp"
#include "ebcm/alpha_scan.hpp"
#include "ebcm/fringe_fit.hpp"

namespace ebcm {

// Every table starts with a version line "# ebcm <kind> v1" followed by the
// column header. Reals use the shortest round-trip form.

inline constexpr const char* kRecordColumns =
    "phi0_rad,protocol,set_index,counts_port0,counts_port1,darks,trials,sub_seed,"
    "trials_xm,trials_xp,counts_port0_xm,counts_port0_xp,background";
inline constexpr const char* kFitColumns =
    "protocol,context,amplitude,visibility,phase_offset_rad,sigma_amplitude,sigma_visibility,"
    "sigma_phase_rad,residual_sum,n_points,converged,phase_identifiable,visibility_above_one";
inline constexpr const char* kAlphaScanColumns = "alpha,context,model,chi2,dof,reduced_chi2,n_free";
inline constexpr const char* kSwitchColumns =
    "row,protocol,context,phi0_rad,counts_port0,trials,phase_offset_rad,visibility,shift_rad,"
    "sigma_rad,fit_ok";

/// Shortest text that reads back to the same double.
std::string format_real(double v);

void write_records(std::ostream& out, std::span<const FringeRecord> records);
/// Throws IoError on a malformed table.
std::vector<FringeRecord> read_records(std::istream& in);

struct FitRow {
  std::string protocol;
  Context context = Context::all;
  FitResult fit;
};
void write_fits(std::ostream& out, std::span<const FitRow> rows);
void write_alpha_scan(std::ostream& out, const AlphaScanResult& result);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::filesystem::path meta_path_for(const std::filesystem::path& out);

}  // namespace ebcm
