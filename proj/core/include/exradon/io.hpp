#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "exradon/laplace.hpp"
#include "exradon/moment_recursion.hpp"
#include "exradon/transform.hpp"

namespace exradon {

/// FNV-1a 64-bit content hash, hex encoded.
std::string fnv1a64_hex(const std::string& data);

/// Writes via a temp file plus rename, so readers never observe partial files.
void write_file_atomic(const std::string& path, const std::string& content);

/// CSV: header `theta_rad,p,value,mask,err_estimate`, row-major theta then p,
/// 17 significant digits.
std::string sinogram_csv(const Sinogram& s);

/// CSV: `k,theta_rad,p,value,origin,err_budget` (valid cells only).
std::string moment_table_csv(const MomentTable& t);

std::string discrepancy_report_json(double max_abs, double max_rel, int cells_checked,
                                    double tolerance, bool pass);
std::string convolution_report_json(const ConvolutionReport& r);
std::string helgason_report_json(const HelgasonReport& r);
std::string recovery_report_json(const RecoveryReport& r);
std::string laplace_report_json(const std::vector<LaplaceReportEntry>& entries,
                                const MomentList& moments, MomentVerdict verdict);
std::string probe_report_json(const ScanProbeReport& r);

/// Self-contained SVG heat map of the sinogram (one rect per cell).
std::string sinogram_svg(const Sinogram& s);

/// Self-contained SVG polyline chart: one series per entry of `ys` over xs.
std::string polyline_svg(const std::vector<double>& xs,
                         const std::vector<std::pair<std::string, std::vector<double>>>& series,
                         const std::string& x_label, const std::string& y_label);

struct ManifestEntry {
  std::string path;
  size_t bytes = 0;
  std::string hash;
};

std::string manifest_json(const std::string& command, std::uint64_t seed,
                          const std::vector<ManifestEntry>& files);

}  // namespace exradon
