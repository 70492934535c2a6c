// Copyright 2026 The paritysim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "paritysim/analysis.hpp"
#include "paritysim/pointer_fields.hpp"
#include "paritysim/sme.hpp"

namespace paritysim {

/// Shortest round-trip decimal form, locale-independent.  All CSV/JSON
/// output goes through here so reruns are byte-identical.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kEven:
      return "even";
    case Outcome::kOdd:
      return "odd";
    default:
      return "inconclusive";
  }
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  return out;
}

}  // namespace detail

inline void write_json_file(const std::filesystem::path& path,
                            const nlohmann::json& j) {
  auto out = detail::open_output(path);
  out << j.dump(2) << '\n';
}

/// Grid-point pointer trajectories, one row per (t, label).
inline void write_pointer_csv(const std::filesystem::path& path,
                              const PointerTable& table) {
  auto out = detail::open_output(path);
  out << "t,label,re_alpha,im_alpha,re_beta,im_beta,re_sigma,im_sigma\n";
  for (std::size_t k = 0; k <= table.steps(); ++k) {
    const std::string t = format_double(table.t[k]);
    for (int l = 0; l < 8; ++l) {
      out << t << ',' << l << ',' << format_double(table.alpha[l][k].real())
          << ',' << format_double(table.alpha[l][k].imag()) << ','
          << format_double(table.beta[l][k].real()) << ','
          << format_double(table.beta[l][k].imag()) << ','
          << format_double(table.sigma_out[l][k].real()) << ','
          << format_double(table.sigma_out[l][k].imag()) << '\n';
    }
  }
}

inline void write_scan_surface_csv(const std::filesystem::path& path,
                                   const ScanReport& report) {
  auto out = detail::open_output(path);
  out << "kappa,delta,label,re_sigma,im_sigma\n";
  for (const auto& pt : report.surface) {
    const std::string kappa = format_double(pt.kappa);
    const std::string delta = format_double(pt.delta);
    for (int l = 0; l < 8; ++l)
      out << kappa << ',' << delta << ',' << l << ','
          << format_double(pt.sigma[l].real()) << ','
          << format_double(pt.sigma[l].imag()) << '\n';
  }
}

inline void write_scan_locus_csv(const std::filesystem::path& path,
                                 const ScanReport& report) {
  auto out = detail::open_output(path);
  out << "kappa,delta,full_coincidence\n";
  for (const auto& pt : report.locus)
    out << format_double(pt.kappa) << ',' << format_double(pt.delta) << ','
        << (pt.full_coincidence ? 1 : 0) << '\n';
}

/// One row per trajectory: integrated signal, thresholded outcome, final
/// state diagnostics.
inline void write_records_csv(const std::filesystem::path& path,
                              const std::vector<TrajectoryRecord>& records,
                              const PureState& psi_plus,
                              const PureState& psi_minus, double s_th,
                              int sign_cal) {
  auto out = detail::open_output(path);
  out << "index,seed,s,outcome,true_parity,overlap_plus,overlap_minus,"
         "min_eigenvalue,max_trace_drift\n";
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& rec = records[k];
    const auto cls = classify(rec.s, s_th, sign_cal);
    const double op =
        (psi_plus.adjoint() * rec.final_state * psi_plus)(0, 0).real();
    const double om =
        (psi_minus.adjoint() * rec.final_state * psi_minus)(0, 0).real();
    out << k << ',' << rec.seed << ',' << format_double(rec.s) << ','
        << outcome_name(cls.label) << ','
        << dominant_parity(rec.final_state) << ',' << format_double(op) << ','
        << format_double(om) << ','
        << format_double(rec.diagnostics.min_eigenvalue) << ','
        << format_double(rec.diagnostics.max_trace_drift) << '\n';
  }
}

inline void write_histogram_csv(const std::filesystem::path& path,
                                const HistogramBins& hist) {
  auto out = detail::open_output(path);
  out << "bin_left,bin_right,count_even_true,count_odd_true\n";
  for (std::size_t i = 0; i + 1 < hist.edges.size(); ++i)
    out << format_double(hist.edges[i]) << ','
        << format_double(hist.edges[i + 1]) << ',' << hist.count_even[i]
        << ',' << hist.count_odd[i] << '\n';
}

inline void write_current_csv(const std::filesystem::path& path,
                              const TrajectoryRecord& record, double dt) {
  auto out = detail::open_output(path);
  out << "t,j\n";
  for (std::size_t k = 0; k < record.current.size(); ++k)
    out << format_double(k * dt) << ',' << format_double(record.current[k])
        << '\n';
}

inline void write_leakage_csv(const std::filesystem::path& path,
                              const std::vector<LeakagePoint>& points) {
  auto out = detail::open_output(path);
  out << "sigma,quadrature_integral,orthogonal_integral\n";
  for (const auto& pt : points)
    out << format_double(pt.sigma) << ','
        << format_double(pt.quadrature_integral) << ','
        << format_double(pt.orthogonal_integral) << '\n';
}

inline void write_threshold_csv(const std::filesystem::path& path,
                                const std::vector<ThresholdPoint>& curve) {
  auto out = detail::open_output(path);
  out << "s_th,f_plus,f_plus_err,f_minus,f_minus_err,accepted_fraction,"
         "n_even,n_odd\n";
  for (const auto& pt : curve)
    out << format_double(pt.s_th) << ',' << format_double(pt.f_plus) << ','
        << format_double(pt.f_plus_err) << ',' << format_double(pt.f_minus)
        << ',' << format_double(pt.f_minus_err) << ','
        << format_double(pt.accepted_fraction) << ',' << pt.n_even << ','
        << pt.n_odd << '\n';
}

struct FidelityVsTauPoint {
  double tau = 0;
  double f_plus = 0, f_minus = 0;
  double accepted_fraction = 0;
};

inline void write_fidelity_vs_tau_csv(
    const std::filesystem::path& path,
    const std::vector<FidelityVsTauPoint>& points) {
  auto out = detail::open_output(path);
  out << "tau,f_plus,f_minus,accepted_fraction\n";
  for (const auto& pt : points)
    out << format_double(pt.tau) << ',' << format_double(pt.f_plus) << ','
        << format_double(pt.f_minus) << ','
        << format_double(pt.accepted_fraction) << '\n';
}

}  // namespace paritysim
