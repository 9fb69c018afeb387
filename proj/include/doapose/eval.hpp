#pragma once

#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "doapose/geometry.hpp"

// The paper-style metric suite: AUC@tau on rotation / translation / total
// angular error, MAE on yaw, and the chance baseline.

namespace doapose {

inline const std::vector<double> kAucThresholds = {5.0, 10.0, 20.0};

struct ErrorSample {
  std::string id;
  double rot_err_deg = 0.0;
  double trans_err_deg = 0.0;
  double total_err_deg = 0.0;  // max of the two
  double yaw_err_deg = 0.0;
};

struct MetricsReport {
  // family ("rotation" | "translation" | "total") -> threshold -> AUC
  std::map<std::string, std::map<int, double>> auc;
  double mae_yaw_deg = 0.0;
  int n = 0;
  std::string method;
  std::vector<ErrorSample> samples;  // manifest order
};

/// Normalized area under the accuracy-vs-threshold curve up to tau:
/// (1/tau) * integral_0^tau a(t) dt with a(t) the fraction of errors <= t.
/// Computed exactly: errors below tau each contribute (tau - e) / (n * tau).
inline double auc_at(const std::vector<double>& errors, double tau) {
  if (errors.empty()) throw EmptyInput("auc_at over empty error list");
  if (!(tau > 0)) throw NonPositiveTau("tau must be positive");
  double sum = 0.0;
  for (double e : errors)
    if (e < tau) sum += tau - e;
  return sum / (static_cast<double>(errors.size()) * tau);
}

/// Mean wrapped absolute yaw error: every entry is wrapped to [0, 180].
inline double mae(const std::vector<double>& errors) {
  if (errors.empty()) throw EmptyInput("mae over empty error list");
  double sum = 0.0;
  for (double e : errors) sum += wrap_abs_deg(e);
  return sum / static_cast<double>(errors.size());
}

/// Constant predictor: chordal-mean rotation and arithmetic-mean translation
/// of the ground-truth relative poses.
inline RelativePose chance_baseline(const std::vector<RelativePose>& truths) {
  if (truths.empty()) throw EmptyInput("chance_baseline over empty manifest");
  std::vector<Rotation> rots;
  rots.reserve(truths.size());
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  for (const RelativePose& p : truths) {
    rots.push_back(p.rotation);
    t += p.translation;
  }
  RelativePose out;
  out.rotation = mean_rotation(rots);
  out.translation = t / static_cast<double>(truths.size());
  return out;
}

/// Direction-angle error with the documented degenerate mapping: both
/// vectors near zero -> 0, exactly one near zero -> 180.
inline double resolved_translation_error_deg(const Eigen::Vector3d& a,
                                             const Eigen::Vector3d& b) {
  if (auto err = translation_angle_error_deg(a, b)) return *err;
  const bool da = a.norm() < 1e-9;
  const bool db = b.norm() < 1e-9;
  return (da && db) ? 0.0 : 180.0;
}

/// One prediction for a manifest pair. Yaw-only methods leave rotation and
/// translation unset; a missing rotation means "yaw_deg is the whole
/// estimate" and a missing translation scores the 180-degree penalty.
struct Prediction {
  std::string id;
  double yaw_deg = 0.0;
  std::optional<Rotation> rotation;
  std::optional<Eigen::Vector3d> translation;
};

struct TruthRecord {
  std::string id;
  RelativePose truth;
};

/// Scores predictions against ground truth. Every manifest id must have
/// exactly one prediction; samples are aggregated in manifest order so the
/// report does not depend on prediction file order.
inline MetricsReport evaluate_run(const std::vector<TruthRecord>& manifest,
                                  const std::vector<Prediction>& predictions,
                                  const std::string& method = "") {
  if (manifest.empty()) throw EmptyInput("evaluate_run over empty manifest");
  std::unordered_map<std::string, const Prediction*> by_id;
  for (const Prediction& p : predictions) {
    if (!by_id.emplace(p.id, &p).second)
      throw IdMismatch("duplicate prediction id: " + p.id);
  }
  std::string missing, extra;
  for (const TruthRecord& t : manifest)
    if (!by_id.count(t.id)) missing += (missing.empty() ? "" : ", ") + t.id;
  if (predictions.size() != manifest.size() || !missing.empty()) {
    std::unordered_map<std::string, int> manifest_ids;
    for (const TruthRecord& t : manifest) manifest_ids[t.id] = 1;
    for (const Prediction& p : predictions)
      if (!manifest_ids.count(p.id)) extra += (extra.empty() ? "" : ", ") + p.id;
    throw IdMismatch("manifest/prediction id mismatch; missing: [" + missing +
                     "] unmatched: [" + extra + "]");
  }

  MetricsReport report;
  report.method = method;
  report.n = static_cast<int>(manifest.size());
  std::vector<double> rot, trans, total, yaw;
  for (const TruthRecord& t : manifest) {
    const Prediction& p = *by_id.at(t.id);
    const Rotation pred_rot = p.rotation ? *p.rotation : Rotation::yaw_deg(p.yaw_deg);
    ErrorSample s;
    s.id = t.id;
    s.rot_err_deg = rotation_error_deg(t.truth.rotation, pred_rot);
    s.trans_err_deg = p.translation
                          ? resolved_translation_error_deg(t.truth.translation, *p.translation)
                          : 180.0;
    s.total_err_deg = std::max(s.rot_err_deg, s.trans_err_deg);
    s.yaw_err_deg = wrap_abs_deg(p.yaw_deg - yaw_of(t.truth.rotation));
    report.samples.push_back(s);
    rot.push_back(s.rot_err_deg);
    trans.push_back(s.trans_err_deg);
    total.push_back(s.total_err_deg);
    yaw.push_back(s.yaw_err_deg);
  }
  for (double tau : kAucThresholds) {
    const int key = static_cast<int>(tau);
    report.auc["rotation"][key] = auc_at(rot, tau);
    report.auc["translation"][key] = auc_at(trans, tau);
    report.auc["total"][key] = auc_at(total, tau);
  }
  report.mae_yaw_deg = mae(yaw);
  return report;
}

/// Plain-text table: method rows by {Rotation, Translation, Total} x
/// {@5, @10, @20} columns plus yaw MAE.
inline std::string report_table(const std::vector<MetricsReport>& reports) {
  std::ostringstream os;
  os << std::left << std::setw(18) << "Method";
  for (const char* fam : {"Rot", "Trans", "Total"})
    for (double tau : kAucThresholds)
      os << std::right << std::setw(10) << (std::string(fam) + "@" + std::to_string(static_cast<int>(tau)));
  os << std::right << std::setw(12) << "MAE(yaw)" << "\n";
  os << std::string(18 + 9 * 10 + 12, '-') << "\n";
  os << std::fixed << std::setprecision(4);
  for (const MetricsReport& r : reports) {
    os << std::left << std::setw(18) << r.method;
    for (const char* fam : {"rotation", "translation", "total"})
      for (double tau : kAucThresholds)
        os << std::right << std::setw(10) << r.auc.at(fam).at(static_cast<int>(tau));
    os << std::right << std::setw(12) << r.mae_yaw_deg << "\n";
  }
  return os.str();
}

}  // namespace doapose
