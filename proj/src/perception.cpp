#include "tacfoot/perception.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tacfoot/errors.hpp"

namespace tacfoot {

using nlohmann::json;

FeatureVector feature_from_frame(const TapFrame& frame) {
  FeatureVector f;
  f.reserve(2 * frame.pins.size());
  for (const Vec2& p : frame.pins) {
    f.push_back(p.x);
    f.push_back(p.y);
  }
  return f;
}

double dissimilarity(const FeatureVector& a, const FeatureVector& b) {
  if (a.size() != b.size())
    throw LengthMismatch("feature lengths differ: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  const std::size_t n_pins = a.size() / 2;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(n_pins));
}

AlignResult align_arc(const std::vector<double>& hip_angles_deg,
                      const std::vector<FeatureVector>& features, const ReferenceTap& ref,
                      const std::vector<bool>& candidates) {
  const int n = static_cast<int>(features.size());
  if (n < 3) throw DegenerateArc("arc needs >= 3 taps, got " + std::to_string(n));
  if (!candidates.empty() && static_cast<int>(candidates.size()) != n)
    throw LengthMismatch("candidate mask size does not match the arc");

  AlignResult out;
  out.dissimilarities.reserve(n);
  for (const FeatureVector& f : features) out.dissimilarities.push_back(dissimilarity(f, ref.feature));

  int best = -1;
  for (int k = 0; k < n; ++k) {
    if (!candidates.empty() && !candidates[k]) continue;
    if (best < 0) {
      best = k;
      continue;
    }
    const double d = out.dissimilarities[k];
    const double db = out.dissimilarities[best];
    if (d < db) {
      best = k;
    } else if (d == db && std::abs(hip_angles_deg[k]) < std::abs(hip_angles_deg[best])) {
      best = k;
    }
  }
  if (best < 0) throw DegenerateArc("no candidate taps for alignment");
  out.argmin_index = best;
  out.boundary = (best == 0 || best == n - 1);

  const double spacing = (hip_angles_deg.back() - hip_angles_deg.front()) / (n - 1);
  if (!out.boundary) {
    const double dm = out.dissimilarities[best - 1];
    const double d0 = out.dissimilarities[best];
    const double dp = out.dissimilarities[best + 1];
    const double denom = dm - 2.0 * d0 + dp;
    // an exact zero of the nonnegative profile is the minimum itself
    if (d0 > 0.0 && denom > 1e-15) out.delta = std::clamp(0.5 * (dm - dp) / denom, -0.5, 0.5);
  }
  out.edge_angle_deg = hip_angles_deg[best] + out.delta * spacing;

  out.taps.reserve(n);
  for (int k = 0; k < n; ++k)
    out.taps.push_back({features[k], hip_angles_deg[k] - out.edge_angle_deg});
  return out;
}

ReferenceSelection select_reference(const std::vector<double>& hip_angles_deg,
                                    const std::vector<TapFrame>& frames, const PinLayout& layout,
                                    std::optional<int> override_index, double range_floor_mm) {
  const int n = static_cast<int>(frames.size());
  if (n < 3) throw DegenerateArc("arc needs >= 3 taps, got " + std::to_string(n));
  (void)hip_angles_deg;

  // Deflection profile of the tip core: common-mode translation (shear)
  // removed, inner ring only. The whole-tip mean is nearly flat across most
  // of the approach because the shear term saturates, which lets placement
  // noise scatter the midpoint pick several millimetres off the edge; the
  // core radial magnitude ramps exactly while the tip center crosses it.
  std::vector<double> mean_deflection(n, 0.0);
  for (int k = 0; k < n; ++k) {
    Vec2 common{0.0, 0.0};
    for (int i = 0; i < layout.count(); ++i) common = common + (frames[k].pins[i] - layout.rest[i]);
    common = common / layout.count();
    double sum = 0.0;
    int inner = 0;
    for (int i = 0; i < layout.count(); ++i) {
      if (layout.ring[i] != 0) continue;
      sum += (frames[k].pins[i] - layout.rest[i] - common).norm();
      ++inner;
    }
    mean_deflection[k] = sum / inner;
  }

  int pick;
  if (override_index.has_value()) {
    pick = *override_index;
    if (pick < 0 || pick >= n) throw Error("reference override index out of range");
  } else {
    const auto [mn_it, mx_it] = std::minmax_element(mean_deflection.begin(), mean_deflection.end());
    if (*mx_it - *mn_it < range_floor_mm)
      throw NoTransition("arc never crossed the edge (deflection range " +
                         std::to_string(*mx_it - *mn_it) + " mm)");
    const double target = 0.5 * (*mx_it + *mn_it);
    pick = 0;
    for (int k = 1; k < n; ++k) {
      if (std::abs(mean_deflection[k] - target) < std::abs(mean_deflection[pick] - target)) pick = k;
    }
  }

  ReferenceSelection sel;
  sel.index = pick;
  sel.mean_deflection_mm = mean_deflection[pick];
  sel.reference.feature = feature_from_frame(frames[pick]);
  sel.reference.tap_index = pick;
  return sel;
}

static double euclid(const FeatureVector& a, const FeatureVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

void GPModel::fit_in_place() {
  const int n = size();
  if (n < 2) throw Error("fit requires >= 2 labeled taps, got " + std::to_string(n));

  // Bandwidth from the data unless user-fixed: 3/8 of the median pairwise
  // distance between distinct features. Saturated contact patterns repeat, so
  // duplicates are dropped before taking the median; the scale factor keeps
  // the kernel resolving adjacent taps instead of flattening the transition.
  if (config_.lengthscale > 0.0) {
    lengthscale_ = config_.lengthscale;
  } else {
    std::vector<double> dists;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double d = euclid(train_[i].feature, train_[j].feature);
        if (d > 1e-9) dists.push_back(d);
      }
    }
    if (dists.empty()) {
      lengthscale_ = 1.0;
    } else {
      std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
      lengthscale_ = 0.375 * dists[dists.size() / 2];
      if (lengthscale_ < 1e-9) lengthscale_ = 1.0;
    }
  }

  if (config_.signal_var > 0.0) {
    signal_var_ = config_.signal_var;
  } else {
    double mean = 0.0;
    for (const LabeledTap& t : train_) mean += t.label_deg;
    mean /= n;
    double var = 0.0;
    for (const LabeledTap& t : train_) var += (t.label_deg - mean) * (t.label_deg - mean);
    var /= n;
    // floor at (5 deg)^2 so low-variance label sets are still trusted over
    // the noise floor rather than shrunk toward the prior
    signal_var_ = std::max(var, 25.0);
  }
  noise_var_ = std::max(1e-4 * signal_var_, config_.noise_var_floor);

  Eigen::MatrixXd K(n, n);
  const double inv2l2 = 1.0 / (2.0 * lengthscale_ * lengthscale_);
  for (int i = 0; i < n; ++i) {
    K(i, i) = signal_var_;
    for (int j = i + 1; j < n; ++j) {
      const double d = euclid(train_[i].feature, train_[j].feature);
      K(i, j) = K(j, i) = signal_var_ * std::exp(-d * d * inv2l2);
    }
  }

  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = train_[i].label_deg;

  const double max_jitter = 1e-6 * signal_var_;
  double jitter = 0.0;
  for (;;) {
    Eigen::MatrixXd A = K + (noise_var_ + jitter) * Eigen::MatrixXd::Identity(n, n);
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) {
      chol_lower_ = llt.matrixL();
      alpha_ = llt.solve(y);
      jitter_used_ = jitter;
      fitted_ = true;
      return;
    }
    if (jitter == 0.0) {
      jitter = 1e-12 * signal_var_;
    } else {
      jitter *= 10.0;
    }
    if (jitter > max_jitter)
      throw SingularKernel("kernel factorization failed at jitter " + std::to_string(jitter));
  }
}

GPModel GPModel::fitted() const {
  GPModel m = *this;
  m.fit_in_place();
  return m;
}

GPModel GPModel::updated(const std::vector<LabeledTap>& new_taps) const {
  if (new_taps.empty()) return *this;
  GPModel m = *this;
  m.train_.insert(m.train_.end(), new_taps.begin(), new_taps.end());
  m.fit_in_place();
  return m;
}

Prediction GPModel::predict(const FeatureVector& query) const {
  if (!fitted_) throw Unfitted("predict on unfitted model");
  const int n = size();
  Eigen::VectorXd k(n);
  const double inv2l2 = 1.0 / (2.0 * lengthscale_ * lengthscale_);
  for (int i = 0; i < n; ++i) {
    const double d = euclid(train_[i].feature, query);
    k(i) = signal_var_ * std::exp(-d * d * inv2l2);
  }
  Prediction p;
  p.mean_deg = k.dot(alpha_);
  const Eigen::VectorXd v = chol_lower_.triangularView<Eigen::Lower>().solve(k);
  double var = signal_var_ - v.squaredNorm();
  if (var < 0.0) var = 0.0;
  p.std_deg = std::sqrt(var);
  return p;
}

void save_checkpoint(const GPModel& model, const ReferenceTap& ref, const std::string& path) {
  json j;
  j["lengthscale"] = model.lengthscale();
  j["signal_var"] = model.signal_var();
  j["noise_var_floor"] = model.config().noise_var_floor;
  json feats = json::array();
  json labels = json::array();
  for (const LabeledTap& t : model.training_set()) {
    feats.push_back(t.feature);
    labels.push_back(t.label_deg);
  }
  j["features"] = std::move(feats);
  j["labels"] = std::move(labels);
  j["reference"] = {{"feature", ref.feature}, {"arc_id", ref.arc_id}, {"tap_index", ref.tap_index}};
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint: " + path);
  out << j.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read checkpoint: " + path);
  json j = json::parse(in);

  GPConfig cfg;
  cfg.lengthscale = j.at("lengthscale").get<double>();
  cfg.signal_var = j.at("signal_var").get<double>();
  cfg.noise_var_floor = j.at("noise_var_floor").get<double>();

  std::vector<LabeledTap> taps;
  const auto& feats = j.at("features");
  const auto& labels = j.at("labels");
  for (std::size_t i = 0; i < feats.size(); ++i)
    taps.push_back({feats[i].get<FeatureVector>(), labels[i].get<double>()});

  Checkpoint cp;
  cp.model = GPModel(cfg).updated(taps);
  cp.reference.feature = j.at("reference").at("feature").get<FeatureVector>();
  cp.reference.arc_id = j.at("reference").at("arc_id").get<int>();
  cp.reference.tap_index = j.at("reference").at("tap_index").get<int>();
  return cp;
}

}  // namespace tacfoot
