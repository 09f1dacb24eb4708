#include "nlos/inverse/track_features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <opencv2/calib3d.hpp>
#include <opencv2/features2d.hpp>
#include <opencv2/imgproc.hpp>
#include <string>

#include "nlos/core/error.hpp"

namespace nlos {

namespace {

ImageD luminance(const ImageD& img) {
  ImageD out(img.rows(), img.cols(), 1);
  for (int r = 0; r < img.rows(); ++r) {
    for (int c = 0; c < img.cols(); ++c) {
      const double y = img.channels() == 3
                           ? 0.2126 * img(r, c, 0) + 0.7152 * img(r, c, 1) + 0.0722 * img(r, c, 2)
                           : img(r, c, 0);
      out(r, c) = std::isfinite(y) ? std::max(0.0, y) : 0.0;
    }
  }
  return out;
}

/// One saturation level for the whole stack, so maps without a reflection stay dark.
double stack_level(const std::vector<ImageD>& lum, double percentile) {
  std::vector<double> all;
  for (const ImageD& l : lum) all.insert(all.end(), l.storage().begin(), l.storage().end());
  const auto k = static_cast<std::size_t>(std::clamp(percentile, 0.0, 1.0) * (all.size() - 1));
  std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
  return all[k];
}

cv::Mat to_gray8(ImageD& lum, double level, double presmooth) {
  cv::Mat f(lum.rows(), lum.cols(), CV_64F, lum.storage().data());
  cv::Mat out;
  f.convertTo(out, CV_8U, level > 0 ? 255.0 / level : 0.0);
  if (presmooth > 0) cv::GaussianBlur(out, out, cv::Size(), presmooth);
  return out;
}

}  // namespace

FeatureTrackSet track_features(const ReflectionStack& stack, const DetectorConfig& config, TrackingReport* report) {
  NLOS_REQUIRE(stack.size() >= 2, "track_features: needs at least 2 maps");
  NLOS_REQUIRE(config.ratio > 0 && config.ratio <= 1, "track_features: ratio must lie in (0, 1]");
  NLOS_REQUIRE(config.min_inliers >= 4, "track_features: at least 4 inliers are needed for a homography");
  const std::size_t n = stack.size();
  TrackingReport local;
  TrackingReport& rep = report ? *report : local;
  rep = TrackingReport{};

  const cv::Ptr<cv::SIFT> sift = cv::SIFT::create(config.max_features, 3, config.contrast_threshold);
  std::vector<ImageD> lum;
  for (const StackEntry& e : stack.entries) lum.push_back(luminance(e.image));
  const double level = stack_level(lum, config.saturation_percentile);
  std::vector<std::vector<cv::KeyPoint>> keypoints(n);
  std::vector<cv::Mat> descriptors(n);
  for (std::size_t i = 0; i < n; ++i) {
    sift->detectAndCompute(to_gray8(lum[i], level, config.presmooth_px), cv::noArray(), keypoints[i], descriptors[i]);
    rep.keypoints.push_back(static_cast<int>(keypoints[i].size()));
  }
  const auto ref = static_cast<std::size_t>(
      std::max_element(rep.keypoints.begin(), rep.keypoints.end()) - rep.keypoints.begin());
  rep.reference = static_cast<int>(ref);
  rep.inliers.assign(n, 0);

  const WallGeometry& wall = stack.wall;
  auto wall_point = [&](const cv::Point2f& pt) { return wall.pixel_to_point(double(pt.y), double(pt.x)); };
  std::map<int, FeatureTrack> by_key;
  if (!keypoints[ref].empty()) {
    cv::BFMatcher matcher(cv::NORM_L2);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == ref) continue;
      if (keypoints[i].size() < 4) {
        rep.warnings.push_back("map " + std::to_string(i) + ": too few keypoints");
        continue;
      }
      std::vector<std::vector<cv::DMatch>> knn;
      matcher.knnMatch(descriptors[ref], descriptors[i], knn, 2);
      std::vector<cv::DMatch> good;
      for (const auto& m : knn) {
        if (m.size() == 2 && m[0].distance < config.ratio * m[1].distance) good.push_back(m[0]);
      }
      if (static_cast<int>(good.size()) < config.min_inliers) {
        rep.warnings.push_back("map " + std::to_string(i) + ": " + std::to_string(good.size()) +
                               " ratio-test matches, pair skipped");
        continue;
      }
      std::vector<cv::Point2f> src;
      std::vector<cv::Point2f> dst;
      for (const cv::DMatch& m : good) {
        src.push_back(keypoints[ref][m.queryIdx].pt);
        dst.push_back(keypoints[i][m.trainIdx].pt);
      }
      std::vector<unsigned char> mask;
      const cv::Mat h = cv::findHomography(src, dst, cv::RANSAC, config.ransac_threshold_px, mask,
                                           config.ransac_iterations);
      const int inliers = h.empty() ? 0 : cv::countNonZero(mask);
      rep.inliers[i] = inliers;
      if (inliers < config.min_inliers) {
        rep.warnings.push_back("map " + std::to_string(i) + ": " + std::to_string(inliers) +
                               " RANSAC inliers, pair skipped");
        continue;
      }
      for (std::size_t k = 0; k < good.size(); ++k) {
        if (!mask[k]) continue;
        const Vec3 p = wall_point(dst[k]);
        if (!wall.contains(p)) continue;
        by_key[good[k].queryIdx].observations.push_back({static_cast<int>(i), p});
      }
    }
  }

  FeatureTrackSet out;
  for (auto& [key, track] : by_key) {
    const Vec3 p = wall_point(keypoints[ref][key].pt);
    if (!wall.contains(p)) continue;
    track.observations.insert(track.observations.begin(), {static_cast<int>(ref), p});
    std::sort(track.observations.begin(), track.observations.end(),
              [](const TrackObservation& a, const TrackObservation& b) { return a.measurement < b.measurement; });
    track.score = static_cast<double>(track.observations.size() - 1);
    out.tracks.push_back(std::move(track));
  }
  if (out.empty()) throw EmptyTracks("track_features: no feature survived matching across the stack");
  out.sort_by_score();
  return out;
}

}  // namespace nlos
