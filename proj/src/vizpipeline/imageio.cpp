#include <algorithm>
#include <cmath>
#include <string>
#include <unistd.h>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "scatterkit/errors.hpp"
#include "scatterkit/imageio.hpp"

namespace scatterkit {
namespace {

cv::Mat to_mat(const PlanarImage& image) {
  const int type = image.channels() == 1 ? CV_64FC1 : CV_64FC3;
  cv::Mat mat(static_cast<int>(image.rows()), static_cast<int>(image.cols()), type);
  for (std::size_t r = 0; r < image.rows(); ++r) {
    auto* row = mat.ptr<double>(static_cast<int>(r));
    for (std::size_t c = 0; c < image.cols(); ++c)
      for (std::size_t p = 0; p < image.channels(); ++p)
        row[c * image.channels() + p] = image.planes[p](r, c);
  }
  return mat;
}

PlanarImage from_mat(const cv::Mat& mat) {
  const auto channels = static_cast<std::size_t>(mat.channels());
  PlanarImage out(channels, static_cast<std::size_t>(mat.rows), static_cast<std::size_t>(mat.cols));
  for (int r = 0; r < mat.rows; ++r) {
    const auto* row = mat.ptr<double>(r);
    for (int c = 0; c < mat.cols; ++c)
      for (std::size_t p = 0; p < channels; ++p)
        out.planes[p](static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
            row[static_cast<std::size_t>(c) * channels + p];
  }
  return out;
}

}  // namespace

PlanarImage load_image(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw IoError(path.string() + ": no such file");
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw IoError(path.string() + ": not a decodable image");
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  cv::Mat scaled;
  rgb.convertTo(scaled, CV_64FC3, 1.0 / 255.0);
  return from_mat(scaled);
}

void save_image(const PlanarImage& image, const std::filesystem::path& path) {
  if (image.channels() != 1 && image.channels() != 3)
    throw ValidationError("can only save 1- or 3-plane images");
  if (image.rows() == 0 || image.cols() == 0) throw ValidationError("cannot save an empty image");
  cv::Mat mat = to_mat(image);
  cv::Mat bytes;
  mat.convertTo(bytes, image.channels() == 1 ? CV_8UC1 : CV_8UC3);  // rounds and saturates
  if (image.channels() == 3) cv::cvtColor(bytes, bytes, cv::COLOR_RGB2BGR);

  std::vector<uchar> encoded;
  auto ext = path.extension().string();
  if (ext.empty()) ext = ".png";
  if (!cv::imencode(ext, bytes, encoded)) throw IoError(path.string() + ": cannot encode " + ext);
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw IoError(path.string() + ": cannot open for writing");
  const bool ok = std::fwrite(encoded.data(), 1, encoded.size(), f) == encoded.size() &&
                  std::fflush(f) == 0 && ::fsync(fileno(f)) == 0;
  std::fclose(f);
  std::error_code ec;
  if (ok) std::filesystem::rename(tmp, path, ec);
  if (!ok || ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError(path.string() + ": write failed");
  }
}

PlanarImage resize_and_crop(const PlanarImage& image, std::size_t rows, std::size_t cols) {
  if (image.rows() == 0 || image.cols() == 0) throw DimensionError("cannot resize an empty image");
  if (image.rows() == rows && image.cols() == cols) return image;
  const double scale = std::max(static_cast<double>(rows) / static_cast<double>(image.rows()),
                                static_cast<double>(cols) / static_cast<double>(image.cols()));
  const int new_rows = std::max(static_cast<int>(rows), static_cast<int>(std::lround(image.rows() * scale)));
  const int new_cols = std::max(static_cast<int>(cols), static_cast<int>(std::lround(image.cols() * scale)));
  PlanarImage out;
  for (const auto& plane : image.planes) {
    cv::Mat src(static_cast<int>(plane.rows()), static_cast<int>(plane.cols()), CV_64FC1,
                const_cast<double*>(plane.data()));
    cv::Mat resized;
    cv::resize(src, resized, cv::Size(new_cols, new_rows), 0, 0,
               scale < 1.0 ? cv::INTER_AREA : cv::INTER_LINEAR);
    const int top = (new_rows - static_cast<int>(rows)) / 2;
    const int left = (new_cols - static_cast<int>(cols)) / 2;
    cv::Mat crop = resized(cv::Rect(left, top, static_cast<int>(cols), static_cast<int>(rows)));
    RealImage p(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) p(r, c) = crop.at<double>(static_cast<int>(r), static_cast<int>(c));
    out.planes.push_back(std::move(p));
  }
  return out;
}

}  // namespace scatterkit
