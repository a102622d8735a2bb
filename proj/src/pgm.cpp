#include "sqflow/pgm.hpp"

#include <fstream>
#include <stdexcept>

namespace sqflow {

void write_pgm(const std::filesystem::path& file, int width, int height,
               const std::vector<uint8_t>& pixels, const std::string& comment) {
  if (pixels.size() != static_cast<size_t>(width) * height)
    throw std::invalid_argument("write_pgm: pixel buffer size mismatch");
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  out << "P5\n";
  if (!comment.empty()) out << "# " << comment << '\n';
  out << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

std::vector<uint8_t> render_imprint(const ImprintImage& img) {
  const int n = img.n();
  std::vector<uint8_t> px(static_cast<size_t>(n) * n);
  for (size_t i = 0; i < px.size(); ++i) px[i] = img.wet.data()[i] ? 255 : 0;
  return px;
}

std::vector<uint8_t> render_overlay(const ImprintImage& img, const DropPattern& dp,
                                    int cells_per_pitch) {
  const int n = img.n();
  std::vector<uint8_t> px = render_imprint(img);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (px[static_cast<size_t>(r) * n + c] != 0) continue;
      if (dp.on(r / cells_per_pitch, c / cells_per_pitch))
        px[static_cast<size_t>(r) * n + c] = 128;
    }
  return px;
}

}  // namespace sqflow
