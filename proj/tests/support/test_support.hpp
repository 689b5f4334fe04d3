/*
Copyright 2026 The xinpaint Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// Fixtures and brute-force reference implementations for tests. The oracles
// here deliberately avoid the library's kernels.

#ifndef XINPAINT_TESTS_SUPPORT_TEST_SUPPORT_HPP_
#define XINPAINT_TESTS_SUPPORT_TEST_SUPPORT_HPP_

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "xinpaint/xinpaint.hpp"

namespace xinpaint::testing {

namespace fs = std::filesystem;

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("xinpaint-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  std::string str(const std::string& child = "") const {
    return child.empty() ? path_.string() : (path_ / child).string();
  }

 private:
  fs::path path_;
};

inline std::uint64_t fnv1a(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t hash_mask(const MaskGrid& m) {
  return fnv1a(m.cells().data(), m.cells().size());
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Every regular file under root keyed by relative path.
inline std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      out[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
    }
  }
  return out;
}

// std::mt19937_64 based fixtures, independent of SeededRng.
inline MaskGrid random_mask(std::mt19937_64& g, int w, int h, double p = 0.5) {
  std::bernoulli_distribution d(p);
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(w) * h);
  for (auto& c : cells) c = d(g) ? 1 : 0;
  return MaskGrid(w, h, std::move(cells));
}

// 8-bit representable intensities so PNG round trips are exact.
inline ImageBuffer random_image(std::mt19937_64& g, int w, int h, int c) {
  std::uniform_int_distribution<int> d(0, 255);
  std::vector<double> data(static_cast<std::size_t>(w) * h * c);
  for (double& v : data) v = d(g) / 255.0;
  return ImageBuffer(w, h, c, std::move(data));
}

inline ImageBuffer random_real_image(std::mt19937_64& g, int w, int h, int c) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> data(static_cast<std::size_t>(w) * h * c);
  for (double& v : data) v = d(g);
  return ImageBuffer(w, h, c, std::move(data));
}

// ---------------------------------------------------------------------------
// Oracles

namespace oracle {

inline MaskGrid majority(const MaskGrid& g) {
  MaskGrid out(g.width(), g.height());
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      int ones = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = std::clamp(x + dx, 0, g.width() - 1);
          const int yy = std::clamp(y + dy, 0, g.height() - 1);
          ones += g.at(xx, yy) ? 1 : 0;
        }
      }
      out.set(x, y, ones >= 5);
    }
  }
  return out;
}

inline MaskGrid dilate(const MaskGrid& g, int r) {
  MaskGrid out(g.width(), g.height());
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      bool any = false;
      for (int yy = y - r; yy <= y + r && !any; ++yy) {
        for (int xx = x - r; xx <= x + r && !any; ++xx) {
          if (xx >= 0 && yy >= 0 && xx < g.width() && yy < g.height()) {
            any = g.at(xx, yy);
          }
        }
      }
      out.set(x, y, any);
    }
  }
  return out;
}

inline bool subset(const MaskGrid& a, const MaskGrid& b) {
  for (std::size_t i = 0; i < a.cells().size(); ++i) {
    if (a.cells()[i] && !b.cells()[i]) return false;
  }
  return true;
}

inline double mae(const ImageBuffer& a, const ImageBuffer& b) {
  long double s = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x)
      for (int c = 0; c < a.channels(); ++c)
        s += std::fabs(static_cast<long double>(a.at(x, y, c)) - b.at(x, y, c));
  return static_cast<double>(s / (static_cast<long double>(a.width()) * a.height() *
                                  a.channels()));
}

inline double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  long double s = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x)
      for (int c = 0; c < a.channels(); ++c) {
        const long double d = static_cast<long double>(a.at(x, y, c)) - b.at(x, y, c);
        s += d * d;
      }
  const long double mse = s / (static_cast<long double>(a.width()) * a.height() *
                               a.channels());
  if (mse == 0) return INFINITY;
  return static_cast<double>(10.0L * std::log10(1.0L / mse));
}

// Direct per-window SSIM with a 2D Gaussian weight and clamped coordinates.
inline double ssim(const ImageBuffer& a, const ImageBuffer& b) {
  const int w = a.width();
  const int h = a.height();
  auto luma = [](const ImageBuffer& im, int x, int y) {
    if (im.channels() == 1) return im.at(x, y, 0);
    return 0.299 * im.at(x, y, 0) + 0.587 * im.at(x, y, 1) + 0.114 * im.at(x, y, 2);
  };
  double weight[11][11];
  double total = 0;
  for (int j = 0; j < 11; ++j)
    for (int i = 0; i < 11; ++i) {
      weight[j][i] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2 * 1.5 * 1.5));
      total += weight[j][i];
    }
  const double c1 = 0.0001;
  const double c2 = 0.0009;
  double sum = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double mx = 0, my = 0;
      for (int j = 0; j < 11; ++j)
        for (int i = 0; i < 11; ++i) {
          const int xx = std::clamp(x + i - 5, 0, w - 1);
          const int yy = std::clamp(y + j - 5, 0, h - 1);
          mx += weight[j][i] / total * luma(a, xx, yy);
          my += weight[j][i] / total * luma(b, xx, yy);
        }
      double vx = 0, vy = 0, cov = 0;
      for (int j = 0; j < 11; ++j)
        for (int i = 0; i < 11; ++i) {
          const int xx = std::clamp(x + i - 5, 0, w - 1);
          const int yy = std::clamp(y + j - 5, 0, h - 1);
          const double dx = luma(a, xx, yy) - mx;
          const double dy = luma(b, xx, yy) - my;
          vx += weight[j][i] / total * dx * dx;
          vy += weight[j][i] / total * dy * dy;
          cov += weight[j][i] / total * dx * dy;
        }
      sum += ((2 * mx * my + c1) * (2 * cov + c2)) /
             ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
  }
  return sum / (static_cast<double>(w) * h);
}

struct MeanStd {
  double mean;
  double std;
};

inline MeanStd two_pass(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += x;
  const long double mean = s / v.size();
  long double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(ss / v.size()))};
}

inline std::map<ClassId, ClassCounts> recount(const std::vector<SemanticMap>& maps) {
  std::map<ClassId, ClassCounts> out;
  for (const SemanticMap& m : maps) {
    std::vector<ClassId> seen;
    for (int y = 0; y < m.height(); ++y) {
      for (int x = 0; x < m.width(); ++x) {
        const ClassId id = m.at(x, y);
        out[id].pixel_count += 1;
        if (std::find(seen.begin(), seen.end(), id) == seen.end()) seen.push_back(id);
      }
    }
    for (ClassId id : seen) out[id].image_count += 1;
  }
  return out;
}

}  // namespace oracle

// ---------------------------------------------------------------------------
// Subprocess helper for CLI tests.

struct RunOutput {
  int status = -1;
  std::string output;
};

inline RunOutput run_command(const std::string& cmd) {
  RunOutput r;
  FILE* p = ::popen((cmd + " 2>&1").c_str(), "r");
  if (p == nullptr) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.output.append(buf, n);
  const int st = ::pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

inline std::string quote(const std::string& s) { return "'" + s + "'"; }

// Smooth multi-octave value noise in [0,1]: a stand-in for natural photos
// with spatially correlated content.
inline ImageBuffer smooth_noise_image(std::uint64_t seed, int w, int h) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> data(static_cast<std::size_t>(w) * h * 3, 0.0);
  double amp_total = 0.0;
  for (int octave = 0; octave < 5; ++octave) {
    const int cell = std::max(2, 64 >> octave);
    const double amp = 1.0 / (1 << octave);
    amp_total += amp;
    const int gw = w / cell + 2;
    const int gh = h / cell + 2;
    for (int c = 0; c < 3; ++c) {
      std::vector<double> lattice(static_cast<std::size_t>(gw) * gh);
      for (double& v : lattice) v = u(g);
      for (int y = 0; y < h; ++y) {
        const double fy = static_cast<double>(y) / cell;
        const int y0 = static_cast<int>(fy);
        const double ty = fy - y0;
        const double sy = ty * ty * (3 - 2 * ty);
        for (int x = 0; x < w; ++x) {
          const double fx = static_cast<double>(x) / cell;
          const int x0 = static_cast<int>(fx);
          const double tx = fx - x0;
          const double sx = tx * tx * (3 - 2 * tx);
          auto L = [&](int xi, int yi) { return lattice[static_cast<std::size_t>(yi) * gw + xi]; };
          const double top = L(x0, y0) * (1 - sx) + L(x0 + 1, y0) * sx;
          const double bot = L(x0, y0 + 1) * (1 - sx) + L(x0 + 1, y0 + 1) * sx;
          data[(static_cast<std::size_t>(y) * w + x) * 3 + c] +=
              amp * (top * (1 - sy) + bot * sy);
        }
      }
    }
  }
  for (double& v : data) v = std::round(std::clamp(v / amp_total, 0.0, 1.0) * 255.0) / 255.0;
  return ImageBuffer(w, h, 3, std::move(data));
}


// A scored-run fixture on disk: gt/<id>.png, masks/<id>.png, inputs/<id>.png
// (degraded) and manifest.json with paths relative to the fixture root.
// Mask families cycle box, cellular_automata, free_form by index.
struct RunFixture {
  RunManifest manifest;
  std::vector<std::string> ids;
  fs::path root;
  fs::path manifest_path;
};

inline RunFixture make_run_fixture(const fs::path& root, int n, int w, int h,
                                   std::uint64_t seed) {
  RunFixture f;
  f.root = root;
  for (const char* sub : {"gt", "masks", "inputs"}) fs::create_directories(root / sub);
  const MaskConfig config;
  for (int i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "img%02d", i);
    const ImageBuffer gt = smooth_noise_image(seed * 1000 + i, w, h);
    SeededRng rng(seed + i, "mask");
    const MaskType type = kAllMaskTypes[i % 3];
    const MaskGrid mask = generate_mask(type, w, h, config, rng).mask;
    save_image(gt, (root / "gt" / (std::string(id) + ".png")).string());
    save_mask(mask, (root / "masks" / (std::string(id) + ".png")).string());
    save_image(apply_mask(gt, mask), (root / "inputs" / (std::string(id) + ".png")).string());
    f.manifest.images.push_back({id, "gt/" + std::string(id) + ".png", std::nullopt});
    MaskAssignment a;
    a.image_id = id;
    a.type = type;
    a.mask = "masks/" + std::string(id) + ".png";
    f.manifest.masks.push_back(a);
    f.ids.push_back(id);
  }
  f.manifest_path = root / "manifest.json";
  save_manifest(f.manifest, f.manifest_path.string());
  return f;
}

// Writes an executable shell script.
inline std::string write_script(const fs::path& path, const std::string& body) {
  spit(path, "#!/bin/sh\n" + body);
  fs::permissions(path, fs::perms::owner_all | fs::perms::group_read |
                            fs::perms::group_exec | fs::perms::others_read |
                            fs::perms::others_exec);
  return path.string();
}

// Plug-in stubs for the JSON-on-stdout protocol.
inline const char* kScalarStub = "echo '{\"scalar\": 30.69}'\n";
// Per-image value = byte size of the submitted output file.
inline const char* kPerImageStub =
    "printf '{\"per_image\": {'\n"
    "sep=''\n"
    "for f in \"$2\"/*.png; do\n"
    "  id=$(basename \"$f\" .png)\n"
    "  size=$(wc -c < \"$f\" | tr -d ' ')\n"
    "  printf '%s\"%s\": %s' \"$sep\" \"$id\" \"$size\"\n"
    "  sep=', '\n"
    "done\n"
    "printf '}}\\n'\n";
inline const char* kFailingStub = "echo 'model weights not found' >&2\nexit 1\n";

}  // namespace xinpaint::testing

#endif  // XINPAINT_TESTS_SUPPORT_TEST_SUPPORT_HPP_
