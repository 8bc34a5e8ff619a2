#include "dsk/fftconv.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dsk::detail {

namespace {

void fft_1d(std::complex<double>* a, std::int64_t n, std::int64_t stride, bool inverse,
            std::vector<std::complex<double>>& scratch) {
  // gather into contiguous scratch, transform, scatter back
  scratch.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) scratch[static_cast<std::size_t>(i)] = a[i * stride];

  // bit reversal
  for (std::int64_t i = 1, j = 0; i < n; ++i) {
    std::int64_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(scratch[static_cast<std::size_t>(i)], scratch[static_cast<std::size_t>(j)]);
  }
  for (std::int64_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? -1.0 : 1.0);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::int64_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::int64_t j = 0; j < len / 2; ++j) {
        auto u = scratch[static_cast<std::size_t>(i + j)];
        auto v = scratch[static_cast<std::size_t>(i + j + len / 2)] * w;
        scratch[static_cast<std::size_t>(i + j)] = u + v;
        scratch[static_cast<std::size_t>(i + j + len / 2)] = u - v;
        w *= wlen;
      }
    }
  }
  for (std::int64_t i = 0; i < n; ++i) a[i * stride] = scratch[static_cast<std::size_t>(i)];
}

}  // namespace

void fft_nd(std::vector<std::complex<double>>& data, const std::vector<std::int64_t>& extents,
            bool inverse) {
  std::int64_t total = 1;
  for (auto e : extents) {
    if (e < 1 || (e & (e - 1)) != 0) throw std::invalid_argument("extent not a power of two");
    total *= e;
  }
  if (static_cast<std::int64_t>(data.size()) != total) throw std::invalid_argument("size mismatch");
  std::vector<std::complex<double>> scratch;
  for (std::size_t axis = 0; axis < extents.size(); ++axis) {
    std::int64_t n = extents[axis];
    if (n == 1) continue;
    std::int64_t stride = 1;
    for (std::size_t i = axis + 1; i < extents.size(); ++i) stride *= extents[i];
    std::int64_t block = n * stride;
    for (std::int64_t base = 0; base < total; base += block)
      for (std::int64_t off = 0; off < stride; ++off)
        fft_1d(data.data() + base + off, n, stride, inverse, scratch);
  }
  if (inverse) {
    double inv = 1.0 / static_cast<double>(total);
    for (auto& v : data) v *= inv;
  }
}

std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b,
                                 const std::vector<std::int64_t>& extents) {
  std::int64_t total = 1;
  for (auto e : extents) total *= e;
  std::vector<std::complex<double>> fa(a.begin(), a.end()), fb(b.begin(), b.end());
  fa.resize(static_cast<std::size_t>(total));
  fb.resize(static_cast<std::size_t>(total));
  fft_nd(fa, extents, false);
  fft_nd(fb, extents, false);
  for (std::int64_t i = 0; i < total; ++i)
    fa[static_cast<std::size_t>(i)] *= fb[static_cast<std::size_t>(i)];
  fft_nd(fa, extents, true);
  std::vector<double> out(static_cast<std::size_t>(total));
  for (std::int64_t i = 0; i < total; ++i) out[static_cast<std::size_t>(i)] = fa[static_cast<std::size_t>(i)].real();
  return out;
}

namespace {

constexpr unsigned long long kP1 = 2013265921ULL;  // 15 * 2^27 + 1, root 31
constexpr unsigned long long kP2 = 2281701377ULL;  // 17 * 2^27 + 1, root 3
constexpr unsigned long long kG1 = 31ULL;
constexpr unsigned long long kG2 = 3ULL;

unsigned long long mulmod(unsigned long long a, unsigned long long b, unsigned long long p) {
  return static_cast<unsigned long long>(static_cast<unsigned __int128>(a) * b % p);
}

unsigned long long powmod(unsigned long long a, unsigned long long e, unsigned long long p) {
  unsigned long long r = 1;
  a %= p;
  while (e > 0) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

void ntt_1d(unsigned long long* a, std::int64_t n, std::int64_t stride, bool inverse,
            unsigned long long p, unsigned long long g, std::vector<unsigned long long>& scratch) {
  scratch.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) scratch[static_cast<std::size_t>(i)] = a[i * stride];
  for (std::int64_t i = 1, j = 0; i < n; ++i) {
    std::int64_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(scratch[static_cast<std::size_t>(i)], scratch[static_cast<std::size_t>(j)]);
  }
  for (std::int64_t len = 2; len <= n; len <<= 1) {
    unsigned long long wlen = powmod(g, (p - 1) / static_cast<unsigned long long>(len), p);
    if (inverse) wlen = powmod(wlen, p - 2, p);
    for (std::int64_t i = 0; i < n; i += len) {
      unsigned long long w = 1;
      for (std::int64_t j = 0; j < len / 2; ++j) {
        unsigned long long u = scratch[static_cast<std::size_t>(i + j)];
        unsigned long long v = mulmod(scratch[static_cast<std::size_t>(i + j + len / 2)], w, p);
        scratch[static_cast<std::size_t>(i + j)] = u + v < p ? u + v : u + v - p;
        scratch[static_cast<std::size_t>(i + j + len / 2)] = u >= v ? u - v : u + p - v;
        w = mulmod(w, wlen, p);
      }
    }
  }
  if (inverse) {
    unsigned long long ninv = powmod(static_cast<unsigned long long>(n), p - 2, p);
    for (auto& v : scratch) v = mulmod(v, ninv, p);
  }
  for (std::int64_t i = 0; i < n; ++i) a[i * stride] = scratch[static_cast<std::size_t>(i)];
}

std::vector<unsigned long long> ntt_convolve_mod(const std::vector<unsigned long long>& a,
                                                 const std::vector<unsigned long long>& b,
                                                 const std::vector<std::int64_t>& extents,
                                                 unsigned long long p, unsigned long long g) {
  std::int64_t total = 1;
  for (auto e : extents) total *= e;
  std::vector<unsigned long long> fa(a), fb(b);
  fa.resize(static_cast<std::size_t>(total));
  fb.resize(static_cast<std::size_t>(total));
  for (auto& v : fa) v %= p;
  for (auto& v : fb) v %= p;
  std::vector<unsigned long long> scratch;
  auto transform = [&](std::vector<unsigned long long>& data, bool inverse) {
    for (std::size_t axis = 0; axis < extents.size(); ++axis) {
      std::int64_t n = extents[axis];
      if (n == 1) continue;
      std::int64_t stride = 1;
      for (std::size_t i = axis + 1; i < extents.size(); ++i) stride *= extents[i];
      std::int64_t block = n * stride;
      for (std::int64_t base = 0; base < total; base += block)
        for (std::int64_t off = 0; off < stride; ++off)
          ntt_1d(data.data() + base + off, n, stride, inverse, p, g, scratch);
    }
  };
  transform(fa, false);
  transform(fb, false);
  for (std::int64_t i = 0; i < total; ++i)
    fa[static_cast<std::size_t>(i)] = mulmod(fa[static_cast<std::size_t>(i)], fb[static_cast<std::size_t>(i)], p);
  transform(fa, true);
  return fa;
}

}  // namespace

std::vector<unsigned long long> ntt_convolve(const std::vector<unsigned long long>& a,
                                             const std::vector<unsigned long long>& b,
                                             const std::vector<std::int64_t>& extents) {
  for (auto e : extents) {
    if (e < 1 || (e & (e - 1)) != 0) throw std::invalid_argument("extent not a power of two");
    if (e > (std::int64_t{1} << 27)) throw std::invalid_argument("extent exceeds NTT capacity");
  }
  auto r1 = ntt_convolve_mod(a, b, extents, kP1, kG1);
  auto r2 = ntt_convolve_mod(a, b, extents, kP2, kG2);
  // CRT lift: v = r1 + p1 * ((r2 - r1) * inv(p1) mod p2)
  unsigned long long inv_p1 = powmod(kP1 % kP2, kP2 - 2, kP2);
  std::vector<unsigned long long> out(r1.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    unsigned long long d = (r2[i] + kP2 - r1[i] % kP2) % kP2;
    unsigned long long t = mulmod(d, inv_p1, kP2);
    unsigned __int128 v = static_cast<unsigned __int128>(t) * kP1 + r1[i];
    out[i] = static_cast<unsigned long long>(v);
  }
  return out;
}

}  // namespace dsk::detail
