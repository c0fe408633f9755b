#pragma once

#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

#include "psychot/dynamics.hpp"
#include "psychot/scenario.hpp"

#ifndef PSYCHOT_FIXTURE_DIR
#error "PSYCHOT_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace psychot::test {

inline std::string fixture_path(const std::string& rel) { return std::string(PSYCHOT_FIXTURE_DIR) + "/" + rel; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Scenario load_fixture(const std::string& name) {
  return load_scenario(read_text(fixture_path("scenarios/" + name)));
}

inline MentalPoint random_point(const MetricSpec& space, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> digit(0, space.p() - 1);
  std::vector<std::uint8_t> d(static_cast<std::size_t>(space.m()));
  for (auto& x : d) x = static_cast<std::uint8_t>(digit(rng));
  return MentalPoint(std::move(d));
}

inline Database random_database(const MetricSpec& space, std::mt19937_64& rng, std::size_t max_size) {
  Database db("random");
  std::uniform_int_distribution<std::size_t> size(0, max_size);
  for (auto n = size(rng); n > 0; --n) db.insert(random_point(space, rng));
  return db;
}

// Distance computed from the literal strings, independently of the library.
inline double oracle_distance(MetricKind kind, int p, const std::string& x, const std::string& y) {
  if (kind == MetricKind::Hamming) {
    int diff = 0;
    for (std::size_t i = 0; i < x.size(); ++i) diff += x[i] != y[i];
    return diff;
  }
  if (x == y) return 0.0;
  std::size_t lcp = 0;
  while (x[lcp] == y[lcp]) ++lcp;
  long double scale = 1;
  for (std::size_t i = 0; i < lcp; ++i) scale *= p;
  return static_cast<double>(1.0L / scale);
}

// Straightforward integer model of each map family: repeated
// multiplication, direct affine arithmetic, digit-array rewriting. Shares
// no code with the library beyond the map parameter types.
inline std::uint64_t oracle_step(int p, int m, const ThinkingMap& map, std::uint64_t v) {
  std::uint64_t mod = 1;
  for (int i = 0; i < m; ++i) mod *= static_cast<std::uint64_t>(p);
  if (const auto* mono = std::get_if<MonomialMap>(&map)) {
    std::uint64_t r = 1 % mod;
    for (std::uint32_t i = 0; i < mono->n; ++i) r = r * v % mod;
    return r;
  }
  if (const auto* aff = std::get_if<AffineMap>(&map)) return (aff->a % mod * v + aff->b) % mod;
  const auto& rw = std::get<PrefixRewriteMap>(map);
  std::vector<int> digits(static_cast<std::size_t>(m));
  for (int i = m - 1; i >= 0; --i, v /= static_cast<std::uint64_t>(p))
    digits[static_cast<std::size_t>(i)] = static_cast<int>(v % static_cast<std::uint64_t>(p));
  const RewriteRule* best = nullptr;
  for (const auto& r : rw.rules) {
    bool match = true;
    for (std::size_t i = 0; i < r.from.size(); ++i) match = match && digits[i] == r.from[i];
    if (match && (!best || r.from.size() > best->from.size())) best = &r;
  }
  if (best)
    for (std::size_t i = 0; i < best->to.size(); ++i) digits[i] = best->to[i];
  std::uint64_t out = 0;
  for (int d : digits) out = out * static_cast<std::uint64_t>(p) + static_cast<std::uint64_t>(d);
  return out;
}

} // namespace psychot::test
