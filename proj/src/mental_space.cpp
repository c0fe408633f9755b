#include "psychot/mental_space.hpp"

#include <algorithm>
#include <limits>

namespace psychot {

namespace {

char digit_char(std::uint8_t d) {
  return d < 10 ? static_cast<char>('0' + d) : static_cast<char>('a' + (d - 10));
}

int char_digit(char c) noexcept {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return c - 'a' + 10;
  if (c >= 'A' && c <= 'Z') return c - 'A' + 10;
  return -1;
}

} // namespace

std::string MentalPoint::to_string() const {
  std::string s;
  s.reserve(digits_.size());
  for (auto d : digits_) s.push_back(digit_char(d));
  return s;
}

std::string_view to_string(MetricKind kind) noexcept {
  switch (kind) {
  case MetricKind::PrefixUltrametric: return "prefix_ultrametric";
  case MetricKind::Hamming: return "hamming";
  }
  return "unknown";
}

MetricKind metric_kind_from_string(std::string_view s) {
  if (s == "prefix_ultrametric") return MetricKind::PrefixUltrametric;
  if (s == "hamming") return MetricKind::Hamming;
  throw ValidationError("", "unknown metric kind '" + std::string(s) + "'");
}

MetricSpec::MetricSpec(MetricKind kind, int p, int m) : kind_(kind), p_(p), m_(m) {
  if (p < 2) throw ValidationError("/p", "alphabet size p must be >= 2");
  if (p > kMaxAlphabet) throw ValidationError("/p", "alphabet size p must be <= 36");
  if (m < 1) throw ValidationError("/m", "word length m must be >= 1");
  constexpr std::uint64_t limit = std::uint64_t{1} << 62;
  std::uint64_t n = 1;
  for (int i = 0; i < m; ++i) {
    if (n > (limit - 1) / static_cast<std::uint64_t>(p))
      throw ValidationError("/m", "space too large: p^m must stay below 2^62");
    n *= static_cast<std::uint64_t>(p);
  }
  cardinality_ = n;
}

double MetricSpec::diameter() const noexcept {
  return kind_ == MetricKind::PrefixUltrametric ? 1.0 : static_cast<double>(m_);
}

double MetricSpec::min_measure() const noexcept { return 1.0 / (diameter() + 1.0); }

void MetricSpec::check(const MentalPoint& x) const {
  if (x.size() != static_cast<std::size_t>(m_))
    throw InvalidPoint("point '" + x.to_string() + "' has length " + std::to_string(x.size()) +
                       ", expected " + std::to_string(m_));
  for (auto d : x.digits())
    if (d >= p_)
      throw InvalidPoint("point '" + x.to_string() + "' has digit outside [0, " +
                         std::to_string(p_) + ")");
}

bool MetricSpec::is_point_literal(std::string_view literal) const noexcept {
  if (literal.size() != static_cast<std::size_t>(m_)) return false;
  return std::all_of(literal.begin(), literal.end(), [&](char c) {
    int d = char_digit(c);
    return d >= 0 && d < p_;
  });
}

MentalPoint MetricSpec::parse(std::string_view literal) const {
  if (!is_point_literal(literal))
    throw InvalidPoint("'" + std::string(literal) + "' is not a point of a p=" + std::to_string(p_) +
                       ", m=" + std::to_string(m_) + " space");
  std::vector<std::uint8_t> digits;
  digits.reserve(literal.size());
  for (char c : literal) digits.push_back(static_cast<std::uint8_t>(char_digit(c)));
  return MentalPoint(std::move(digits));
}

std::uint64_t MetricSpec::encode(const MentalPoint& x) const {
  check(x);
  std::uint64_t v = 0;
  for (auto d : x.digits()) v = v * static_cast<std::uint64_t>(p_) + d;
  return v;
}

MentalPoint MetricSpec::decode(std::uint64_t value) const {
  if (value >= cardinality_) throw InvalidPoint("value " + std::to_string(value) + " out of range");
  std::vector<std::uint8_t> digits(static_cast<std::size_t>(m_));
  for (int i = m_ - 1; i >= 0; --i) {
    digits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value % static_cast<std::uint64_t>(p_));
    value /= static_cast<std::uint64_t>(p_);
  }
  return MentalPoint(std::move(digits));
}

bool Database::contains(const MentalPoint& x) const {
  return std::binary_search(points_.begin(), points_.end(), x);
}

bool Database::insert(MentalPoint x) {
  auto it = std::lower_bound(points_.begin(), points_.end(), x);
  if (it != points_.end() && *it == x) return false;
  points_.insert(it, std::move(x));
  return true;
}

std::size_t common_prefix_length(const MentalPoint& x, const MentalPoint& y) noexcept {
  const auto n = std::min(x.size(), y.size());
  std::size_t i = 0;
  while (i < n && x[i] == y[i]) ++i;
  return i;
}

double distance(const MetricSpec& space, const MentalPoint& x, const MentalPoint& y) {
  space.check(x);
  space.check(y);
  if (space.kind() == MetricKind::Hamming) {
    std::size_t diff = 0;
    for (std::size_t i = 0; i < x.size(); ++i) diff += x[i] != y[i];
    return static_cast<double>(diff);
  }
  const auto lcp = common_prefix_length(x, y);
  if (lcp == x.size()) return 0.0;
  std::uint64_t scale = 1;
  for (std::size_t i = 0; i < lcp; ++i) scale *= static_cast<std::uint64_t>(space.p());
  return 1.0 / static_cast<double>(scale);
}

double distance_to_set(const MetricSpec& space, const MentalPoint& x, const Database& db) {
  double best = space.diameter();
  space.check(x);
  for (const auto& s : db.points()) {
    best = std::min(best, distance(space, x, s));
    if (best == 0.0) break;
  }
  return best;
}

} // namespace psychot
