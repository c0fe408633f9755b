#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psychot/error.hpp"

namespace psychot {

// Largest alphabet a point literal can spell (digits 0-9 then a-z).
inline constexpr int kMaxAlphabet = 36;

// A point of mental space: a fixed-length word over {0, ..., p-1}.
class MentalPoint {
public:
  MentalPoint() = default;
  explicit MentalPoint(std::vector<std::uint8_t> digits) : digits_(std::move(digits)) {}

  std::span<const std::uint8_t> digits() const noexcept { return digits_; }
  std::size_t size() const noexcept { return digits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return digits_[i]; }

  // Base-36 digit string, most significant digit first.
  std::string to_string() const;

  friend auto operator<=>(const MentalPoint&, const MentalPoint&) = default;
  friend bool operator==(const MentalPoint&, const MentalPoint&) = default;

private:
  std::vector<std::uint8_t> digits_;
};

enum class MetricKind { PrefixUltrametric, Hamming };

std::string_view to_string(MetricKind kind) noexcept;
MetricKind metric_kind_from_string(std::string_view s);

// The metric space every point, database and processor of an agent lives in.
//
// PrefixUltrametric: d(x, y) = p^-lcp(x, y) for x != y, 0 for x == y, so the
// diameter L is 1. Hamming: number of differing positions, L = m.
class MetricSpec {
public:
  MetricSpec() = default;
  // Throws ValidationError unless 2 <= p <= 36, m >= 1 and p^m < 2^62.
  MetricSpec(MetricKind kind, int p, int m);

  MetricKind kind() const noexcept { return kind_; }
  int p() const noexcept { return p_; }
  int m() const noexcept { return m_; }

  // Number of points, p^m.
  std::uint64_t cardinality() const noexcept { return cardinality_; }
  double diameter() const noexcept;   // L
  double min_measure() const noexcept; // k = 1/(L+1)

  void check(const MentalPoint& x) const;
  MentalPoint parse(std::string_view literal) const;
  // True when `literal` is a well-formed point of this space.
  bool is_point_literal(std::string_view literal) const noexcept;

  // Digits as a base-p integer, most significant digit first.
  std::uint64_t encode(const MentalPoint& x) const;
  MentalPoint decode(std::uint64_t value) const;

  friend bool operator==(const MetricSpec&, const MetricSpec&) = default;

private:
  MetricKind kind_ = MetricKind::PrefixUltrametric;
  int p_ = 2;
  int m_ = 1;
  std::uint64_t cardinality_ = 2;
};

// A named finite set of points. Insertion keeps set semantics.
class Database {
public:
  Database() = default;
  explicit Database(std::string name) : name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }
  std::span<const MentalPoint> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  bool contains(const MentalPoint& x) const;

  // Returns false when the point was already present.
  bool insert(MentalPoint x);

  friend bool operator==(const Database&, const Database&) = default;

private:
  std::string name_;
  std::vector<MentalPoint> points_; // sorted, unique
};

std::size_t common_prefix_length(const MentalPoint& x, const MentalPoint& y) noexcept;

double distance(const MetricSpec& space, const MentalPoint& x, const MentalPoint& y);

// Minimum distance from x to the members of db; L for an empty database.
double distance_to_set(const MetricSpec& space, const MentalPoint& x, const Database& db);

} // namespace psychot
