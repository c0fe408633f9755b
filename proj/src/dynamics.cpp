#include "psychot/dynamics.hpp"

#include <algorithm>
#include <unordered_map>

namespace psychot {

namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t mod) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % mod);
}

std::uint64_t powmod(std::uint64_t base, std::uint32_t exp, std::uint64_t mod) {
  std::uint64_t result = 1 % mod;
  base %= mod;
  while (exp > 0) {
    if (exp & 1u) result = mulmod(result, base, mod);
    base = mulmod(base, base, mod);
    exp >>= 1;
  }
  return result;
}

const RewriteRule* longest_match(const PrefixRewriteMap& map, const MentalPoint& x) {
  const RewriteRule* best = nullptr;
  for (const auto& rule : map.rules) {
    if (rule.from.size() > x.size()) continue;
    if (common_prefix_length(rule.from, x) < rule.from.size()) continue;
    if (!best || rule.from.size() > best->from.size()) best = &rule;
  }
  return best;
}

MentalPoint rewrite(const PrefixRewriteMap& map, const MentalPoint& x) {
  const auto* rule = longest_match(map, x);
  if (!rule) return x;
  std::vector<std::uint8_t> digits(x.digits().begin(), x.digits().end());
  std::copy(rule->to.digits().begin(), rule->to.digits().end(), digits.begin());
  return MentalPoint(std::move(digits));
}

} // namespace

std::string_view to_string(OutputTarget t) noexcept {
  switch (t) {
  case OutputTarget::SCC: return "scc";
  case OutputTarget::UC: return "uc";
  case OutputTarget::Internal: return "internal";
  }
  return "unknown";
}

OutputTarget output_target_from_string(std::string_view s) {
  if (s == "scc") return OutputTarget::SCC;
  if (s == "uc") return OutputTarget::UC;
  if (s == "internal") return OutputTarget::Internal;
  throw ValidationError("/output", "unknown output target '" + std::string(s) + "'");
}

std::uint64_t default_max_steps(const MetricSpec& space) noexcept {
  return std::min<std::uint64_t>(space.cardinality(), std::uint64_t{1} << 20);
}

void validate(const MetricSpec& space, const ProcessorSpec& proc) {
  if (proc.id.empty()) throw ValidationError("/id", "processor id must be non-empty");
  if (proc.max_steps < 1) throw ValidationError("/max_steps", "max_steps must be >= 1");
  if (proc.blocking_threshold) {
    const double t = *proc.blocking_threshold;
    if (!(t >= space.min_measure() && t <= 1.0))
      throw ValidationError("/blocking_threshold", "blocking threshold must lie in [k, 1]");
  }
  std::visit(
      [&](const auto& map) {
        using T = std::decay_t<decltype(map)>;
        if constexpr (std::is_same_v<T, MonomialMap>) {
          if (map.n < 1) throw ValidationError("/map/n", "monomial exponent must be >= 1");
        } else if constexpr (std::is_same_v<T, AffineMap>) {
          if (map.a >= space.cardinality() || map.b >= space.cardinality())
            throw ValidationError("/map", "affine coefficients must lie in [0, p^m)");
        } else {
          for (std::size_t i = 0; i < map.rules.size(); ++i) {
            const auto& r = map.rules[i];
            const auto path = "/map/rules/" + std::to_string(i);
            if (r.from.size() == 0 || r.from.size() > static_cast<std::size_t>(space.m()))
              throw ValidationError(path, "rule prefix length must lie in [1, m]");
            if (r.from.size() != r.to.size())
              throw ValidationError(path, "rule replacement must have the prefix's length");
            for (const auto* side : {&r.from, &r.to})
              for (auto d : side->digits())
                if (d >= space.p()) throw ValidationError(path, "rule digit outside [0, p)");
            for (std::size_t j = 0; j < i; ++j)
              if (map.rules[j].from == r.from)
                throw ValidationError(path, "duplicate rule prefix '" + r.from.to_string() + "'");
          }
        }
      },
      proc.map);
}

std::uint64_t apply_encoded(const MetricSpec& space, const ThinkingMap& map, std::uint64_t v) {
  const auto mod = space.cardinality();
  return std::visit(
      [&](const auto& f) -> std::uint64_t {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, MonomialMap>) {
          return powmod(v, f.n, mod);
        } else if constexpr (std::is_same_v<T, AffineMap>) {
          return static_cast<std::uint64_t>((static_cast<u128>(f.a) * v + f.b) % mod);
        } else {
          return space.encode(rewrite(f, space.decode(v)));
        }
      },
      map);
}

MentalPoint apply(const MetricSpec& space, const ProcessorSpec& proc, const MentalPoint& x) {
  space.check(x);
  if (const auto* rw = std::get_if<PrefixRewriteMap>(&proc.map)) return rewrite(*rw, x);
  return space.decode(apply_encoded(space, proc.map, space.encode(x)));
}

IterationOutcome iterate(const MetricSpec& space, const ProcessorSpec& proc, const MentalPoint& x0) {
  std::unordered_map<std::uint64_t, std::uint64_t> first_seen;
  std::vector<std::uint64_t> orbit;
  std::uint64_t v = space.encode(x0);
  first_seen.emplace(v, 0);
  orbit.push_back(v);
  for (std::uint64_t step = 1; step <= proc.max_steps; ++step) {
    v = apply_encoded(space, proc.map, v);
    auto [it, fresh] = first_seen.emplace(v, step);
    if (fresh) {
      orbit.push_back(v);
      continue;
    }
    const auto entry = it->second;
    const auto period = step - entry;
    if (period == 1) return Attractor{space.decode(v), entry};
    Cycle cycle;
    cycle.period = period;
    for (auto i = entry; i < step; ++i) cycle.points.push_back(space.decode(orbit[i]));
    return cycle;
  }
  return Exhausted{space.decode(v)};
}

} // namespace psychot
