#include "recourse/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "recourse/core.hpp"

namespace recourse {

bool Interval::valid() const {
  if (std::isnan(lo) || std::isnan(hi)) return false;
  if (lo < hi) return true;
  return lo == hi && lo_closed && hi_closed && std::isfinite(lo);
}

bool Interval::contains(double x) const {
  if (x < lo || x > hi) return false;
  if (x == lo && !lo_closed) return false;
  if (x == hi && !hi_closed) return false;
  return true;
}

IntervalSet::IntervalSet(std::vector<Interval> parts) {
  std::vector<Interval> v;
  v.reserve(parts.size());
  for (Interval iv : parts) {
    if (std::isinf(iv.lo)) iv.lo_closed = false;
    if (std::isinf(iv.hi)) iv.hi_closed = false;
    if (iv.valid()) v.push_back(iv);
  }
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.lo_closed && !b.lo_closed;
  });
  for (const Interval& iv : v) {
    if (!parts_.empty()) {
      Interval& cur = parts_.back();
      bool joins = iv.lo < cur.hi || (iv.lo == cur.hi && (cur.hi_closed || iv.lo_closed));
      if (joins) {
        if (iv.hi > cur.hi) {
          cur.hi = iv.hi;
          cur.hi_closed = iv.hi_closed;
        } else if (iv.hi == cur.hi) {
          cur.hi_closed = cur.hi_closed || iv.hi_closed;
        }
        continue;
      }
    }
    parts_.push_back(iv);
  }
}

bool IntervalSet::contains(double x) const { return part_of(x) >= 0; }

int IntervalSet::part_of(double x) const {
  // parts are sorted and disjoint: binary search on hi
  auto it = std::lower_bound(parts_.begin(), parts_.end(), x,
                             [](const Interval& iv, double v) { return iv.hi < v; });
  if (it != parts_.end() && it->contains(x)) return static_cast<int>(it - parts_.begin());
  return -1;
}

IntervalSet normalize(std::vector<Interval> parts) { return IntervalSet(std::move(parts)); }

IntervalSet closure(const IntervalSet& a) {
  std::vector<Interval> v = a.parts();
  for (Interval& iv : v) {
    iv.lo_closed = std::isfinite(iv.lo);
    iv.hi_closed = std::isfinite(iv.hi);
  }
  return IntervalSet(std::move(v));
}

IntervalSet interior(const IntervalSet& a) {
  std::vector<Interval> v = a.parts();
  for (Interval& iv : v) iv.lo_closed = iv.hi_closed = false;
  return IntervalSet(std::move(v));
}

IntervalSet complement(const IntervalSet& a) {
  std::vector<Interval> v;
  double lo = -kInf;
  bool lo_closed = false;
  for (const Interval& iv : a.parts()) {
    v.push_back({lo, iv.lo, lo_closed, !iv.lo_closed});
    lo = iv.hi;
    lo_closed = !iv.hi_closed;
  }
  v.push_back({lo, kInf, lo_closed, false});
  return IntervalSet(std::move(v));
}

IntervalSet set_union(const IntervalSet& a, const IntervalSet& b) {
  std::vector<Interval> v = a.parts();
  v.insert(v.end(), b.parts().begin(), b.parts().end());
  return IntervalSet(std::move(v));
}

IntervalSet intersection(const IntervalSet& a, const IntervalSet& b) {
  std::vector<Interval> v;
  std::size_t i = 0, j = 0;
  const auto& pa = a.parts();
  const auto& pb = b.parts();
  while (i < pa.size() && j < pb.size()) {
    const Interval& x = pa[i];
    const Interval& y = pb[j];
    Interval r;
    if (x.lo > y.lo) {
      r.lo = x.lo, r.lo_closed = x.lo_closed;
    } else if (y.lo > x.lo) {
      r.lo = y.lo, r.lo_closed = y.lo_closed;
    } else {
      r.lo = x.lo, r.lo_closed = x.lo_closed && y.lo_closed;
    }
    if (x.hi < y.hi) {
      r.hi = x.hi, r.hi_closed = x.hi_closed;
    } else if (y.hi < x.hi) {
      r.hi = y.hi, r.hi_closed = y.hi_closed;
    } else {
      r.hi = x.hi, r.hi_closed = x.hi_closed && y.hi_closed;
    }
    v.push_back(r);
    // advance the part that ends first (open end counts as earlier)
    bool x_first = x.hi < y.hi || (x.hi == y.hi && !x.hi_closed);
    if (x_first)
      ++i;
    else
      ++j;
  }
  return IntervalSet(std::move(v));
}

IntervalSet difference(const IntervalSet& a, const IntervalSet& b) { return intersection(a, complement(b)); }

bool contains(const IntervalSet& a, double x) { return a.contains(x); }

bool intersects(const IntervalSet& a, const IntervalSet& b) { return !intersection(a, b).empty(); }

bool is_separated(const IntervalSet& a, const IntervalSet& b) {
  return !intersects(closure(a), b) && !intersects(a, closure(b));
}

double min_gap(const IntervalSet& a, const IntervalSet& b) {
  if (a.empty() || b.empty()) return kInf;
  if (!is_separated(a, b)) throw NotSeparated("min_gap: " + to_string(a) + " and " + to_string(b) + " are not separated");
  double best = kInf;
  for (const Interval& x : a.parts())
    for (const Interval& y : b.parts()) {
      double g = y.lo >= x.hi ? y.lo - x.hi : x.lo - y.hi;
      best = std::min(best, g);
    }
  return best;
}

double distance(double x, const IntervalSet& a) {
  double best = kInf;
  for (const Interval& iv : a.parts()) {
    double d = 0.0;
    if (x < iv.lo)
      d = iv.lo - x;
    else if (x > iv.hi)
      d = x - iv.hi;
    best = std::min(best, d);
  }
  return best;
}

// ---------------------------------------------------------------------------

std::string format_real(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_string(const Interval& iv) {
  return std::string(iv.lo_closed ? "[" : "(") + format_real(iv.lo) + "," + format_real(iv.hi) +
         (iv.hi_closed ? "]" : ")");
}

std::string to_string(const IntervalSet& s) {
  if (s.empty()) return "{}";
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += " U ";
    out += to_string(s[i]);
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

double parse_real(const std::string& tok) {
  std::string t = trim(tok);
  if (t == "inf" || t == "+inf") return kInf;
  if (t == "-inf") return -kInf;
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0') throw ConfigError("bad interval endpoint '" + t + "'");
  return v;
}

}  // namespace

Interval parse_interval(const std::string& text) {
  std::string t = trim(text);
  if (t.size() < 5) throw ConfigError("bad interval '" + t + "'");
  char l = t.front(), r = t.back();
  if ((l != '[' && l != '(') || (r != ']' && r != ')')) throw ConfigError("bad interval brackets '" + t + "'");
  auto comma = t.find(',');
  if (comma == std::string::npos) throw ConfigError("bad interval '" + t + "'");
  Interval iv{parse_real(t.substr(1, comma - 1)), parse_real(t.substr(comma + 1, t.size() - comma - 2)), l == '[',
              r == ']'};
  if (!iv.valid()) throw ConfigError("empty or invalid interval '" + t + "'");
  return iv;
}

IntervalSet parse_interval_set(const std::string& text) {
  std::string t = trim(text);
  if (t == "{}" || t.empty()) return {};
  std::vector<Interval> parts;
  std::size_t pos = 0;
  while (pos <= t.size()) {
    auto next = t.find(" U ", pos);
    parts.push_back(parse_interval(t.substr(pos, next == std::string::npos ? std::string::npos : next - pos)));
    if (next == std::string::npos) break;
    pos = next + 3;
  }
  return IntervalSet(std::move(parts));
}

}  // namespace recourse
