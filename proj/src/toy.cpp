#include "todi/toy.hpp"

#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "todi/error.hpp"
#include "todi/io.hpp"

namespace todi::toy {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 3> kFamilies{{
    {Family::BimodalVsUnimodal, "bimodal_vs_unimodal"},
    {Family::ShiftedGaussians, "shifted_gaussians"},
    {Family::RandomDirichlet, "random_dirichlet"},
}};

constexpr std::array<std::pair<Region, std::string_view>, 3> kRegions{{
    {Region::PGreaterQ, "P_GT_Q"},
    {Region::QGreaterP, "Q_GT_P"},
    {Region::Equal, "EQUAL"},
}};

constexpr std::array<std::pair<Dominant, std::string_view>, 3> kDominants{{
    {Dominant::FKL, "FKL"},
    {Dominant::RKL, "RKL"},
    {Dominant::Tie, "tie"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E e) {
  for (const auto& [k, v] : table) {
    if (k == e) return v;
  }
  return "unknown";
}

template <typename E, std::size_t N>
E parse_enum(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view s, const char* what) {
  for (const auto& [k, v] : table) {
    if (v == s) return k;
  }
  std::string msg = std::string("unknown ") + what + " '" + std::string(s) + "'; expected one of:";
  for (const auto& [k, v] : table) msg += " " + std::string(v);
  throw InvalidParameter(msg);
}

double gauss(double x, double mu, double sigma) {
  const double d = (x - mu) / sigma;
  return std::exp(-0.5 * d * d);
}

VocabDist normalized(std::vector<double> w) {
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return VocabDist::from_probs(w);
}

}  // namespace

std::string_view to_string(Family f) { return name_of(kFamilies, f); }
std::string_view to_string(Region r) { return name_of(kRegions, r); }
std::string_view to_string(Dominant d) { return name_of(kDominants, d); }
Family family_from_string(std::string_view s) { return parse_enum(kFamilies, s, "toy family"); }
Region region_from_string(std::string_view s) { return parse_enum(kRegions, s, "region"); }
Dominant dominant_from_string(std::string_view s) { return parse_enum(kDominants, s, "dominant label"); }

const std::vector<Family>& all_families() {
  static const std::vector<Family> families{Family::BimodalVsUnimodal, Family::ShiftedGaussians,
                                            Family::RandomDirichlet};
  return families;
}

Region classify(double p, double q) {
  if (p - q > kRegionTolerance) return Region::PGreaterQ;
  if (q - p > kRegionTolerance) return Region::QGreaterP;
  return Region::Equal;
}

Scenario make_scenario(VocabDist p, VocabDist q) {
  if (p.size() != q.size()) throw InvalidInput("toy scenario: vocabulary sizes differ");
  std::vector<Region> regions(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) regions[i] = classify(p.prob(i), q.prob(i));
  return {std::move(p), std::move(q), std::move(regions)};
}

Scenario make_toy(Family family, std::size_t vocab, std::uint64_t seed) {
  if (vocab < 4) throw InvalidParameter("toy scenario needs a vocabulary of at least 4 entries");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.03, 0.03);
  std::vector<double> p(vocab);
  std::vector<double> q(vocab);
  const double last = static_cast<double>(vocab - 1);

  switch (family) {
    case Family::BimodalVsUnimodal: {
      // Teacher: two narrow bumps. Student: one broad bump between them.
      const double c1 = 0.25 + jitter(rng);
      const double c2 = 0.75 + jitter(rng);
      const double width = 0.08 * (1.0 + jitter(rng));
      const double centre = 0.5 + jitter(rng);
      for (std::size_t i = 0; i < vocab; ++i) {
        const double x = static_cast<double>(i) / last;
        p[i] = gauss(x, c1, width) + gauss(x, c2, width) + 1e-9;
        q[i] = gauss(x, centre, 0.2) + 1e-9;
      }
      break;
    }
    case Family::ShiftedGaussians: {
      const double shift = 0.2 + jitter(rng);
      const double mu = 0.4 + jitter(rng);
      for (std::size_t i = 0; i < vocab; ++i) {
        const double x = static_cast<double>(i) / last;
        p[i] = gauss(x, mu, 0.12) + 1e-9;
        q[i] = gauss(x, mu + shift, 0.15) + 1e-9;
      }
      break;
    }
    case Family::RandomDirichlet: {
      std::gamma_distribution<double> g(1.0, 1.0);
      for (double& v : p) v = g(rng) + 1e-12;
      for (double& v : q) v = g(rng) + 1e-12;
      break;
    }
  }

  Scenario s = make_scenario(normalized(std::move(p)), normalized(std::move(q)));
  bool has_p = false;
  bool has_q = false;
  for (Region r : s.regions) {
    has_p = has_p || r == Region::PGreaterQ;
    has_q = has_q || r == Region::QGreaterP;
  }
  if (!has_p || !has_q) throw InvalidParameter("toy scenario is degenerate: one region is empty");
  return s;
}

Profile gradient_profile(const Scenario& s) {
  if (s.p.size() != s.q.size() || s.regions.size() != s.p.size()) {
    throw InvalidInput("gradient_profile: inconsistent scenario");
  }
  bool all_equal = true;
  for (Region r : s.regions) all_equal = all_equal && r == Region::Equal;
  if (all_equal) throw DegenerateStatistic("gradient_profile: p equals q everywhere");

  Profile out(s.p.size());
  for (std::size_t i = 0; i < s.p.size(); ++i) {
    // |dFKL/dq| = r and |dRKL/dq| = |1 - ln r| with r = p/q.
    const double log_r = s.p.log_prob(i) - s.q.log_prob(i);
    ProfileRow& row = out[i];
    row.index = i;
    row.p = s.p.prob(i);
    row.q = s.q.prob(i);
    row.region = s.regions[i];
    row.grad_fkl_abs = std::exp(log_r);
    row.grad_rkl_abs = std::abs(1.0 - log_r);
    if (row.region == Region::Equal) {
      row.dominant = Dominant::Tie;
    } else {
      row.dominant = row.grad_fkl_abs > row.grad_rkl_abs ? Dominant::FKL : Dominant::RKL;
    }
  }
  return out;
}

std::size_t dominance_violations(const Profile& profile) {
  std::size_t bad = 0;
  for (const auto& row : profile) {
    if (row.region == Region::PGreaterQ && row.dominant != Dominant::FKL) ++bad;
    if (row.region == Region::QGreaterP && row.dominant != Dominant::RKL) ++bad;
  }
  return bad;
}

void write_profile_csv(std::ostream& out, const Profile& profile) {
  out << "index,p,q,region,grad_fkl_abs,grad_rkl_abs,dominant\n";
  for (const auto& r : profile) {
    out << r.index << ',' << io::format_double(r.p) << ',' << io::format_double(r.q) << ',' << to_string(r.region)
        << ',' << io::format_double(r.grad_fkl_abs) << ',' << io::format_double(r.grad_rkl_abs) << ','
        << to_string(r.dominant) << '\n';
  }
}

Profile read_profile_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || io::trim(line) != "index,p,q,region,grad_fkl_abs,grad_rkl_abs,dominant") {
    throw InvalidInput("profile CSV: unexpected header");
  }
  Profile out;
  while (std::getline(in, line)) {
    if (io::trim(line).empty()) continue;
    const auto f = io::split(io::trim(line), ',');
    if (f.size() != 7) throw InvalidInput("profile CSV: expected 7 fields, got " + std::to_string(f.size()));
    ProfileRow r;
    r.index = static_cast<std::size_t>(io::parse_int(f[0]));
    r.p = io::parse_double(f[1]);
    r.q = io::parse_double(f[2]);
    r.region = region_from_string(f[3]);
    r.grad_fkl_abs = io::parse_double(f[4]);
    r.grad_rkl_abs = io::parse_double(f[5]);
    r.dominant = dominant_from_string(f[6]);
    out.push_back(r);
  }
  return out;
}

}  // namespace todi::toy
