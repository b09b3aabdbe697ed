#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "todi/dist.hpp"

namespace todi::toy {

enum class Family { BimodalVsUnimodal, ShiftedGaussians, RandomDirichlet };
enum class Region { PGreaterQ, QGreaterP, Equal };
enum class Dominant { FKL, RKL, Tie };

std::string_view to_string(Family f);
std::string_view to_string(Region r);
std::string_view to_string(Dominant d);
Family family_from_string(std::string_view s);
Region region_from_string(std::string_view s);
Dominant dominant_from_string(std::string_view s);
const std::vector<Family>& all_families();

// |p_i - q_i| at or below this is labelled Equal.
inline constexpr double kRegionTolerance = 1e-12;

struct Scenario {
  VocabDist p;
  VocabDist q;
  std::vector<Region> regions;
};

Region classify(double p, double q);

// Teacher/student pair whose P_GT_Q and Q_GT_P regions are both non-empty.
// Throws InvalidParameter for vocab < 4.
Scenario make_toy(Family family, std::size_t vocab, std::uint64_t seed);

// Labels an arbitrary pair. Does not require both regions to be present.
Scenario make_scenario(VocabDist p, VocabDist q);

struct ProfileRow {
  std::size_t index = 0;
  double p = 0.0;
  double q = 0.0;
  Region region = Region::Equal;
  double grad_fkl_abs = 0.0;
  double grad_rkl_abs = 0.0;
  Dominant dominant = Dominant::Tie;

  bool operator==(const ProfileRow&) const = default;
};

using Profile = std::vector<ProfileRow>;

// Throws DegenerateStatistic when every index is Equal.
Profile gradient_profile(const Scenario& s);

// Number of rows violating P_GT_Q => FKL-dominant or Q_GT_P => RKL-dominant.
std::size_t dominance_violations(const Profile& profile);

// CSV with header: index,p,q,region,grad_fkl_abs,grad_rkl_abs,dominant.
// Doubles use shortest round-trip formatting.
void write_profile_csv(std::ostream& out, const Profile& profile);
Profile read_profile_csv(std::istream& in);

}  // namespace todi::toy
