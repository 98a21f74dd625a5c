#pragma once

// Filling areas: central-extension lower bounds, exact search, rewriting
// triangle fillers, dyadic filling and certificate verification.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dehn/group.hpp"

namespace dehn {

struct CertificateStep {
  Word conjugator;  // freely reduced
  int relator = 0;  // 0-based index into spec.relators()
  int sign = 1;

  friend bool operator==(const CertificateStep&, const CertificateStep&) = default;
};

/// target =_F prod_i conjugator_i^-1 r_i^sign_i conjugator_i, in order.
struct FillingCertificate {
  std::vector<CertificateStep> steps;
  Word target;

  std::size_t area() const { return steps.size(); }
  std::size_t letters() const;
};

/// Expands the product in the free group and compares free reductions.
bool verify_certificate(const GroupSpec& spec, const FillingCertificate& cert);

/// One step per line: conjugator TAB relator_index TAB sign. A leading
/// "# dehnlab-certificate group=<id> steps=<N>" header is written and, when
/// present on input, the step count is enforced.
void write_certificate(std::ostream& out, const GroupSpec& spec, const FillingCertificate& cert);
/// Throws InvalidWord on malformed or truncated input. `target` is not stored
/// in the file and is left empty.
FillingCertificate read_certificate(std::istream& in);

/// Central extension whose kernel reads off relator counts.
struct CentralExtensionEval {
  GroupSpec base;
  GroupSpec extension;
  /// Extension coordinates that span the central kernel.
  std::vector<int> central_indices;
  int distortion_degree = 0;
};

/// FreeAbelian(d) -> FreeNilpotentClass2(d) for 2 <= d <= 4, Heisenberg3 -> Filiform4.
/// Throws Unsupported for other groups.
CentralExtensionEval central_extension(const GroupSpec& base);

/// Throws DomainError when w is not a loop in the base group.
std::vector<std::int64_t> central_coordinates(const CentralExtensionEval& ev, std::span<const Letter> w);

/// Exact for FreeAbelian(d) (sum of |z_ij|); for Heisenberg3 the Filiform4
/// coordinate |l|, a lower bound up to a presentation constant.
std::int64_t centralized_area(const GroupSpec& spec, std::span<const Letter> w);

/// Sum over lattice cells of |winding number|, for loops in Z^2.
std::int64_t winding_area(std::span<const Letter> w);

struct SearchLimits {
  int max_area = 8;
  std::int64_t max_nodes = 20'000'000;
};

/// Iterative deepening over relator insertions with free reduction.
/// nullopt when the area exceeds max_area or the node budget runs out.
std::optional<FillingCertificate> exact_area_certificate(const GroupSpec& spec, std::span<const Letter> w,
                                                         SearchLimits limits = {});
std::optional<int> exact_area_search(const GroupSpec& spec, std::span<const Letter> w, int budget);

/// Certificate for gamma(x,y) gamma(y,z) gamma(z,x). Implemented for
/// FreeAbelian(d) (transposition sort) and Heisenberg3 (collection to
/// a^x b^y c^w with c = abAB). Throws Unsupported otherwise.
FillingCertificate triangle_fill(const GroupSpec& spec, const GroupElement& x, const GroupElement& y,
                                 const GroupElement& z);

/// Certificate for an arbitrary loop word using the same rewriting system.
FillingCertificate rewrite_fill(const GroupSpec& spec, std::span<const Letter> loop);

/// Prefix indices floor(j n / 2^level), j = 0..2^level.
std::vector<int> dyadic_indices(int n, int level);

/// Dyadic subdivision filling of a loop: nested geodesic triangles plus
/// bigons between the finest polygon and w itself.
FillingCertificate dyadic_fill(const GroupSpec& spec, std::span<const Letter> loop);

struct DistortionPoint {
  int r = 0;
  std::int64_t word_length = 0;
  std::int64_t central = 0;
};

/// |l| of the family [a^r, b^r] (distortion 2) or [a^r, [a^r, b^r]] (distortion 3).
std::vector<DistortionPoint> distortion_probe(const CentralExtensionEval& ev, int radius);

}  // namespace dehn
