#pragma once
#include <vector>

namespace ghsv {

// A partition of {1..n}: cells of 1-based indices. Canonical form sorts each
// cell and orders cells by their minimum.
using Partition = std::vector<std::vector<int>>;

// An s-path over n intervals: m[i] (0-based storage for interval i+1) counts
// the indices whose cell minimum is i+1; valid iff every prefix sum through
// j < n is >= j+1 and the total is n.
using SPath = std::vector<int>;

void canonicalize(Partition& p);
void validate_partition(const Partition& p, int n);
bool is_valid_spath(const SPath& m);

// Full enumerations, guarded: partitions up to n = 10 (Bell growth),
// s-paths up to n = 12 (Catalan growth). Larger n throws DomainError.
std::vector<Partition> enumerate_partitions(int n);
std::vector<SPath> enumerate_spaths(int n);

// the s-path induced by a partition: m[min(C)-1] = |C|
SPath spath_of_partition(const Partition& p, int n);

// Number of partitions mapping onto the s-path m. Closed form: walking the
// occupied minima right to left, each cell of size e chooses its e-1
// non-minimal members from the free slots to its right not already claimed:
//   c(m) = prod_j C(A_j, e_j - 1).
// Exactly the multiplicity that makes the two likelihood sums agree.
double spath_preimage_count(const SPath& m);

double bell_number(int n);
double catalan_number(int n);

}  // namespace ghsv
