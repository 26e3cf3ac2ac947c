#include "ghsv/partitions.hpp"

#include <algorithm>
#include <numeric>

#include "ghsv/errors.hpp"
#include "ghsv/numerics.hpp"

namespace ghsv {

void canonicalize(Partition& p) {
    for (auto& c : p) std::sort(c.begin(), c.end());
    std::sort(p.begin(), p.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

void validate_partition(const Partition& p, int n) {
    std::vector<char> seen(n + 1, 0);
    int count = 0;
    for (const auto& c : p) {
        if (c.empty()) throw DomainError("partition: empty cell");
        for (int i : c) {
            if (i < 1 || i > n || seen[i]) throw DomainError("partition: bad index");
            seen[i] = 1;
            ++count;
        }
    }
    if (count != n) throw DomainError("partition: does not cover {1..n}");
}

bool is_valid_spath(const SPath& m) {
    const int n = static_cast<int>(m.size());
    long total = 0;
    for (int j = 0; j < n; ++j) {
        if (m[j] < 0) return false;
        total += m[j];
        if (j < n - 1 && total < j + 1) return false;
    }
    return total == n;
}

std::vector<Partition> enumerate_partitions(int n) {
    if (n < 1 || n > 10) throw DomainError("enumerate_partitions: n must be in [1,10]");
    std::vector<Partition> out;
    Partition cur;
    // restricted-growth recursion: index i joins an existing cell or opens one
    auto rec = [&](auto&& self, int i) -> void {
        if (i > n) {
            out.push_back(cur);
            return;
        }
        // index loop: the recursive call grows `cur`, so references into it
        // would dangle across reallocation
        for (std::size_t j = 0, k = cur.size(); j < k; ++j) {
            cur[j].push_back(i);
            self(self, i + 1);
            cur[j].pop_back();
        }
        cur.push_back({i});
        self(self, i + 1);
        cur.pop_back();
    };
    rec(rec, 1);
    for (auto& p : out) canonicalize(p);
    return out;
}

std::vector<SPath> enumerate_spaths(int n) {
    if (n < 1 || n > 12) throw DomainError("enumerate_spaths: n must be in [1,12]");
    std::vector<SPath> out;
    SPath cur(n, 0);
    auto rec = [&](auto&& self, int j, int total) -> void {
        if (j == n) {
            if (total == n) out.push_back(cur);
            return;
        }
        for (int m = 0; m + total <= n; ++m) {
            if (j < n - 1 && total + m < j + 1) continue;
            if (j == n - 1 && total + m != n) continue;
            cur[j] = m;
            self(self, j + 1, total + m);
        }
        cur[j] = 0;
    };
    rec(rec, 0, 0);
    return out;
}

SPath spath_of_partition(const Partition& p, int n) {
    validate_partition(p, n);
    SPath m(n, 0);
    for (const auto& c : p)
        m[*std::min_element(c.begin(), c.end()) - 1] = static_cast<int>(c.size());
    return m;
}

double spath_preimage_count(const SPath& m) {
    if (!is_valid_spath(m)) throw DomainError("spath_preimage_count: invalid s-path");
    const int n = static_cast<int>(m.size());
    double count = 1.0;
    int borrowed = 0;
    for (int i = n; i >= 1; --i) {
        if (m[i - 1] == 0) continue;
        int free_after = 0;
        for (int l = i + 1; l <= n; ++l)
            if (m[l - 1] == 0) ++free_after;
        count *= binomial(free_after - borrowed, m[i - 1] - 1);
        borrowed += m[i - 1] - 1;
    }
    return count;
}

double bell_number(int n) {
    // Pascal-style Bell triangle
    std::vector<double> row{1.0};
    for (int i = 1; i <= n; ++i) {
        std::vector<double> next{row.back()};
        for (double x : row) next.push_back(next.back() + x);
        row = std::move(next);
    }
    return row.front();
}

double catalan_number(int n) { return binomial(2 * n, n) / (n + 1.0); }

}  // namespace ghsv
