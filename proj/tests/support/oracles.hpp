#pragma once

// Straight-line reference implementations used only by tests. They favor
// obviousness over speed and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kernelcur/curation.hpp"
#include "kernelcur/records.hpp"

namespace oracle {

inline double fast_p(const std::vector<double>& s, double p) {
    int count = 0;
    for (double v : s) {
        if (v > p) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(s.size());
}

inline double exec_rate(const std::vector<kernelcur::Status>& st) {
    int count = 0;
    for (auto v : st) {
        if (v == kernelcur::Status::correct) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(st.size());
}

inline double arl(const std::vector<std::vector<std::int64_t>>& lengths) {
    long double total = 0;
    long double cells = 0;
    for (const auto& row : lengths) {
        for (auto v : row) {
            total += static_cast<long double>(v);
            cells += 1;
        }
    }
    return static_cast<double>(total / cells);
}

// n-th root of the product, evaluated in long double with rescaling.
inline double geomean_positive(const std::vector<double>& s) {
    std::vector<double> pos;
    for (double v : s) {
        if (v > 0) pos.push_back(v);
    }
    long double mant = 1.0L;
    long long exp2 = 0;
    for (double v : pos) {
        int e = 0;
        const long double m = std::frexp(static_cast<long double>(v), &e);
        mant *= m;
        exp2 += e;
        int e2 = 0;
        mant = std::frexp(mant, &e2);
        exp2 += e2;
    }
    const long double n = static_cast<long double>(pos.size());
    return static_cast<double>(
        std::exp((std::log(mant) + static_cast<long double>(exp2) * std::log(2.0L)) / n));
}

// Two-pass textbook formula in long double.
inline double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

inline long double t_density(long double t, long double dof) {
    const long double c = std::exp(std::lgamma((dof + 1) / 2) - std::lgamma(dof / 2)) /
                          std::sqrt(dof * 3.14159265358979323846264338327950288L);
    return c * std::pow(1 + t * t / dof, -(dof + 1) / 2);
}

inline long double simpson(const std::function<long double(long double)>& f, long double a,
                           long double b, long double fa, long double fm, long double fb,
                           long double whole, long double eps, int depth) {
    const long double m = (a + b) / 2;
    const long double lm = (a + m) / 2;
    const long double rm = (m + b) / 2;
    const long double flm = f(lm);
    const long double frm = f(rm);
    const long double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const long double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15 * eps) {
        return left + right + (left + right - whole) / 15;
    }
    return simpson(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}

// Two-sided tail by integrating the density over [0, |t|] and subtracting
// from one half.
inline double t_two_sided(double t, double dof) {
    const long double at = std::fabs(static_cast<long double>(t));
    if (std::isinf(t)) return 0.0;
    auto f = [dof](long double u) { return t_density(u, dof); };
    const long double fa = f(0), fb = f(at), fm = f(at / 2);
    const long double whole = at / 6 * (fa + 4 * fm + fb);
    const long double central = simpson(f, 0, at, fa, fm, fb, whole, 1e-15L, 60);
    return static_cast<double>(std::max(0.0L, 1 - 2 * central));
}

inline double pearson_p(double r, std::size_t n) {
    const double dof = static_cast<double>(n) - 2;
    if (std::fabs(r) >= 1.0) return 0.0;
    const double t = r * std::sqrt(dof / (1 - r * r));
    return t_two_sided(t, dof);
}

struct Pick {
    std::string task_id;
    std::int64_t gen_index;
    char part;
};

// Applies the three selection rules one after another with plain loops.
inline std::vector<Pick> curate_concur(const std::vector<kernelcur::TaskGroup>& groups,
                                       double threshold, std::int64_t single_op_target) {
    using kernelcur::Status;
    std::vector<Pick> out;
    std::set<std::pair<std::string, std::int64_t>> taken;
    std::set<std::string> tasks_taken;

    for (const auto& g : groups) {
        const kernelcur::TaskGroupItem* shortest = nullptr;
        for (const auto& it : g.items) {
            if (shortest == nullptr ||
                it.record.reasoning_tokens < shortest->record.reasoning_tokens ||
                (it.record.reasoning_tokens == shortest->record.reasoning_tokens &&
                 it.record.gen_index < shortest->record.gen_index)) {
                shortest = &it;
            }
        }
        if (shortest == nullptr) continue;
        if (shortest->eval.status != Status::correct) continue;
        if (!(shortest->eval.speedup > 0)) continue;
        bool fastest = true;
        for (const auto& it : g.items) {
            if (it.eval.speedup > shortest->eval.speedup) fastest = false;
        }
        if (!fastest) continue;
        out.push_back({g.task_id, shortest->record.gen_index, 'A'});
        taken.insert({g.task_id, shortest->record.gen_index});
        tasks_taken.insert(g.task_id);
    }

    for (const auto& g : groups) {
        for (const auto& it : g.items) {
            if (it.eval.status != Status::correct) continue;
            if (!(it.eval.speedup > threshold)) continue;
            if (taken.count({g.task_id, it.record.gen_index})) continue;
            out.push_back({g.task_id, it.record.gen_index, 'B'});
            taken.insert({g.task_id, it.record.gen_index});
            tasks_taken.insert(g.task_id);
        }
    }

    struct Cand {
        std::string task_id;
        std::int64_t gen;
        double speedup;
    };
    std::vector<Cand> cands;
    for (const auto& g : groups) {
        if (g.task_type != kernelcur::TaskType::single_op) continue;
        if (tasks_taken.count(g.task_id)) continue;
        const kernelcur::TaskGroupItem* best = nullptr;
        for (const auto& it : g.items) {
            if (it.eval.status != Status::correct) continue;
            if (best == nullptr) {
                best = &it;
                continue;
            }
            const bool better =
                it.eval.speedup > best->eval.speedup ||
                (it.eval.speedup == best->eval.speedup &&
                 (it.record.reasoning_tokens < best->record.reasoning_tokens ||
                  (it.record.reasoning_tokens == best->record.reasoning_tokens &&
                   it.record.gen_index < best->record.gen_index)));
            if (better) best = &it;
        }
        if (best) cands.push_back({g.task_id, best->record.gen_index, best->eval.speedup});
    }
    // Selection sort keeps this obviously correct.
    for (std::size_t i = 0; i < cands.size(); ++i) {
        std::size_t m = i;
        for (std::size_t j = i + 1; j < cands.size(); ++j) {
            if (cands[j].speedup > cands[m].speedup ||
                (cands[j].speedup == cands[m].speedup && cands[j].task_id < cands[m].task_id)) {
                m = j;
            }
        }
        std::swap(cands[i], cands[m]);
    }
    std::size_t limit = cands.size();
    if (single_op_target > 0) limit = std::min<std::size_t>(limit, single_op_target);
    for (std::size_t i = 0; i < limit; ++i) out.push_back({cands[i].task_id, cands[i].gen, 'C'});
    return out;
}

// Histogram of accuracy per [k*w, (k+1)*w) bin.
inline std::map<std::int64_t, std::pair<int, int>> length_histogram(
    const std::vector<std::pair<std::int64_t, bool>>& pairs, std::int64_t w) {
    std::map<std::int64_t, std::pair<int, int>> h;
    for (const auto& [len, ok] : pairs) {
        auto& cell = h[len / w];
        cell.first += 1;
        cell.second += ok ? 1 : 0;
    }
    return h;
}

}  // namespace oracle
