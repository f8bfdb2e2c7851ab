#include "kerrnet/measures.hpp"

#include "kerrnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <unordered_map>

namespace kerrnet {

namespace {

// Reduced density kept in coordinate form on the product grid of `factors`.
// Most of the grid is empty for the constrained bases used here, so reductions
// and partial transposes stay cheap before a compact dense eigensolve.
struct SparseReduced {
    std::vector<SiteMode> factors;
    int local_dim = 0;
    struct Item {
        std::uint64_t row;
        std::uint64_t col;
        cplx value;
    };
    std::vector<Item> items;
};

std::vector<SiteMode> sorted_unique(std::vector<SiteMode> v, const char* what) {
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) != v.end()) {
        throw ContractError(std::string(what) + ": site-mode set contains duplicates");
    }
    return v;
}

struct Split {
    std::uint64_t rest;
    std::uint64_t keep;
    std::size_t index;
};

/// Codes of every listed basis state split into kept and traced digits.
std::vector<Split> split_states(const OccupationBasis& basis, const std::vector<SiteMode>& keep,
                                const std::vector<std::size_t>& states) {
    const auto base = static_cast<std::uint64_t>(basis.local_dim());
    std::vector<bool> kept(static_cast<std::size_t>(basis.site_mode_count()), false);
    for (const auto& sm : keep) {
        kept[static_cast<std::size_t>(basis.flat(sm))] = true;
    }
    std::vector<Split> out;
    out.reserve(states.size());
    for (std::size_t i : states) {
        const auto occ = basis.occupation(i);
        std::uint64_t k = 0;
        std::uint64_t r = 0;
        for (std::size_t p = 0; p < occ.size(); ++p) {
            auto& code = kept[p] ? k : r;
            code = code * base + static_cast<std::uint64_t>(occ[p]);
        }
        out.push_back({r, k, i});
    }
    std::sort(out.begin(), out.end(),
              [](const Split& a, const Split& b) { return std::tie(a.rest, a.keep) < std::tie(b.rest, b.keep); });
    return out;
}

template <class Element>
SparseReduced reduce_states(const OccupationBasis& basis, std::span<const SiteMode> keep_in,
                            const std::vector<std::size_t>& states, Element&& element) {
    auto keep = sorted_unique({keep_in.begin(), keep_in.end()}, "reduce");
    if (keep.empty()) {
        throw ContractError("reduce: keep set must be nonempty");
    }
    const auto split = split_states(basis, keep, states);
    std::map<std::pair<std::uint64_t, std::uint64_t>, cplx> acc;
    std::size_t begin = 0;
    while (begin < split.size()) {
        std::size_t end = begin + 1;
        while (end < split.size() && split[end].rest == split[begin].rest) {
            ++end;
        }
        for (std::size_t x = begin; x < end; ++x) {
            for (std::size_t y = begin; y < end; ++y) {
                const cplx v = element(split[x].index, split[y].index);
                if (v != cplx{}) {
                    acc[{split[x].keep, split[y].keep}] += v;
                }
            }
        }
        begin = end;
    }
    SparseReduced out{std::move(keep), basis.local_dim(), {}};
    out.items.reserve(acc.size());
    for (const auto& [rc, v] : acc) {
        out.items.push_back({rc.first, rc.second, v});
    }
    return out;
}

SparseReduced reduce(const PureState& psi, std::span<const SiteMode> keep) {
    const auto& basis = *psi.basis();
    const auto& v = psi.amplitudes();
    std::vector<std::size_t> support;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) != cplx{}) {
            support.push_back(static_cast<std::size_t>(i));
        }
    }
    return reduce_states(basis, keep, support, [&](std::size_t i, std::size_t j) {
        return v(static_cast<Eigen::Index>(i)) * std::conj(v(static_cast<Eigen::Index>(j)));
    });
}

SparseReduced reduce(const DensityMatrix& rho, std::span<const SiteMode> keep) {
    const auto& basis = *rho.basis();
    const auto& m = rho.matrix();
    std::vector<std::size_t> support;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (m(i, i) != cplx{} || m.row(i).cwiseAbs().maxCoeff() > 0.0) {
            support.push_back(static_cast<std::size_t>(i));
        }
    }
    return reduce_states(basis, keep, support, [&](std::size_t i, std::size_t j) {
        return m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    });
}

/// Further trace of an already reduced state.
SparseReduced reduce(const SparseReduced& rho, std::span<const SiteMode> keep_in) {
    auto keep = sorted_unique({keep_in.begin(), keep_in.end()}, "reduce");
    const auto base = static_cast<std::uint64_t>(rho.local_dim);
    const std::size_t n = rho.factors.size();
    std::vector<bool> kept(n, false);
    std::size_t found = 0;
    for (std::size_t p = 0; p < n; ++p) {
        if (std::binary_search(keep.begin(), keep.end(), rho.factors[p])) {
            kept[p] = true;
            ++found;
        }
    }
    if (keep.empty() || found != keep.size()) {
        throw ContractError("reduce: keep set must be a nonempty subset of the reduced factors");
    }
    auto split = [&](std::uint64_t code) {
        std::uint64_t k = 0;
        std::uint64_t r = 0;
        std::uint64_t kw = 1;
        std::uint64_t rw = 1;
        for (std::size_t p = n; p-- > 0;) {
            const std::uint64_t digit = code % base;
            code /= base;
            if (kept[p]) {
                k += digit * kw;
                kw *= base;
            } else {
                r += digit * rw;
                rw *= base;
            }
        }
        return std::pair{k, r};
    };
    std::map<std::pair<std::uint64_t, std::uint64_t>, cplx> acc;
    for (const auto& item : rho.items) {
        const auto [kr, rr] = split(item.row);
        const auto [kc, rc] = split(item.col);
        if (rr == rc) {
            acc[{kr, kc}] += item.value;
        }
    }
    SparseReduced out{std::move(keep), rho.local_dim, {}};
    for (const auto& [rc, v] : acc) {
        out.items.push_back({rc.first, rc.second, v});
    }
    return out;
}

SparseReduced from_grid(const GridDensity& rho) {
    SparseReduced out{rho.factors, rho.local_dim, {}};
    for (Eigen::Index c = 0; c < rho.rho.cols(); ++c) {
        for (Eigen::Index r = 0; r < rho.rho.rows(); ++r) {
            if (rho.rho(r, c) != cplx{}) {
                out.items.push_back({static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(c), rho.rho(r, c)});
            }
        }
    }
    return out;
}

double sparse_negativity(const SparseReduced& rho, std::span<const SiteMode> transpose_in) {
    const auto transpose = sorted_unique({transpose_in.begin(), transpose_in.end()}, "negativity");
    const auto base = static_cast<std::uint64_t>(rho.local_dim);
    const std::size_t n = rho.factors.size();
    std::vector<std::uint64_t> weight(n, 1);
    for (std::size_t p = n; p-- > 1;) {
        weight[p - 1] = weight[p] * base;
    }
    std::vector<bool> in_subset(n, false);
    std::size_t found = 0;
    for (std::size_t p = 0; p < n; ++p) {
        if (std::binary_search(transpose.begin(), transpose.end(), rho.factors[p])) {
            in_subset[p] = true;
            ++found;
        }
    }
    if (transpose.empty() || found != transpose.size() || found == n) {
        throw ContractError("negativity: transposed set must be a proper nonempty subset of the kept site-modes");
    }
    auto sub_part = [&](std::uint64_t code) {
        std::uint64_t s = 0;
        for (std::size_t p = 0; p < n; ++p) {
            if (in_subset[p]) {
                s += ((code / weight[p]) % base) * weight[p];
            }
        }
        return s;
    };

    std::vector<SparseReduced::Item> moved;
    moved.reserve(rho.items.size());
    std::vector<std::uint64_t> support;
    for (const auto& item : rho.items) {
        const std::uint64_t sr = sub_part(item.row);
        const std::uint64_t sc = sub_part(item.col);
        const std::uint64_t r = item.row - sr + sc;
        const std::uint64_t c = item.col - sc + sr;
        moved.push_back({r, c, item.value});
        support.push_back(r);
        support.push_back(c);
    }
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    if (support.empty()) {
        return 0.0;
    }
    std::unordered_map<std::uint64_t, Eigen::Index> slot;
    for (std::size_t i = 0; i < support.size(); ++i) {
        slot[support[i]] = static_cast<Eigen::Index>(i);
    }
    const auto d = static_cast<Eigen::Index>(support.size());
    CMatrix m = CMatrix::Zero(d, d);
    for (const auto& item : moved) {
        m(slot[item.row], slot[item.col]) += item.value;
    }
    m = 0.5 * (m + m.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("negativity: eigensolver did not converge");
    }
    double neg = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        neg += std::max(0.0, -solver.eigenvalues()(i));
    }
    return neg;
}

std::vector<SiteMode> concat(const std::vector<SiteMode>& a, const std::vector<SiteMode>& b) {
    std::vector<SiteMode> out(a);
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

template <class State>
double negativity_impl(const State& state, const Partition& partition) {
    partition.validate();
    return sparse_negativity(reduce(state, concat(partition.side_a, partition.side_b)), partition.side_b);
}

template <class State>
double pairwise_impl(const State& state, SiteMode i, SiteMode j) {
    if (i == j) {
        throw ContractError("pairwise_negativity: site-modes must be distinct");
    }
    return negativity_impl(state, Partition{{i}, {j}});
}

template <class State>
double pi_tangle_impl(const State& state, int species) {
    const auto& basis = *state.basis();
    const auto sites = basis.species_site_modes(species);
    if (sites.size() < 2) {
        throw ContractError("pi_tangle: needs at least two sites");
    }
    const auto reduced = reduce(state, sites);
    double total = 0.0;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const SiteMode si = sites[i];
        const double n_rest = sparse_negativity(reduced, std::span(&si, 1));
        double pairs = 0.0;
        for (std::size_t j = 0; j < sites.size(); ++j) {
            if (j == i) {
                continue;
            }
            const SiteMode sj = sites[j];
            const std::vector<SiteMode> keep{si, sj};
            pairs += std::pow(sparse_negativity(reduce(reduced, keep), std::span(&sj, 1)), 2);
        }
        total += n_rest * n_rest - pairs;
    }
    return total / static_cast<double>(sites.size());
}

template <class State>
double geo_mean_impl(const State& state, int species) {
    const auto& basis = *state.basis();
    const auto sites = basis.species_site_modes(species);
    const auto everything = basis.all_site_modes();
    const auto full = reduce(state, everything);
    double log_sum = 0.0;
    for (const SiteMode s : sites) {
        const double n = sparse_negativity(full, std::span(&s, 1));
        if (n <= 0.0) {
            return 0.0;
        }
        log_sum += std::log(n);
    }
    return std::exp(log_sum / static_cast<double>(sites.size()));
}

PureState aligned_target(const PureState& target, const BasisPtr& basis) {
    if (target.basis().get() == basis.get() || target.basis()->same_as(*basis)) {
        return target;
    }
    return transfer(target, basis);
}

}  // namespace

void Partition::validate() const {
    if (side_a.empty() || side_b.empty()) {
        throw ContractError("Partition: both sides must be nonempty");
    }
    auto a = sorted_unique(side_a, "Partition");
    auto b = sorted_unique(side_b, "Partition");
    std::vector<SiteMode> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    if (!common.empty()) {
        throw ContractError("Partition: sides must be disjoint");
    }
}

Partition Partition::species_split(const OccupationBasis& basis) {
    return {basis.species_site_modes(0), basis.species_site_modes(1)};
}

double negativity(const GridDensity& rho, std::span<const SiteMode> transpose) {
    return sparse_negativity(from_grid(rho), transpose);
}

double negativity(const PureState& psi, const Partition& partition) { return negativity_impl(psi, partition); }
double negativity(const DensityMatrix& rho, const Partition& partition) { return negativity_impl(rho, partition); }

double global_negativity(const PureState& psi) {
    return negativity_impl(psi, Partition::species_split(*psi.basis()));
}
double global_negativity(const DensityMatrix& rho) {
    return negativity_impl(rho, Partition::species_split(*rho.basis()));
}

double pairwise_negativity(const PureState& psi, SiteMode i, SiteMode j) { return pairwise_impl(psi, i, j); }
double pairwise_negativity(const DensityMatrix& rho, SiteMode i, SiteMode j) { return pairwise_impl(rho, i, j); }

double pi_tangle(const PureState& psi, int species) { return pi_tangle_impl(psi, species); }
double pi_tangle(const DensityMatrix& rho, int species) { return pi_tangle_impl(rho, species); }

double geo_mean_tangle(const PureState& psi, int species) { return geo_mean_impl(psi, species); }
double geo_mean_tangle(const DensityMatrix& rho, int species) { return geo_mean_impl(rho, species); }

double fidelity(const DensityMatrix& rho, const PureState& target) {
    const auto t = aligned_target(target, rho.basis());
    const double f = t.amplitudes().dot(rho.matrix() * t.amplitudes()).real();
    return std::clamp(f, 0.0, 1.0);
}

double fidelity(const PureState& psi, const PureState& target) {
    const auto t = aligned_target(target, psi.basis());
    return std::clamp(std::norm(t.amplitudes().dot(psi.amplitudes())), 0.0, 1.0);
}

std::vector<double> schmidt_coefficients(const PureState& psi, const Partition& partition) {
    partition.validate();
    const auto& basis = *psi.basis();
    if (partition.side_a.size() + partition.side_b.size() != static_cast<std::size_t>(basis.site_mode_count())) {
        throw ContractError("schmidt_number: partition must cover every site-mode of a pure state");
    }
    const auto a = sorted_unique(partition.side_a, "schmidt_number");
    std::vector<bool> on_a(static_cast<std::size_t>(basis.site_mode_count()), false);
    for (const auto& sm : a) {
        on_a[static_cast<std::size_t>(basis.flat(sm))] = true;
    }
    const auto base = static_cast<std::uint64_t>(basis.local_dim());
    std::map<std::uint64_t, Eigen::Index> rows;
    std::map<std::uint64_t, Eigen::Index> cols;
    std::vector<std::tuple<std::uint64_t, std::uint64_t, cplx>> entries;
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        const cplx v = psi.amplitudes()(static_cast<Eigen::Index>(i));
        if (v == cplx{}) {
            continue;
        }
        std::uint64_t ra = 0;
        std::uint64_t cb = 0;
        const auto occ = basis.occupation(i);
        for (std::size_t p = 0; p < occ.size(); ++p) {
            auto& code = on_a[p] ? ra : cb;
            code = code * base + static_cast<std::uint64_t>(occ[p]);
        }
        rows.emplace(ra, 0);
        cols.emplace(cb, 0);
        entries.emplace_back(ra, cb, v);
    }
    if (entries.empty()) {
        return {};
    }
    Eigen::Index k = 0;
    for (auto& [code, slot] : rows) {
        slot = k++;
    }
    k = 0;
    for (auto& [code, slot] : cols) {
        slot = k++;
    }
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (const auto& [r, c, v] : entries) {
        m(rows[r], cols[c]) = v;
    }
    Eigen::JacobiSVD<CMatrix> svd(m);
    const auto& s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

int schmidt_number(const PureState& psi, const Partition& partition, double tol) {
    const auto s = schmidt_coefficients(psi, partition);
    if (s.empty()) {
        return 0;
    }
    const double cutoff = tol * s.front();
    return static_cast<int>(std::count_if(s.begin(), s.end(), [cutoff](double x) { return x > cutoff; }));
}

}  // namespace kerrnet
