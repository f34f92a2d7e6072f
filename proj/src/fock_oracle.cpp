#include "latticeglow/fock_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>

#include "latticeglow/parallel.hpp"

namespace latticeglow {

namespace {

// Multinomial weights use exact 128-bit integers while N + M stays small
// enough for M^N and N! to fit.
constexpr std::int64_t exact_weight_limit = 32;
using wide_uint = unsigned __int128;

constexpr std::size_t reduction_chunk = 1u << 14;

template <std::size_t Width>
using Partial = std::array<double, Width>;

// Sums term(entry, acc) over all entries. Chunk boundaries and the pairwise
// combination tree depend only on the entry count, so the result does not
// depend on how many threads ran.
template <std::size_t Width, class Term>
Partial<Width> chunked_sum(std::size_t count, const Term& term) {
    const std::size_t chunks = std::max<std::size_t>(1, (count + reduction_chunk - 1) / reduction_chunk);
    std::vector<Partial<Width>> partial(chunks, Partial<Width>{});
    parallel_for(chunks, [&](std::size_t c) {
        Partial<Width> acc{};
        const std::size_t end = std::min(count, (c + 1) * reduction_chunk);
        for (std::size_t i = c * reduction_chunk; i < end; ++i)
            term(i, acc);
        partial[c] = acc;
    });
    for (std::size_t stride = 1; stride < partial.size(); stride *= 2)
        for (std::size_t i = 0; i + stride < partial.size(); i += 2 * stride)
            for (std::size_t k = 0; k < Width; ++k)
                partial[i][k] += partial[i + stride][k];
    return partial.front();
}

void check_capacity(double entries, const EnumerateOptions& options, const std::string& what) {
    if (entries > static_cast<double>(options.max_entries))
        throw BasisTooLarge(what + " basis needs " + std::to_string(entries) + " entries, cap is " +
                            std::to_string(options.max_entries) + "; reduce N or M or raise the cap");
}

wide_uint binomial_wide(std::uint32_t n, std::uint32_t k) {
    k = std::min(k, n - k);
    wide_uint result = 1;
    for (std::uint32_t i = 1; i <= k; ++i)
        result = result * (n - k + i) / i;
    return result;
}

OccupationDistribution enumerate_mott(const AtomState& state) {
    const auto n = static_cast<std::uint32_t>(state.atoms() / state.sites());
    const auto m = static_cast<std::size_t>(state.sites());
    return {static_cast<int>(m), std::vector<std::uint32_t>(m, n), {1.0}, 0.0};
}

OccupationDistribution enumerate_superfluid(const AtomState& state, const EnumerateOptions& options) {
    const auto atoms = static_cast<std::uint32_t>(state.atoms());
    const auto sites = static_cast<int>(state.sites());
    check_capacity(superfluid_basis_size(state.atoms(), state.sites()), options, "superfluid");

    const bool exact = state.atoms() + state.sites() <= exact_weight_limit;
    wide_uint total_weight = 1;
    for (std::uint32_t i = 0; i < atoms; ++i)
        total_weight *= static_cast<wide_uint>(sites);
    const double log_total = std::lgamma(atoms + 1.0) - atoms * std::log(static_cast<double>(sites));

    std::vector<std::uint32_t> occupations;
    std::vector<double> probabilities;
    std::vector<std::uint32_t> q(static_cast<std::size_t>(sites), 0);

    const auto emit = [&] {
        occupations.insert(occupations.end(), q.begin(), q.end());
        if (exact) {
            wide_uint coefficient = 1;
            std::uint32_t remaining = atoms;
            for (std::uint32_t qi : q) {
                coefficient *= binomial_wide(remaining, qi);
                remaining -= qi;
            }
            probabilities.push_back(static_cast<double>(coefficient) / static_cast<double>(total_weight));
        } else {
            double log_p = log_total;
            for (std::uint32_t qi : q)
                log_p -= std::lgamma(qi + 1.0);
            probabilities.push_back(std::exp(log_p));
        }
    };

    std::function<void(int, std::uint32_t)> fill = [&](int site, std::uint32_t remaining) {
        if (site == sites - 1) {
            q[static_cast<std::size_t>(site)] = remaining;
            emit();
            return;
        }
        for (std::uint32_t take = remaining + 1; take-- > 0;) {
            q[static_cast<std::size_t>(site)] = take;
            fill(site + 1, remaining - take);
        }
    };
    fill(0, atoms);

    return {sites, std::move(occupations), std::move(probabilities), 0.0};
}

OccupationDistribution enumerate_coherent(const AtomState& state, const EnumerateOptions& options) {
    if (!(options.cutoff_tail > 0.0) || options.cutoff_tail > 1e-6)
        throw std::invalid_argument("coherent enumeration needs 0 < cutoff_tail <= 1e-6");
    const double mean = state.filling();
    const auto sites = static_cast<int>(state.sites());
    const double site_budget = options.cutoff_tail / sites;

    // Poisson(mean) masses far enough out that the remaining tail is
    // negligible next to the budget.
    std::vector<double> pmf;
    for (int q = 0;; ++q) {
        const double log_p = q * std::log(mean) - mean - std::lgamma(q + 1.0);
        pmf.push_back(std::exp(log_p));
        if (q > mean && pmf.back() < site_budget * 1e-6)
            break;
    }
    std::vector<double> tail_after(pmf.size() + 1, 0.0);
    for (std::size_t q = pmf.size(); q-- > 0;)
        tail_after[q] = tail_after[q + 1] + pmf[q];
    std::size_t q_max = 0;
    while (tail_after[q_max + 1] > site_budget)
        ++q_max;
    const double site_tail = tail_after[q_max + 1];

    const double levels = static_cast<double>(q_max + 1);
    check_capacity(std::pow(levels, sites), options, "coherent");
    const std::size_t count = static_cast<std::size_t>(std::llround(std::pow(levels, sites)));

    std::vector<std::uint32_t> occupations;
    occupations.reserve(count * static_cast<std::size_t>(sites));
    std::vector<double> probabilities;
    probabilities.reserve(count);

    std::vector<std::uint32_t> q(static_cast<std::size_t>(sites), static_cast<std::uint32_t>(q_max));
    for (std::size_t entry = 0; entry < count; ++entry) {
        occupations.insert(occupations.end(), q.begin(), q.end());
        double p = 1.0;
        for (std::uint32_t qi : q)
            p *= pmf[qi];
        probabilities.push_back(p);

        for (std::size_t s = q.size(); s-- > 0;) {
            if (q[s] > 0) {
                --q[s];
                break;
            }
            q[s] = static_cast<std::uint32_t>(q_max);
        }
    }

    const double deficit = -std::expm1(sites * std::log1p(-site_tail));
    return {sites, std::move(occupations), std::move(probabilities), deficit};
}

} // namespace

OccupationDistribution::OccupationDistribution(int sites, std::vector<std::uint32_t> occupations,
                                               std::vector<double> probabilities, double truncation_deficit)
    : sites_(sites), occupations_(std::move(occupations)), probabilities_(std::move(probabilities)),
      truncation_deficit_(truncation_deficit) {
    if (sites_ < 1 || occupations_.size() != probabilities_.size() * static_cast<std::size_t>(sites_))
        throw std::invalid_argument("occupation distribution shape mismatch");
}

void OccupationDistribution::write_csv(std::ostream& out) const {
    for (int s = 1; s <= sites_; ++s)
        out << 'q' << s << ',';
    out << "p\n";
    char buffer[32];
    for (std::size_t e = 0; e < size(); ++e) {
        for (std::uint32_t qi : occupation(e))
            out << qi << ',';
        std::snprintf(buffer, sizeof buffer, "%.17g", probabilities_[e]);
        out << buffer << '\n';
    }
}

double superfluid_basis_size(std::int64_t atoms, std::int64_t sites) {
    // C(N + M - 1, M - 1) via the shorter product.
    const double n = static_cast<double>(atoms + sites - 1);
    const std::int64_t k = std::min(atoms, sites - 1);
    double result = 1.0;
    for (std::int64_t i = 1; i <= k; ++i)
        result = result * (n - k + i) / i;
    return std::round(result);
}

OccupationDistribution enumerate(const AtomState& state, const EnumerateOptions& options) {
    switch (state.kind()) {
    case StateKind::mott_insulator: return enumerate_mott(state);
    case StateKind::superfluid: return enumerate_superfluid(state, options);
    case StateKind::coherent: return enumerate_coherent(state, options);
    }
    throw std::logic_error("unhandled state kind");
}

OracleMoments oracle_d_moments(const OccupationDistribution& dist, const GeometryCoefficients& coeffs,
                               double beta) {
    if (coeffs.first_site < 1 || coeffs.first_site - 1 + coeffs.size() > dist.sites())
        throw std::invalid_argument("coefficient window [" + std::to_string(coeffs.first_site) + ", " +
                                    std::to_string(coeffs.first_site + coeffs.size() - 1) +
                                    "] does not fit a lattice of " + std::to_string(dist.sites()) + " sites");

    const auto first = static_cast<std::size_t>(coeffs.first_site - 1);
    const complex rotation = std::polar(1.0, -beta);
    // Reused across calls; repeated scans over one distribution would
    // otherwise spend much of their time faulting in fresh pages.
    thread_local std::vector<complex> d_buffer;
    d_buffer.resize(dist.size());
    std::vector<complex>& d_values = d_buffer; // workers must see this thread's buffer
    chunked_sum<1>(dist.size(), [&](std::size_t e, Partial<1>&) {
        const auto q = dist.occupation(e);
        complex d;
        for (std::size_t i = 0; i < coeffs.a.size(); ++i)
            d += coeffs.a[i] * static_cast<double>(q[first + i]);
        d_values[e] = d;
    });

    const double norm = 1.0 / (1.0 - dist.truncation_deficit());

    const auto raw = chunked_sum<5>(dist.size(), [&](std::size_t e, Partial<5>& acc) {
        const double p = dist.probability(e);
        const complex d = d_values[e];
        const double d2 = std::norm(d);
        acc[0] += p * d.real();
        acc[1] += p * d.imag();
        acc[2] += p * d2;
        acc[3] += p * d2 * d2;
        acc[4] += p * (d * rotation).real();
    });

    OracleMoments out;
    out.amp = complex(raw[0], raw[1]) * norm;
    out.intensity = raw[2] * norm;
    out.fourth = raw[3] * norm;
    out.quad_mean = raw[4] * norm;

    const auto centered = chunked_sum<3>(dist.size(), [&](std::size_t e, Partial<3>& acc) {
        const double p = dist.probability(e);
        const complex d = d_values[e];
        const double dx = (d * rotation).real() - out.quad_mean;
        const double di = std::norm(d) - out.intensity;
        acc[0] += p * std::norm(d - out.amp);
        acc[1] += p * dx * dx;
        acc[2] += p * di * di;
    });
    out.noise_r = centered[0] * norm;
    out.quad_var = centered[1] * norm;
    out.fourth_var = centered[2] * norm;
    return out;
}

double oracle_raw_moment(const OccupationDistribution& dist, std::span<const int> sites,
                         std::span<const int> powers) {
    if (sites.size() != powers.size() || sites.empty())
        throw std::invalid_argument("oracle_raw_moment needs matching, non-empty site and power lists");
    for (std::size_t r = 0; r < sites.size(); ++r) {
        if (powers[r] < 0)
            throw std::invalid_argument("oracle_raw_moment needs nonnegative powers");
        if (sites[r] < 1 || sites[r] > dist.sites())
            throw std::invalid_argument("site index " + std::to_string(sites[r]) + " outside 1.." +
                                        std::to_string(dist.sites()));
        for (std::size_t s = 0; s < r; ++s)
            if (sites[s] == sites[r])
                throw std::invalid_argument("oracle_raw_moment needs distinct sites; site " +
                                            std::to_string(sites[r]) + " repeats");
    }

    const auto total = chunked_sum<1>(dist.size(), [&](std::size_t e, Partial<1>& acc) {
        const auto q = dist.occupation(e);
        double term = dist.probability(e);
        for (std::size_t r = 0; r < sites.size(); ++r) {
            const double n = q[static_cast<std::size_t>(sites[r] - 1)];
            for (int k = 0; k < powers[r]; ++k)
                term *= n;
        }
        acc[0] += term;
    });
    return total[0] / (1.0 - dist.truncation_deficit());
}

} // namespace latticeglow
