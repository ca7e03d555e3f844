#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"

namespace pmc {

using Rational = boost::multiprecision::cpp_rational;

/// Symbolic global data of a sheaf on C_n: rank and degree of each graded
/// piece of the first canonical filtration, plus the curve constants.
struct SheafDescriptor {
    int n = 1;
    long long genus = 0;
    long long degL = 0;
    std::vector<std::pair<long long, long long>> gr;  // (rank_i, deg_i), i = 1..n

    long long rank() const {
        long long r = 0;
        for (auto& g : gr) r += g.first;
        return r;
    }
    long long degree() const {
        long long d = 0;
        for (auto& g : gr) d += g.second;
        return d;
    }
};

struct RiemannRochResult {
    long long rank = 0;
    long long degree = 0;
    std::optional<Rational> slope;
    long long chi = 0;
    // Hilbert polynomial chi + R*delta*X as (constant, linear) coefficients
    std::optional<std::pair<long long, long long>> hilbert;
};

RiemannRochResult rr_invariants(const SheafDescriptor& d, std::optional<long long> delta);

SheafDescriptor locally_free_descriptor(int n, long long r, long long deg_restriction, long long genus,
                                        long long degL);

SheafDescriptor ideal_points_descriptor(int n, long long genus, long long degL, long long p0);

bool semistability(const SheafDescriptor& sub, const SheafDescriptor& whole, bool strict);

struct QlfPair {
    long long rank = 0, deg = 0;
};

struct Qlf2Result {
    QlfPair E, F, Gamma, G;
    long long total_degree = 0;
    // dual sheaf bookkeeping
    QlfPair dual_E, dual_F, dual_G;
};

Qlf2Result qlf2_relations(QlfPair E, QlfPair F, long long degL);

/// (rank, deg) data of E, F, G for the tensor product of two quasi-locally-free sheaves.
struct QlfTensorResult {
    QlfPair E, F, G;
};

QlfTensorResult qlf2_tensor(const Qlf2Result& a, const Qlf2Result& b, long long degL);

struct HalvingResult {
    bool parity_ok = false;
    long long value = 0;  // meaningful only when parity_ok
};

HalvingResult rank2_degree(long long d, long long degL, long long index);
HalvingResult deformation_threshold(long long d, long long degL, long long index);

struct Rank3Result {
    long long total_degree = 0;
    long long degF = 0;
    long long degG = 0;
    bool window_semistable = false;
    bool window_stable = false;
    bool moduli_hypothesis = false;
    long long moduli_dim = 0;
};

Rank3Result rank3_analysis(long long eps, long long gamma, long long l, long long genus);

struct IdealExtResult {
    long long dim_ext_cn = 0;
    long long dim_ext_s = 0;
    long long codim = 0;
    long long end_dim = 0;
};

IdealExtResult ideal_ext_dims(int n, long long csq, long long ksc, long long p0, long long h0_a, long long h0_b,
                              long long h0_k);

}  // namespace pmc
