# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled realization engine.

Consumes raw next_double variates from a numpy BitGenerator in exactly the
order documented in engine_py, so both engines produce bit-identical results
from the same stream state.
"""
import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport cos, fabs, log1p, pow, sin, sqrt
from numpy.random cimport bitgen_t

DEF TWO_PI = 6.283185307179586476925286766559


cdef inline double _uniform(bitgen_t *rng) noexcept nogil:
    return rng.next_double(rng.state)


cdef inline double _pathloss(double d2, double alpha,
                             double neg_half_alpha) noexcept nogil:
    # d2^(-alpha/2) with fast paths for the common exponents
    if alpha == 3.0:
        return 1.0 / (d2 * sqrt(d2))
    if alpha == 4.0:
        return 1.0 / (d2 * d2)
    return pow(d2, neg_half_alpha)


def run_realization(object bit_generator, Py_ssize_t n, double side,
                    double r_link, double alpha, double theta,
                    double inv_gamma, double q, double xi, long slots,
                    long warmup_slots, double cutoff2, bint torus,
                    double ffi_coeff=0.0):
    """Simulate one realization; returns the RealizationResult field tuple.

    cutoff2 is the squared cutoff radius (inf disables the cutoff);
    ffi_coeff is the far-field interference coefficient (see engine_py).
    """
    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(
        bit_generator.capsule, "BitGenerator")

    cdef Py_ssize_t ntot = n + 1
    cdef double[::1] txx = np.empty(ntot)
    cdef double[::1] txy = np.empty(ntot)
    cdef double[::1] rxx = np.empty(ntot)
    cdef double[::1] rxy = np.empty(ntot)
    cdef unsigned char[::1] queue = np.zeros(ntot, dtype=np.uint8)
    cdef unsigned char[::1] arrived = np.empty(ntot, dtype=np.uint8)
    cdef unsigned char[::1] granted = np.empty(ntot, dtype=np.uint8)
    cdef Py_ssize_t[::1] act = np.empty(ntot, dtype=np.intp)
    cdef unsigned char[::1] succ = np.empty(ntot, dtype=np.uint8)

    cdef double center = side / 2.0
    cdef double phi0 = _uniform(rng) * TWO_PI
    rxx[0] = center
    rxy[0] = center
    txx[0] = center + r_link * cos(phi0)
    txy[0] = center + r_link * sin(phi0)

    cdef double neg_half_alpha = -alpha / 2.0
    cdef double r_pow_own = pow(r_link, -alpha)
    cdef bint saturated = xi == 1.0

    cdef long gen0 = 0
    cdef long age = 1
    cdef long peak_sum = 0, peak_count = 0, attempts = 0, successes = 0
    cdef long drops = 0, empty_slots = 0, measured = 0

    cdef long t
    cdef Py_ssize_t k, j, a_i, b_j, i, m
    cdef bint measure, succ0, active0
    cdef double a, dx, dy, d2, h, own, interf, i_far

    for t in range(slots):
        measure = t >= warmup_slots
        if measure:
            measured += 1
            if not queue[0]:
                empty_slots += 1

        for k in range(ntot):
            arrived[k] = _uniform(rng) < xi
        for k in range(ntot):
            granted[k] = _uniform(rng) < q
        for j in range(n):
            txx[j + 1] = _uniform(rng) * side
            txy[j + 1] = _uniform(rng) * side
        for j in range(n):
            a = _uniform(rng) * TWO_PI
            rxx[j + 1] = txx[j + 1] + r_link * cos(a)
            rxy[j + 1] = txy[j + 1] + r_link * sin(a)

        if arrived[0]:
            if queue[0]:
                if measure:
                    drops += 1
            else:
                gen0 = t
        for k in range(ntot):
            if arrived[k]:
                queue[k] = 1

        m = 0
        for k in range(1, ntot):
            if queue[k] and granted[k]:
                act[m] = k
                m += 1
        i_far = ffi_coeff * m / n if n > 0 else 0.0
        active0 = queue[0] and granted[0]

        succ0 = False
        if saturated:
            if active0:
                own = -log1p(-_uniform(rng)) * r_pow_own
                interf = 0.0
                for b_j in range(m):
                    j = act[b_j]
                    dx = fabs(rxx[0] - txx[j])
                    dy = fabs(rxy[0] - txy[j])
                    if torus:
                        if side - dx < dx:
                            dx = side - dx
                        if side - dy < dy:
                            dy = side - dy
                    d2 = dx * dx + dy * dy
                    if d2 <= cutoff2:
                        h = -log1p(-_uniform(rng))
                        interf += h * _pathloss(d2, alpha, neg_half_alpha)
                succ0 = own > theta * (interf + i_far + inv_gamma)
                queue[0] = not succ0
        elif m > 0 or active0:
            # fold the typical link into the active list, keeping it first
            if active0:
                for b_j in range(m, 0, -1):
                    act[b_j] = act[b_j - 1]
                act[0] = 0
                m += 1
            for a_i in range(m):
                i = act[a_i]
                own = 0.0
                interf = 0.0
                for b_j in range(m):
                    j = act[b_j]
                    if j == i:
                        h = -log1p(-_uniform(rng))
                        own = h * r_pow_own
                    else:
                        dx = fabs(rxx[i] - txx[j])
                        dy = fabs(rxy[i] - txy[j])
                        if torus:
                            if side - dx < dx:
                                dx = side - dx
                            if side - dy < dy:
                                dy = side - dy
                        d2 = dx * dx + dy * dy
                        if d2 <= cutoff2:
                            h = -log1p(-_uniform(rng))
                            interf += h * _pathloss(d2, alpha, neg_half_alpha)
                succ[a_i] = own > theta * (interf + i_far + inv_gamma)
            for a_i in range(m):
                if succ[a_i]:
                    queue[act[a_i]] = 0
            if active0:
                succ0 = succ[0]

        if measure and active0:
            attempts += 1
            if succ0:
                successes += 1
        if succ0:
            if measure:
                peak_sum += age + 1
                peak_count += 1
            age = t - gen0 + 1
        else:
            age += 1

    return (peak_sum, peak_count, attempts, successes, drops, empty_slots,
            measured)
