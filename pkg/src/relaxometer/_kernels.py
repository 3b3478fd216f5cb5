"""Hot inner kernels: partial traces of (outer products of) pure states.

Two interchangeable implementations are provided:

* a numba ``@njit`` kernel operating on precomputed bit maps, and
* a pure-numpy transpose/matmul path.

Selection: the numba path is the default; set ``RELAXOMETER_NO_NUMBA=1`` in
the environment (before import) to force the numpy path.  ``benchmarks/
bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("RELAXOMETER_NO_NUMBA", "0") not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a hard dep, but be safe
        USE_NUMBA = False


def block_sites(num_sites: int, first_site: int, length: int) -> list[int]:
    """Sites of the cyclic contiguous block starting at ``first_site``."""
    return [(first_site + k) % num_sites for k in range(length)]


def _bit_maps(num_sites: int, first_site: int, length: int):
    """Index maps: full index = block_map[a] | rest_map[s].

    Site j occupies bit (num_sites-1-j) of the full index (site 0 = MSB); the
    block's own index orders its sites by position within the block.
    """
    sites = block_sites(num_sites, first_site, length)
    rest = [j for j in range(num_sites) if j not in set(sites)]
    block_bits = np.array([num_sites - 1 - j for j in sites], dtype=np.int64)
    rest_bits = np.array([num_sites - 1 - j for j in rest], dtype=np.int64)

    a = np.arange(2**length, dtype=np.int64)
    block_map = np.zeros(2**length, dtype=np.int64)
    for k, bit in enumerate(block_bits):
        block_map |= ((a >> (length - 1 - k)) & 1) << bit
    s = np.arange(2 ** len(rest), dtype=np.int64)
    rest_map = np.zeros(2 ** len(rest), dtype=np.int64)
    for k, bit in enumerate(rest_bits):
        rest_map |= ((s >> (len(rest) - 1 - k)) & 1) << bit
    return block_map, rest_map


if USE_NUMBA:

    @njit(cache=True)
    def _ptrace_outer_numba(psi, phi, block_map, rest_map):  # pragma: no cover - jit
        da = block_map.shape[0]
        ds = rest_map.shape[0]
        rho = np.zeros((da, da), dtype=np.complex128)
        for a in range(da):
            ia = block_map[a]
            for b in range(da):
                ib = block_map[b]
                acc = 0.0 + 0.0j
                for s in range(ds):
                    r = rest_map[s]
                    acc += psi[ia | r] * np.conj(phi[ib | r])
                rho[a, b] = acc
        return rho


def _ptrace_outer_numpy(psi, phi, num_sites, first_site, length):
    sites = block_sites(num_sites, first_site, length)
    rest = [j for j in range(num_sites) if j not in set(sites)]
    perm = sites + rest
    a = psi.reshape([2] * num_sites).transpose(perm).reshape(2**length, -1)
    if phi is psi:
        b = a
    else:
        b = phi.reshape([2] * num_sites).transpose(perm).reshape(2**length, -1)
    return a @ b.conj().T


_MAP_CACHE: dict[tuple[int, int, int], tuple[np.ndarray, np.ndarray]] = {}


def ptrace_outer(
    psi: np.ndarray,
    phi: np.ndarray,
    num_sites: int,
    first_site: int,
    length: int,
) -> np.ndarray:
    """tr over the block complement of |psi><phi| (raw-array kernel).

    The block is the cyclic contiguous run of ``length`` sites starting at
    ``first_site``.  Returns a 2^length x 2^length complex matrix.
    """
    if USE_NUMBA:
        key = (num_sites, first_site, length)
        maps = _MAP_CACHE.get(key)
        if maps is None:
            maps = _bit_maps(num_sites, first_site, length)
            _MAP_CACHE[key] = maps
        return _ptrace_outer_numba(
            np.ascontiguousarray(psi), np.ascontiguousarray(phi), *maps
        )
    return _ptrace_outer_numpy(psi, phi, num_sites, first_site, length)
