import numpy as np
import pytest
from oracles import sample_jz_slice, slice_energies

from bandflow.classical import (ClassicalPoint, dh_volume, em_image,
                                h_classical, orbit_space_check,
                                reduced_invariants, syzygy_residual)
from bandflow.params import PhysParams


def params(A=0.0, delta=0.0, d=0.0, gamma=1.0 + 0.0j, L=5, S=2.0):
    return PhysParams(A=A, delta=delta, d=d, gamma=gamma, L=L, S=S)


def random_point(rng, s_norm, l_norm):
    s = rng.normal(size=3)
    l = rng.normal(size=3)
    return ClassicalPoint(svec=s_norm * s / np.linalg.norm(s),
                          lvec=l_norm * l / np.linalg.norm(l))


# ---------------------------------------------------------------- energies

def test_energy_at_poles():
    p = params(A=1.2, delta=0.7, d=-0.2, gamma=2.0 + 3.0j)
    point = ClassicalPoint(svec=[0.0, 0.0, p.S], lvec=[0.0, 0.0, p.L])
    expected = 2.0 * p.S * (p.A + p.delta * p.L + p.d * p.L ** 2)
    assert h_classical(point, p) == pytest.approx(expected, abs=1e-12)


def test_energy_aligned_in_plane():
    p = params(gamma=1.5 + 0.0j)
    point = ClassicalPoint(svec=[p.S, 0.0, 0.0], lvec=[p.L, 0.0, 0.0])
    assert h_classical(point, p) == pytest.approx(2.0 * 1.5 * p.S * p.L, abs=1e-12)


def test_energy_reflection_delta_zero():
    rng = np.random.default_rng(5)
    p = params(A=0.8, d=0.4, gamma=1.0 - 2.0j)
    p_conj = params(A=0.8, d=0.4, gamma=1.0 + 2.0j)
    for _ in range(20):
        point = random_point(rng, p.S, float(p.L))
        sx, sy, sz = point.svec
        lx, ly, lz = point.lvec
        energy = h_classical(point, p)
        # point map sending (tau, sigma, S_z, L_z) -> -(tau, sigma, S_z, L_z)
        flipped = ClassicalPoint(svec=[sx, sy, -sz], lvec=[-lx, -ly, -lz])
        assert h_classical(flipped, p) == pytest.approx(-energy, abs=1e-10)
        # the antilinear form: S+- -> S-+, L+- -> -L-+ plus conjugated gamma
        anti = ClassicalPoint(svec=[sx, -sy, -sz], lvec=[-lx, ly, -lz])
        assert h_classical(anti, p_conj) == pytest.approx(-energy, abs=1e-10)


def test_h_classical_rejects_wrong_radii():
    p = params()
    with pytest.raises(ValueError, match="radii"):
        h_classical(ClassicalPoint(svec=[1.0, 0.0, 0.0], lvec=[p.L, 0.0, 0.0]), p)


def test_jz_is_conserved_along_rotation():
    rng = np.random.default_rng(9)
    p = params(A=-1.1, delta=0.3, d=0.2, gamma=0.7 + 0.4j)
    eps = 1e-3
    for _ in range(10):
        point = random_point(rng, p.S, float(p.L))

        def rotated(t):
            rot = np.array([
                [np.cos(t), -np.sin(t), 0.0],
                [np.sin(t), np.cos(t), 0.0],
                [0.0, 0.0, 1.0],
            ])
            return ClassicalPoint(svec=rot @ point.svec, lvec=rot @ point.lvec)

        derivative = (h_classical(rotated(eps), p)
                      - h_classical(rotated(-eps), p)) / (2 * eps)
        assert abs(derivative) < 1e-8


# ---------------------------------------------------------------- orbit space

def test_syzygy_residual_random_points():
    rng = np.random.default_rng(13)
    points = [random_point(rng, 2.0, 5.0) for _ in range(200)]
    report = orbit_space_check(points)
    assert report.ok
    assert report.max_residual < 1e-10
    assert report.n_points == 200


def test_syzygy_equality_at_poles():
    point = ClassicalPoint(svec=[0.0, 0.0, 2.0], lvec=[0.0, 0.0, -5.0])
    inv = reduced_invariants(point)
    assert inv.tau == 0.0 and inv.sigma == 0.0
    assert abs(syzygy_residual(point)) < 1e-12


def test_interior_orbits_come_in_sigma_pairs():
    # flipping the sign of sigma (reflect S about the L in-plane axis grid)
    rng = np.random.default_rng(17)
    for _ in range(20):
        point = random_point(rng, 2.0, 5.0)
        mirrored = ClassicalPoint(
            svec=[point.svec[0], -point.svec[1], point.svec[2]],
            lvec=[point.lvec[0], -point.lvec[1], point.lvec[2]],
        )
        inv = reduced_invariants(point)
        inv_m = reduced_invariants(mirrored)
        assert inv_m.sigma == pytest.approx(-inv.sigma, abs=1e-12)
        assert inv_m.tau == pytest.approx(inv.tau, abs=1e-12)
        assert abs(syzygy_residual(mirrored)) < 1e-10


# ---------------------------------------------------------------- EM image

def test_extreme_slice_is_single_point():
    p = params(A=0.9, delta=0.2, d=0.1)
    jz_top = float(p.L) + p.S
    image = em_image(p, [jz_top])
    expected = 2.0 * p.S * (p.A + p.delta * p.L + p.d * p.L ** 2)
    assert image.e_min[0] == pytest.approx(expected, abs=1e-9)
    assert image.e_max[0] == pytest.approx(expected, abs=1e-9)


def test_monodromy_points_interior_at_a_zero():
    p = params(A=0.0, gamma=1.0 + 0.0j)
    image = em_image(p, np.linspace(-7, 7, 29))
    by_jz = {}
    for cv in image.critical_values:
        by_jz.setdefault(abs(cv.jz), set()).add(cv.location)
    assert by_jz[3.0] == {"interior"}
    assert by_jz[7.0] == {"boundary"}


def test_all_critical_values_boundary_for_big_a():
    p = params(A=10.0 * 1.0 * 7.0, gamma=1.0 + 0.0j)
    image = em_image(p, [0.0])
    assert all(cv.location == "boundary" for cv in image.critical_values)


def test_image_symmetry_delta_zero():
    p = params(A=0.4, d=0.3, gamma=1.0 - 0.5j)
    jz = np.linspace(-7, 7, 57)
    image = em_image(p, jz)
    assert np.max(np.abs(image.e_min + image.e_max[::-1])) < 1e-10
    assert np.max(np.abs(image.e_max + image.e_min[::-1])) < 1e-10


def test_slice_ranges_contain_monte_carlo_oracle():
    rng = np.random.default_rng(101)
    p = params(A=0.7, delta=0.4, d=0.15, gamma=1.1 + 0.8j)
    jz_list = [-5.5, -3.0, -1.0, 0.0, 2.0, 4.5, 6.0]
    image = em_image(p, jz_list)
    for i, jz in enumerate(jz_list):
        svec, lvec = sample_jz_slice(rng, p.S, float(p.L), jz, 20000)
        energies = slice_energies(svec, lvec, p)
        span = image.e_max[i] - image.e_min[i]
        assert energies.min() >= image.e_min[i] - 1e-9 * (1 + abs(span))
        assert energies.max() <= image.e_max[i] + 1e-9 * (1 + abs(span))
        assert energies.min() - image.e_min[i] < 0.01 * span
        assert image.e_max[i] - energies.max() < 0.01 * span


def test_em_image_rejects_out_of_support():
    with pytest.raises(ValueError, match="outside"):
        em_image(params(), [8.0])


def test_em_image_rejects_gamma_zero():
    with pytest.raises(ValueError, match="gamma"):
        em_image(params(gamma=0.0 + 0.0j), [0.0])


# ---------------------------------------------------------------- DH volume

def test_dh_profile_shape_5_2():
    from bandflow.classical import ReducedVolumeProfile

    jz = np.arange(-7.0, 7.25, 0.25)
    profile = dh_volume(2.0, 5.0, jz)
    inner = np.abs(jz) <= 3.0
    assert np.allclose(profile.volume[inner], 4.0, atol=1e-12)
    assert profile.volume[0] == 0.0 and profile.volume[-1] == 0.0
    second = np.diff(profile.volume, n=2)
    interior = jz[1:-1]
    assert ReducedVolumeProfile.kinks(2.0, 5.0) == (-7.0, -3.0, 3.0, 7.0)
    kink = np.isin(interior, ReducedVolumeProfile.kinks(2.0, 5.0))
    assert np.max(np.abs(second[~kink])) < 1e-9
    assert np.all(np.abs(second[kink]) > 0.1)


def test_dh_equal_radii_single_interior_kink():
    jz = np.arange(-6.0, 6.5, 0.5)
    profile = dh_volume(3.0, 3.0, jz)
    second = np.diff(profile.volume, n=2)
    interior = jz[1:-1]
    kink = np.isin(interior, [-6.0, 0.0, 6.0])
    assert np.max(np.abs(second[~kink])) < 1e-9
    assert profile.volume[np.where(jz == 0.0)[0][0]] == pytest.approx(6.0)


def test_dh_vanishes_at_support_edge():
    profile = dh_volume(2.0, 5.0, [-7.0, 7.0])
    assert np.all(profile.volume == 0.0)


def test_dh_rejects_bad_radii():
    with pytest.raises(ValueError):
        dh_volume(0.0, 5.0, [0.0])
