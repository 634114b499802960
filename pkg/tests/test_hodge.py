import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import triangle_doc
from faashodge import betti, build_complex, hodge_decompose, incidence_matrices, laplacians, spectrum
from faashodge.hodge import CochainError, read_cochain, write_cochain
from faashodge.oracles import decompose_oracle, random_complex


def test_identity_metric_laplacians(filled_B):
    L0, L1, L2 = laplacians(filled_B)
    B1, B2 = filled_B.B1, filled_B.B2
    np.testing.assert_array_equal(L0, B1 @ B1.T)
    np.testing.assert_array_equal(L1, B1.T @ B1 + B2 @ B2.T)
    np.testing.assert_array_equal(L2, [[3.0]])
    np.testing.assert_array_equal(np.diag(L0), [2, 2, 2])


def test_weighted_laplacians(rng):
    K = random_complex(rng, max_faces=5)
    B = incidence_matrices(K)
    m = rng.uniform(0.1, 3.0, K.n_edges)
    L0, L1, L2 = laplacians(B, m)
    M = np.diag(m)
    np.testing.assert_allclose(L0, B.B1 @ M @ B.B1.T)
    np.testing.assert_allclose(L2, B.B2.T @ np.linalg.inv(M) @ B.B2)
    # self-adjoint in the M1 inner product
    np.testing.assert_allclose(M @ L1, (M @ L1).T, atol=1e-12)


def test_nonpositive_weight_rejected(open_B):
    with pytest.raises(ValueError):
        laplacians(open_B, [1.0, 0.0, 1.0])


def test_cycle_on_open_triangle_is_harmonic(open_B):
    d = hodge_decompose([1, 1, -1], open_B)
    np.testing.assert_allclose(d.grad, 0, atol=1e-12)
    np.testing.assert_allclose(d.curl, 0, atol=1e-12)
    np.testing.assert_allclose(d.harm, [1, 1, -1], atol=1e-12)


def test_cycle_on_filled_triangle_is_curl(filled_B):
    d = hodge_decompose([1, 1, -1], filled_B)
    np.testing.assert_allclose(d.psi, [1.0], atol=1e-12)
    np.testing.assert_allclose(d.curl, [1, 1, -1], atol=1e-12)
    np.testing.assert_allclose(d.harm, 0, atol=1e-12)


def test_exact_gradient(open_B):
    d = hodge_decompose([1, 0, 1], open_B)
    # min-norm potential is (0, 1, 1) shifted to zero mean
    np.testing.assert_allclose(d.phi - d.phi.mean(), np.array([0, 1, 1]) - 2 / 3, atol=1e-12)
    np.testing.assert_allclose(d.phi.sum(), 0, atol=1e-12)
    np.testing.assert_allclose(d.grad, [1, 0, 1], atol=1e-12)
    np.testing.assert_allclose(d.curl + d.harm, 0, atol=1e-12)


def test_zero_flow(filled_B):
    d = hodge_decompose(np.zeros(3), filled_B, [0.5, 2, 1])
    assert d.energies == (0.0, 0.0, 0.0)
    assert d.orthogonality_residual() == 0.0


@pytest.mark.parametrize("f", [[1, 2], [1, np.nan, 2]])
def test_bad_flow_rejected(open_B, f):
    with pytest.raises(ValueError):
        hodge_decompose(f, open_B)


def _random_case(rng):
    K = random_complex(rng)
    B = incidence_matrices(K)
    f = rng.normal(size=K.n_edges) * rng.uniform(0.1, 50)
    m = rng.uniform(1e-3, 2.0, K.n_edges)
    return B, f, m


def test_weighted_components_match_projector_oracle(rng):
    for _ in range(30):
        B, f, m = _random_case(rng)
        d = hodge_decompose(f, B, m)
        grad, curl, harm = decompose_oracle(f, B, m)
        scale = max(1.0, np.linalg.norm(f))
        np.testing.assert_allclose(d.grad, grad, atol=1e-8 * scale)
        np.testing.assert_allclose(d.curl, curl, atol=1e-8 * scale)
        np.testing.assert_allclose(d.harm, harm, atol=1e-8 * scale)


def test_harmonic_conditions(rng):
    for _ in range(30):
        B, f, m = _random_case(rng)
        d = hodge_decompose(f, B, m)
        norm = np.sqrt(d.total_energy)
        assert np.linalg.norm(B.B1 @ (m * d.harm)) <= 1e-8 * max(norm, 1)
        assert np.linalg.norm(B.B2.T @ d.harm) <= 1e-8 * max(norm, 1)


def test_exactness_and_idempotence(rng):
    for _ in range(20):
        B, f, m = _random_case(rng)
        d = hodge_decompose(f, B, m)
        scale = max(1.0, np.linalg.norm(f))
        for part, zero_attrs in ((d.curl, ("grad",)), (d.grad, ("curl",)), (d.harm, ("grad", "curl"))):
            again = hodge_decompose(part, B, m)
            for attr in zero_attrs:
                assert np.linalg.norm(getattr(again, attr)) <= 1e-8 * scale
        np.testing.assert_allclose(hodge_decompose(d.harm, B, m).harm, d.harm, atol=1e-8 * scale)


def test_linearity(rng):
    for _ in range(20):
        B, f, m = _random_case(rng)
        g = rng.normal(size=f.size)
        a, b = rng.normal(size=2)
        lhs = hodge_decompose(a * f + b * g, B, m)
        df, dg = hodge_decompose(f, B, m), hodge_decompose(g, B, m)
        for attr in ("grad", "curl", "harm"):
            expected = a * getattr(df, attr) + b * getattr(dg, attr)
            scale = np.linalg.norm(a * f) + np.linalg.norm(b * g)
            assert np.linalg.norm(getattr(lhs, attr) - expected) <= 1e-8 * scale


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), c=st.floats(1e-3, 1e3))
def test_scale_covariance(seed, c):
    rng = np.random.default_rng(seed)
    B, f, m = _random_case(rng)
    d, dc = hodge_decompose(f, B, m), hodge_decompose(c * f, B, m)
    for attr in ("grad", "curl", "harm"):
        np.testing.assert_allclose(getattr(dc, attr), c * getattr(d, attr),
                                   atol=1e-8 * c * max(1.0, np.linalg.norm(f)))
    total = d.total_energy
    for e, ec in zip(d.energies, dc.energies):
        assert abs(ec - c**2 * e) <= 1e-8 * c**2 * max(total, 1e-300)


def test_compat_equals_consistent_at_identity(rng):
    for _ in range(10):
        B, f, _ = _random_case(rng)
        a, b = hodge_decompose(f, B), hodge_decompose(f, B, compat=True)
        np.testing.assert_allclose(a.harm, b.harm, atol=1e-9 * max(1, np.linalg.norm(f)))


def test_compat_is_not_orthogonal_for_nonuniform_metric(filled_B):
    # two edges share vertices with the face so the M1^-1 projections interact
    doc = triangle_doc(filled=True)
    doc["vertices"].append({"id": "d"})
    doc["edges"] += [{"id": "e3", "tail": "c", "head": "d"}, {"id": "e4", "tail": "d", "head": "a"}]
    B = incidence_matrices(build_complex(doc))
    f = np.array([3.0, -1.0, 2.0, 5.0, 1.0])
    m = np.array([0.01, 1.0, 2.0, 0.5, 1.0])
    assert hodge_decompose(f, B, m).orthogonality_residual() < 1e-12
    assert hodge_decompose(f, B, m, compat=True).orthogonality_residual() > 1e-3


@pytest.mark.parametrize(
    "doc, expected",
    [
        (triangle_doc(), (1, 1, 0)),
        (triangle_doc(filled=True), (1, 0, 0)),
        (triangle_doc(isolated=2), (3, 1, 0)),
    ],
    ids=["open", "filled", "open+2-isolated"],
)
def test_betti_canonical(doc, expected):
    assert tuple(betti(incidence_matrices(build_complex(doc)))) == expected


def test_betti_rank_tol_validated(open_B):
    with pytest.raises(ValueError):
        betti(open_B, rank_tol=0.0)


def test_spectrum_open_triangle(open_B):
    L0, _, _ = laplacians(open_B)
    s = spectrum(L0)
    np.testing.assert_allclose(s.eigenvalues, [0, 3, 3], atol=1e-12)
    assert s.gap == pytest.approx(3.0)
    assert s.kernel_dim == 1


def test_spectrum_counts_components():
    B = incidence_matrices(build_complex(triangle_doc(isolated=2)))
    s = spectrum(laplacians(B)[0])
    assert s.kernel_dim == 3
    assert np.all(s.eigenvalues >= -1e-10)


def test_spectrum_one_by_one(filled_B):
    s = spectrum(laplacians(filled_B)[2])
    np.testing.assert_allclose(s.eigenvalues, [3.0])
    assert s.gap == 3.0


def test_weighted_L1_spectrum_real(rng):
    K = random_complex(rng, max_faces=4)
    B = incidence_matrices(K)
    m = rng.uniform(0.01, 2, K.n_edges)
    L1 = laplacians(B, m)[1]
    s = spectrum(L1, metric=m)
    ref = np.sort(np.linalg.eigvals(L1).real)
    np.testing.assert_allclose(s.eigenvalues, ref, atol=1e-8 * max(1, ref.max()))
    assert s.kernel_dim == betti(B).beta1


def test_spectrum_rejects_non_square():
    with pytest.raises(ValueError):
        spectrum(np.zeros((2, 3)))


def test_cochain_round_trip(tmp_path, open_triangle):
    path = tmp_path / "f.csv"
    write_cochain(path, open_triangle.edge_ids(), [1.5, -2.0, 1e-17])
    np.testing.assert_array_equal(read_cochain(path, open_triangle.edge_ids()), [1.5, -2.0, 1e-17])


@pytest.mark.parametrize(
    "body, message",
    [
        ("cell_id,value\ne0,1\ne1,2\n", "missing row for cell id e2"),
        ("cell_id,value\ne0,1\ne1,2\ne9,3\n", "unknown cell id e9"),
        ("cell_id,value\ne0,1\ne0,2\n", "line 3: duplicate cell id e0"),
        ("cell_id,value\ne0,x\n", "line 2: bad value"),
        ("cell_id,value\ne0,inf\n", "non-finite"),
        ("id,v\n", "header"),
    ],
)
def test_cochain_parse_errors(tmp_path, open_triangle, body, message):
    path = tmp_path / "f.csv"
    path.write_text(body)
    with pytest.raises(CochainError, match=message):
        read_cochain(path, open_triangle.edge_ids())
