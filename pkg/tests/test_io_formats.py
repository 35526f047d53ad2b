import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from endoqre.errors import FormatError, ValidationError
from endoqre.io_formats import (
    Atom,
    IntegralSet,
    MolecularGeometry,
    PESSamples,
    parse_cell,
    parse_fcidump,
    parse_pes_table,
    parse_xyz,
    write_fcidump,
    write_pes_table,
    write_xyz,
)
from endoqre.units import HARTREE_EV

H2_TEXT = """ &FCI NORB=2,NELEC=2,MS2=0,
  ORBSYM=1,1,
  ISYM=1,
 &END
 0.6744887663568377 1 1 1 1
 0.6634680964235677 1 1 2 2
 0.1812888082114958 2 1 2 1
 0.6973937674230264 2 2 2 2
 -1.252463573564898 1 1 0 0
 -0.4759487152209642 2 2 0 0
 0.7137539936876182 0 0 0 0
"""


def random_integrals(n, seed):
    rng = np.random.default_rng(seed)
    h1 = rng.normal(size=(n, n))
    h1 = h1 + h1.T
    a = np.zeros((n,) * 4)
    for i, j, k, l in np.ndindex(*a.shape):
        if (i, j) <= (k, l) and i >= j and k >= l:
            v = rng.normal()
            for p in {(i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                      (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)}:
                a[p] = v
    return IntegralSet(n, min(2, 2 * n), float(rng.normal()), h1, a)


def test_h2_header_and_symmetry(h2):
    assert (h2.n_orbitals, h2.n_electrons) == (2, 2)
    assert h2.two_body[1, 0, 0, 1] == h2.two_body[0, 1, 1, 0] == pytest.approx(0.1812888082114958)
    assert h2.two_body[1, 1, 0, 0] == h2.two_body[0, 0, 1, 1]
    assert h2.core_energy == pytest.approx(0.7137539936876182)


def test_lih_fixture_shape(lih):
    assert (lih.n_orbitals, lih.n_electrons) == (6, 4)


def test_eight_fold_expansion_from_single_entry():
    ints = parse_fcidump(H2_TEXT)
    v = ints.two_body
    for perm in [(1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0)]:
        np.testing.assert_array_equal(v, v.transpose(perm))


def test_rounding_level_duplicates_accepted():
    text = H2_TEXT + " 0.66346809642356760 2 2 1 1\n"
    assert parse_fcidump(text).two_body[1, 1, 0, 0] == pytest.approx(0.6634680964235677)


def test_conflicting_duplicate_rejected_with_line():
    text = H2_TEXT + " 0.7 2 2 1 1\n"
    with pytest.raises(FormatError) as exc:
        parse_fcidump(text)
    assert exc.value.line == 12


@pytest.mark.parametrize(
    "mutation,match",
    [
        (lambda t: t.replace("NORB=2", "NORB=0"), "NORB"),
        (lambda t: t.replace("NELEC=2", "NELEC=9"), "NELEC"),
        (lambda t: t.replace("&END", ""), "unterminated"),
        (lambda t: t.replace("&FCI", "&XYZ"), "header"),
        (lambda t: t.replace("2 2 2 2", "3 2 2 2"), "outside"),
        (lambda t: t.replace("0.6973937674230264", "nan"), "finite|number"),
        (lambda t: t + "1.0 1 2\n", "5 fields"),
        (lambda t: t.replace("NORB=2,", "NORB=2, UHF=.TRUE.,"), "UHF"),
    ],
)
def test_fcidump_diagnostics(mutation, match):
    with pytest.raises(ValidationError, match=match):
        parse_fcidump(mutation(H2_TEXT))


def test_fcidump_units_ev():
    ints = parse_fcidump(H2_TEXT, units="eV")
    assert ints.core_energy == pytest.approx(0.7137539936876182 / HARTREE_EV)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10_000))
def test_fcidump_round_trip_lossless(n, seed):
    ints = random_integrals(n, seed)
    back = parse_fcidump(write_fcidump(ints))
    np.testing.assert_array_equal(back.one_body, ints.one_body)
    np.testing.assert_array_equal(back.two_body, ints.two_body)
    assert back.core_energy == ints.core_energy


def test_integral_set_rejects_broken_symmetry():
    n = 2
    h2 = np.zeros((n,) * 4)
    h2[0, 1, 0, 0] = 1.0
    with pytest.raises(ValidationError, match="8-fold"):
        IntegralSet(n, 2, 0.0, np.eye(n), h2)


# --------------------------------------------------------------------------

XYZ = """3
ozone
O 0.0 0.0 0.0
O 1.0885 0.6770 0.0
O -1.0885 0.6770 0.0
"""


def test_xyz_default_box_is_padded_cube():
    g = parse_xyz(XYZ)
    assert g.is_cubic
    assert g.cell[0] == pytest.approx(2 * 1.0885 + 10.0)
    assert g.vacuum_padding == 10.0


def test_xyz_with_explicit_cell():
    g = parse_xyz(XYZ.replace("-1.0885", "1.5"), cell="4,4,4")
    assert g.cell == (4.0, 4.0, 4.0)


def test_xyz_atom_outside_cell_rejected():
    with pytest.raises(ValidationError, match="outside"):
        parse_xyz(XYZ, cell="4,4,4")


@pytest.mark.parametrize(
    "text,match",
    [
        ("2\nx\nO 0 0 0\n", "atom"),
        ("x\nc\nO 0 0 0\n", "count"),
        ("1\nc\nQq 0 0 0\n", "element"),
        ("1\nc\nO 0 0 inf\n", "finite|number"),
        ("1\nc\nO 0 0\n", "coordinates"),
    ],
)
def test_xyz_diagnostics(text, match):
    with pytest.raises(ValidationError, match=match):
        parse_xyz(text)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5)),
                min_size=1, max_size=6))
def test_xyz_round_trip(coords):
    atoms = [Atom("C", 6, c) for c in coords]
    g = MolecularGeometry.boxed(atoms, padding=3.0)
    back = parse_xyz(write_xyz(g), cell=g.cell)
    np.testing.assert_allclose(back.positions, g.positions, rtol=0, atol=1e-12)
    assert back.cell == g.cell


@pytest.mark.parametrize("cell", ["3", [3, 3, 3], np.diag([3.0, 3.0, 3.0])])
def test_parse_cell_forms(cell):
    assert parse_cell(cell) == (3.0, 3.0, 3.0)


def test_parse_cell_rejects_triclinic():
    with pytest.raises(ValidationError, match="orthorhombic"):
        parse_cell([[3, 0.1, 0], [0, 3, 0], [0, 0, 3]])


# --------------------------------------------------------------------------

PES = """# units: eV
s,V_LL
-1,0.0
-0.5,0.5
0,0.99
0.5,0.0
1,-1.3
#HL
s,V_HL
-1,0.0
-0.75,0.2
0,1.11
1,-1.3
"""


def test_pes_parse_with_units():
    p = parse_pes_table(PES)
    assert p.s_half == -0.75
    assert p.delta_v(0.0) == pytest.approx(0.12 / HARTREE_EV)


def test_pes_high_rows_sorted():
    lines = PES.splitlines()
    hl = lines[-4:]
    text = "\n".join(lines[:-4] + hl[::-1]) + "\n"
    assert parse_pes_table(text).s_half == -0.75


@pytest.mark.parametrize(
    "mutation,match",
    [
        (lambda t: t.replace("#HL\n", ""), "HL"),
        (lambda t: t.replace("-0.75,0.2\n", ""), "4 rows"),
        (lambda t: t.replace("-0.5,0.5\n0,0.99", "0,0.99\n-0.5,0.5"), "increasing"),
        (lambda t: t.replace("-0.75,0.2", "-1.5,0.2"), "outside"),
        (lambda t: t.replace("s,V_LL", "x,y"), "header"),
        (lambda t: t.replace("# units: eV", "# units: furlong"), "unit"),
        (lambda t: t.replace("0,1.11", "0.1,1.11"), "s_half|s = -1"),
    ],
)
def test_pes_diagnostics(mutation, match):
    with pytest.raises(ValidationError, match=match):
        parse_pes_table(mutation(PES))


def test_pes_round_trip():
    p = parse_pes_table(PES)
    back = parse_pes_table(write_pes_table(p, units="eV"))
    np.testing.assert_allclose(back.v_low, p.v_low, rtol=1e-15)
    np.testing.assert_allclose(back.v_high, p.v_high, rtol=1e-15)


def test_pes_samples_direct_validation():
    with pytest.raises(ValidationError):
        PESSamples([-1, 1], [0, 0], [-1, -0.5, 0, 0.5], [0, 0, 0, 0])
