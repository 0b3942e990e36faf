import random

import pytest

from hpqc.errors import (
    CapExceeded,
    MalformedHeader,
    MalformedRecord,
    UnknownBasisCode,
)
from hpqc.geometry import CellCoord, LatticeDims, Region, RegionKind
from hpqc.protocol import (
    EigenvalueRecord,
    EveModel,
    MeasurementInstruction,
    PhotonStreamDescriptor,
    decode_record,
    decode_stream,
    encode_record,
    encode_stream,
    eve_probe_outcomes,
    eve_tap,
    prepare_with_random_eigenvalues,
    record_for_region,
    region_local_index,
    sign_correction,
)
from hpqc.stabilizer import GraphAdjacency, PauliBasis, StabilizerTableau


def _region(x, y, w, d, layers=1):
    return Region("r", RegionKind.USER, CellCoord(x, y, 0), LatticeDims(w, d, layers))


def test_stream_codec_exact_bytes():
    stream = [
        MeasurementInstruction(CellCoord(0, 0, 0), PauliBasis.X),
        MeasurementInstruction(CellCoord(12, 3, 1), PauliBasis.ANCILLA_A),
    ]
    data = encode_stream(stream)
    assert data == b"HPQC-MS 1\n0,0,0,X\n12,3,1,A\n"
    assert decode_stream(data) == stream


def test_empty_stream_is_just_the_header():
    assert encode_stream([]) == b"HPQC-MS 1\n"
    assert decode_stream(b"HPQC-MS 1\n") == []


def test_stream_round_trip_random():
    rng = random.Random(4)
    bases = list(PauliBasis)
    for _ in range(300):
        stream = [
            MeasurementInstruction(
                CellCoord(rng.randrange(10**5), rng.randrange(10**5), rng.randrange(3)),
                rng.choice(bases),
            )
            for _ in range(rng.randrange(12))
        ]
        data = encode_stream(stream)
        assert decode_stream(data) == stream
        assert encode_stream(decode_stream(data)) == data


def test_stream_decode_rejections_cite_lines():
    with pytest.raises(MalformedHeader):
        decode_stream(b"HPQC-XX 1\n")
    with pytest.raises(MalformedHeader):
        decode_stream(b"\xff\xfe\n")
    with pytest.raises(MalformedRecord) as err:
        decode_stream(b"HPQC-MS 1\n1,1,0,X")  # missing final LF
    assert err.value.line == 2
    with pytest.raises(MalformedRecord) as err:
        decode_stream(b"HPQC-MS 1\n1,1,X\n")  # missing z field
    assert err.value.line == 2
    with pytest.raises(MalformedRecord) as err:
        decode_stream(b"HPQC-MS 1\n0,0,0,X\n01,1,0,X\n")  # leading zero
    assert err.value.line == 3
    with pytest.raises(MalformedRecord):
        decode_stream(b"HPQC-MS 1\n1, 1,0,X\n")  # embedded whitespace
    with pytest.raises(UnknownBasisCode) as err:
        decode_stream(b"HPQC-MS 1\n1,1,0,Q\n")
    assert err.value.line == 2


def test_record_codec():
    record = EigenvalueRecord(((0, +1), (1, -1), (5, +1)))
    data = encode_record(record)
    assert data == b"HPQC-ER 1\n0,+\n1,-\n5,+\n"
    assert decode_record(data) == record
    with pytest.raises(MalformedRecord):
        decode_record(b"HPQC-ER 1\n0,1\n")
    with pytest.raises(MalformedHeader):
        decode_record(b"HPQC-MS 1\n")


def test_record_defaults_to_plus():
    record = EigenvalueRecord(((3, -1),))
    assert record.sign(3) == -1
    assert record.sign(0) == +1
    with pytest.raises(ValueError):
        EigenvalueRecord(((0, 0),))


def test_region_local_index_row_major():
    region = _region(5, 7, 3, 2, layers=2)
    assert region_local_index(region, CellCoord(0, 0, 0)) == 0
    assert region_local_index(region, CellCoord(2, 0, 0)) == 2
    assert region_local_index(region, CellCoord(0, 1, 0)) == 3
    assert region_local_index(region, CellCoord(0, 0, 1)) == 6
    with pytest.raises(ValueError):
        region_local_index(region, CellCoord(3, 0, 0))


def test_record_for_region_extracts_the_window():
    dims = LatticeDims(4, 3)
    signs = [+1] * 12
    # global (2,1) is inside a region at origin (1,1) of size 2x2
    signs[1 * 4 + 2] = -1
    region = _region(1, 1, 2, 2)
    record = record_for_region(signs, region, dims)
    assert len(record.entries) == 4
    assert record.sign(region_local_index(region, CellCoord(1, 0, 0))) == -1
    assert record.sign(region_local_index(region, CellCoord(0, 0, 0))) == +1


def test_descriptor_bytes_are_region_pure():
    region = _region(4, 0, 8, 4, layers=2)
    d1 = PhotonStreamDescriptor("s0001", region, "er-s0001")
    d2 = PhotonStreamDescriptor("s0002", region, "er-s0002")
    blob = d1.serialize()
    assert blob == b"HPQC-SD 1\n4,0,8,4,2\n"
    assert blob == d2.serialize()  # session identity never reaches the wire
    assert d1.layer_order == (0, 1)
    order = d1.emission_order()
    assert len(order) == 8 * 4 * 2
    assert order[0] == CellCoord(0, 0, 0)
    assert order[1] == CellCoord(1, 0, 0)  # x varies fastest
    assert order[8 * 4] == CellCoord(0, 0, 1)


def test_prepare_is_seed_deterministic():
    graph = GraphAdjacency.from_edges(5, [(0, 1), (2, 3)])
    t1, r1 = prepare_with_random_eigenvalues(graph, 42)
    t2, r2 = prepare_with_random_eigenvalues(graph, 42)
    assert r1 == r2
    assert t1.canonical_form() == t2.canonical_form()
    _, r3 = prepare_with_random_eigenvalues(graph, 43)
    assert len(r3.entries) == 5


def test_sign_correction_table():
    signs = {0: -1, 1: +1}
    # X and Y outcomes inherit the preparation sign, Z does not
    assert sign_correction(signs, 0, PauliBasis.X) == -1
    assert sign_correction(signs, 0, PauliBasis.Y) == -1
    assert sign_correction(signs, 0, PauliBasis.ANCILLA_A) == -1  # simulates as Y
    assert sign_correction(signs, 0, PauliBasis.Z) == +1
    assert sign_correction(signs, 0, PauliBasis.ANCILLA_Y) == +1  # simulates as Z
    assert sign_correction(signs, 1, PauliBasis.X) == +1
    assert sign_correction(signs, 9, PauliBasis.X) == +1  # absent index reads +


def test_eve_tap_attaches_probes():
    graph = GraphAdjacency.from_edges(2, [(0, 1)])
    tableau = StabilizerTableau.from_graph(graph, rng=random.Random(8))
    probes = eve_tap(tableau, EveModel(tapped=(0, 1)))
    assert probes == [2, 3]
    assert tableau.n == 4
    # each probe is now entangled with the lattice
    assert tableau.entanglement_entropy([2]) == 1
    outcomes = eve_probe_outcomes(tableau, probes)
    assert all(o in (-1, +1) for o in outcomes)


def test_eve_tap_cap_and_validation():
    graph = GraphAdjacency.from_edges(2, [(0, 1)])
    tableau = StabilizerTableau.from_graph(graph)
    with pytest.raises(CapExceeded):
        eve_tap(tableau, EveModel(tapped=(0,)), sim_cap=2)
    with pytest.raises(ValueError):
        eve_tap(tableau, EveModel(tapped=(5,)))


def test_eve_probe_on_measured_cell_learns_nothing():
    graph = GraphAdjacency.from_edges(2, [(0, 1)])
    tableau = StabilizerTableau.from_graph(graph, rng=random.Random(9))
    tableau.measure(0, PauliBasis.Z)
    probes = eve_tap(tableau, EveModel(tapped=(0,)))
    # the tapped cell is classical now; the probe stays in |+> up to phase
    assert tableau.entanglement_entropy(probes) == 0
    outcome, deterministic = tableau.measure(probes[0], PauliBasis.X)
    assert deterministic
