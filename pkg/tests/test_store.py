import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flsmodel import (CORE, FlightPathSet, FlightSegment, ModelGraph, dumps_flight_paths,
                      dumps_model, loads_flight_paths, loads_model, read_flight_paths,
                      read_model, write_flight_paths, write_model)
from flsmodel.errors import (BadMagic, InvalidGraph, MissingHeader, ParseError, TruncatedFile,
                             UnknownSchemaReference, VersionUnsupported)
from flsmodel.records import ColorRGBA, Coordinate
from flsmodel.store import quantize, quote, tokenize
from helpers import object_with_path, random_model_graph, random_path_set


def one_fls():
    seg = FlightSegment([(0.0, 1 / 24)], Coordinate(1.0, 2.0, 3.0), ColorRGBA(1.0, 0.5, 0.0, 1.0))
    return FlightPathSet(24.0, None, [[seg]])


def test_empty_graph_round_trip(tmp_path):
    g = ModelGraph(CORE)
    p = tmp_path / "m.flsm"
    write_model(g, p)
    assert p.read_text() == "FLSM 1\nschema core\nnext 1\n"
    assert read_model(p) == g


def test_records_sorted(tmp_path):
    g = ModelGraph(CORE)
    object_with_path(g, "petal")
    object_with_path(g, "stem")
    lines = dumps_model(g).splitlines()[3:]
    keys = []
    for ln in lines:
        kind, set_name, ident = tokenize(ln)[:3]
        keys.append(("entity rel ann".split().index(kind), set_name, int(ident.split(":")[1])))
    assert keys == sorted(keys)
    assert sum(ln.startswith('rel "Flight Paths"') for ln in lines) == 2


def test_duplicate_id_rejected():
    text = "FLSM 1\nschema core\nnext 5\nentity Objects obj:1 name=a\nentity Objects obj:1 name=b\n"
    with pytest.raises(ParseError, match="duplicate id") as info:
        loads_model(text)
    assert info.value.line == 5


@pytest.mark.parametrize("text,error", [
    ("", MissingHeader),
    ("FLSM 2\nschema core\nnext 1\n", MissingHeader),
    ("FLSM 1\nschema nope\nnext 1\n", UnknownSchemaReference),
    ("FLSM 1\nschema core\nnext 1\nentity Objects obj:1 name=a\n", ParseError),
    ("FLSM 1\nschema core\nnext 3\nentity Objects alg:1 name=a\n", ParseError),
    ("FLSM 1\nschema core\nnext 3\nentity Objects obj:1\n", ParseError),
    ("FLSM 1\nschema core\nnext 3\nentity Objects obj:1 name=\"open\n", ParseError),
    ("FLSM 1\nschema core\nnext 3\nblob x\n", ParseError),
    ("FLSM 1\nschema core\nnext 3\nentity FLSs fls:1 nu=x beta=1 force_n=0 omega=1\n",
     ParseError),
])
def test_malformed_models(text, error):
    with pytest.raises(error):
        loads_model(text)


def test_write_refuses_invalid_unless_allowed(tmp_path):
    g = ModelGraph(CORE)
    g.create_entity("Objects", {"name": "lonely"})
    with pytest.raises(InvalidGraph):
        write_model(g, tmp_path / "m.flsm")
    write_model(g, tmp_path / "m.flsm", allow_invalid=True)
    assert read_model(tmp_path / "m.flsm") == g


def test_random_graphs_round_trip(rng):
    for _ in range(40):
        g = random_model_graph(rng)
        text = dumps_model(g)
        back = loads_model(text)
        assert back == g
        assert dumps_model(back) == text


@settings(max_examples=200, deadline=None)
@given(st.text())
def test_quote_tokenize_inverse(s):
    line = f"a {quote(s)} b"
    assert "\n" not in line
    assert tokenize(line) == ["a", s, "b"]


def test_flight_file_is_70_bytes():
    data = dumps_flight_paths(one_fls())
    assert len(data) == 70
    magic, version, fps, count = struct.unpack_from("<4sHdI", data)
    assert (magic, version, fps, count) == (b"FLSP", 1, 24.0, 1)
    assert data[-4:] == bytes([255, 128, 0, 255])


def test_flight_file_errors():
    data = dumps_flight_paths(one_fls())
    with pytest.raises(BadMagic):
        loads_flight_paths(b"XLSP" + data[4:])
    with pytest.raises(VersionUnsupported):
        loads_flight_paths(data[:4] + struct.pack("<H", 9) + data[6:])
    for cut in range(len(data)):
        with pytest.raises(ParseError):
            loads_flight_paths(data[:cut])
    with pytest.raises(TruncatedFile) as info:
        loads_flight_paths(data[:-1])
    assert info.value.offset is not None
    with pytest.raises(ParseError):
        loads_flight_paths(data + b"\0")


def test_flight_file_fuzz_never_crashes(rng):
    base = dumps_flight_paths(random_path_set(np.random.default_rng(5)))
    for _ in range(300):
        data = bytearray(base)
        for _ in range(int(rng.integers(1, 4))):
            if data:
                data[int(rng.integers(0, len(data)))] = int(rng.integers(0, 256))
        try:
            loads_flight_paths(bytes(data))
        except ParseError:
            pass


def test_flight_paths_round_trip(rng, tmp_path):
    for _ in range(40):
        paths = random_path_set(rng)
        p = tmp_path / "x.flsp"
        write_flight_paths(paths, p)
        back = read_flight_paths(p)
        assert back.same_paths(paths)
        assert dumps_flight_paths(back) == p.read_bytes()


def test_quantization():
    assert [quantize(c) for c in (0.0, 0.5, 1.0, 1 / 255, 0.998)] == [0, 128, 255, 1, 254]
