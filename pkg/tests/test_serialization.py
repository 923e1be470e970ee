import json

import numpy as np
import pytest

from complementary_mubs.analysis import (
    Verdict,
    certify_strong_unextendibility,
    extract_mub_family,
    unbiased_vector_search,
)
from complementary_mubs.errors import ParseError, VersionMismatch
from complementary_mubs.serialization import (
    FORMAT_VERSION,
    build_metadata,
    decomposition_to_dict,
    mub_family_to_dict,
    parse_certificate,
    parse_decomposition,
    parse_mub_family,
    parse_search_result,
    read_text,
    serialize_certificate,
    serialize_decomposition,
    serialize_mub_family,
    serialize_search_result,
    write_text,
)
from complementary_mubs.subalgebra import SubalgebraKind


def dumps(document):
    return json.dumps(document)


# --- Round trips ---

@pytest.mark.parametrize("builder, p", [("galois", 3), ("ab", 5)])
def test_decomposition_round_trip(request, builder, p):
    decomposition = request.getfixturevalue(builder)(p)
    parsed = parse_decomposition(serialize_decomposition(decomposition)).decomposition
    assert parsed == decomposition


def test_metadata_round_trip(galois):
    metadata = build_metadata(seed=3, notes=["first run"])
    parsed = parse_decomposition(serialize_decomposition(galois(2), metadata))
    assert parsed.metadata == metadata
    assert parsed.decomposition.notes == ["first run"]


def test_subspaces_are_stored_as_echelon_rows(ab):
    document = decomposition_to_dict(ab(3))
    assert document["format_version"] == FORMAT_VERSION
    assert document["D"] == 2
    assert document["generators"] is None
    assert document["subalgebras"][0] == {"kind": "product_factor_0", "subspace": [[1, 0, 0, 0], [0, 1, 0, 0]]}


def test_stored_tags_are_kept(ab):
    document = decomposition_to_dict(ab(3))
    masa = next(entry for entry in document["subalgebras"] if entry["kind"] == "masa")
    masa["kind"] = "factor"
    decomposition = parse_decomposition(dumps(document)).decomposition
    assert sum(1 for s in decomposition.subalgebras if s.kind is SubalgebraKind.FACTOR) == 1
    assert certify_strong_unextendibility(decomposition).verdict is Verdict.INVALID


def test_mub_family_round_trip(galois):
    family = extract_mub_family(galois(2), seed=9)
    parsed = parse_mub_family(serialize_mub_family(family))
    assert parsed.p == 2
    assert parsed.seed == 9
    for B1, B2 in zip(family.bases, parsed.bases):
        np.testing.assert_array_equal(B1, B2)
    assert [S.subspace for S in parsed.source_masas] == [S.subspace for S in family.source_masas]


def test_certificate_round_trip(ab):
    report = certify_strong_unextendibility(ab(5), numeric=True, provenance={"seed": 0})
    assert parse_certificate(serialize_certificate(report)) == report


def test_search_result_round_trip(galois):
    family = extract_mub_family(galois(2))
    result = unbiased_vector_search(family, restarts=2, seed=1, iterations=20)
    parsed = parse_search_result(serialize_search_result(result))
    assert parsed.best_residual == result.best_residual
    assert parsed.evaluated == 2
    np.testing.assert_array_equal(parsed.best_vector.amplitudes, result.best_vector.amplitudes)


def test_files(tmp_path, ab):
    path = tmp_path / "ab3.json"
    write_text(path, serialize_decomposition(ab(3)))
    assert parse_decomposition(read_text(path)).decomposition == ab(3)


# --- Errors ---

def test_missing_field(ab):
    document = decomposition_to_dict(ab(3))
    del document["p"]
    with pytest.raises(ParseError) as info:
        parse_decomposition(dumps(document))
    assert info.value.field == "p"


def test_unknown_field_is_named_by_path(ab):
    document = decomposition_to_dict(ab(3))
    document["subalgebras"][0]["extra"] = 1
    with pytest.raises(ParseError) as info:
        parse_decomposition(dumps(document))
    assert info.value.field == "subalgebras[0].extra"


def test_version_mismatch(ab):
    document = decomposition_to_dict(ab(3))
    document["format_version"] = "2"
    with pytest.raises(VersionMismatch):
        parse_decomposition(dumps(document))
    del document["format_version"]
    with pytest.raises(ParseError) as info:
        parse_decomposition(dumps(document))
    assert info.value.field == "format_version"


def test_malformed_json_reports_the_line():
    with pytest.raises(ParseError) as info:
        parse_decomposition('{\n  "p": 3,\n}')
    assert info.value.line == 3


def test_non_canonical_subspace(ab):
    document = decomposition_to_dict(ab(3))
    document["subalgebras"][0]["subspace"] = [[0, 1, 0, 0], [1, 0, 0, 0]]
    with pytest.raises(ParseError) as info:
        parse_decomposition(dumps(document))
    assert info.value.field == "subalgebras[0].subspace"


def test_bad_modulus(ab):
    document = decomposition_to_dict(ab(3))
    document["p"] = 4
    with pytest.raises(ParseError) as info:
        parse_decomposition(dumps(document))
    assert info.value.field == "p"


def test_vector_norm_is_checked(galois):
    document = mub_family_to_dict(extract_mub_family(galois(2)))
    vector = document["bases"][1]["vectors"][2]
    vector["re"] = [2 * x for x in vector["re"]]
    vector["im"] = [2 * x for x in vector["im"]]
    with pytest.raises(ParseError) as info:
        parse_mub_family(dumps(document))
    assert info.value.field == "bases[1].vectors[2]"


def test_unknown_verdict(ab):
    document = json.loads(serialize_certificate(certify_strong_unextendibility(ab(3))))
    document["verdict"] = "Maybe"
    with pytest.raises(ParseError) as info:
        parse_certificate(dumps(document))
    assert info.value.field == "verdict"


def test_undecodable_file_is_a_parse_error(tmp_path):
    path = tmp_path / "latin1.json"
    path.write_bytes(b'{\n  "notes": "caf\xe9"\n}')
    with pytest.raises(ParseError) as info:
        read_text(path)
    assert info.value.line == 2
