# tests/test_cli.py
"""
Command-line verbs end to end through click's CliRunner: report shape, exit codes 0/1/2,
flags, and byte-identical output across runs. Run:
    python tests/test_cli.py
"""
import json
import os
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

from click.testing import CliRunner

from main import cli
from services.catalog import get_group, get_xmod
from services.codec import to_dict


def _run(*args):
    result = CliRunner().invoke(cli, list(args))
    return result.exit_code, result.stdout


def _report(*args):
    code, out = _run(*args)
    report = json.loads(out)
    assert report["exit_code"] == code, (report, code)
    return code, report


def _write(payload):
    fd, path = tempfile.mkstemp(suffix=".json")
    with os.fdopen(fd, "w", encoding="utf-8") as f:
        f.write(payload if isinstance(payload, str) else json.dumps(payload))
    return path


# --- validate ----------------------------------------------------------------------------

def test_validate_catalog_object():
    code, r = _report("validate", "catalog:RD8")
    assert code == 0 and r["ok"]
    assert r["outcome"]["orders"] == [8, 8] and r["outcome"]["label"] == "RD8"
    assert r["inputs"][0]["kind"] == "xmod" and len(r["inputs"][0]["sha256"]) == 64

def test_validate_peiffer_violation_is_exit_1():
    path = _write({
        "g1": to_dict(get_group("D8")),
        "g2": {"kind": "table", "table": [[0]]},
        "boundary": [0] * 8,
        "action": [list(range(8))],
    })
    try:
        code, r = _report("validate", path)
        assert code == 1
        assert r["outcome"]["valid"] is False
        assert r["outcome"]["violation"]["error"] == "PeifferViolation"
    finally:
        os.remove(path)

def test_validate_malformed_file_is_exit_2():
    path = _write('{"g1": ')
    try:
        code, r = _report("validate", path)
        assert code == 2 and r["outcome"]["error"] == "ParseError"
    finally:
        os.remove(path)

def test_validate_non_utf8_file_is_exit_2():
    fd, path = tempfile.mkstemp(suffix=".json")
    with os.fdopen(fd, "wb") as f:
        f.write(b"\xff\xfe{}")
    try:
        code, r = _report("validate", path)
        assert code == 2 and r["outcome"]["error"] == "ParseError"
    finally:
        os.remove(path)

def test_out_of_range_integers_are_not_internal_errors():
    path = _write({"kind": "table", "table": [[0, 1], [1, 10 ** 23]]})
    try:
        code, r = _report("validate", path)
        assert code == 1 and r["outcome"]["violation"]["error"] == "IndexOutOfRange"
        code, r = _report("hom-count", path, "catalog:Z2")
        assert code == 2 and r["outcome"]["error"] == "IndexOutOfRange"
    finally:
        os.remove(path)
    rz2 = to_dict(get_xmod("RZ2"))
    rz2["action"][1][1] = 10 ** 23
    path = _write(rz2)
    try:
        code, r = _report("validate", path)
        assert code == 1 and r["outcome"]["violation"]["error"] == "IndexOutOfRange"
    finally:
        os.remove(path)

def test_huge_permutation_degree_is_exit_2():
    path = _write({"kind": "perm", "degree": 100000000000, "generators": ["(1 2)"]})
    try:
        code, r = _report("validate", path)
        assert code == 2 and r["outcome"]["error"] == "ParseError"
        assert "degree" in json.dumps(r["outcome"])
    finally:
        os.remove(path)


# --- apply -------------------------------------------------------------------------------

def test_apply_ab_to_ra4():
    code, r = _report("apply", "--functor", "ab", "catalog:RA4")
    assert code == 0
    assert r["outcome"]["output_orders"] == [3, 3] and r["outcome"]["label"] == "RZ3"
    assert r["verdicts"]["regular_epi"]

def test_apply_pxz_and_i():
    _, r = _report("apply", "--functor", "pxz", "catalog:C2inD8")
    assert r["outcome"]["output_orders"] == [2, 1]
    _, r = _report("apply", "--functor", "i", "catalog:XZ2")
    assert r["outcome"]["label"] == "RZ2"
    assert r["verdicts"]["regular_epi"] is False

def test_apply_nullify():
    code, r = _report("apply", "--functor", "nullify", "catalog:XZ4")
    assert code == 2 and r["outcome"]["error"] == "MissingNullifier"
    code, r = _report("apply", "--functor", "nullify", "--nullifier", "catalog:XZ2", "catalog:XZ4")
    assert code == 0 and r["outcome"]["steps"] == 2
    assert [i["ref"] for i in r["inputs"]] == ["catalog:XZ2", "catalog:XZ4"]

def test_unknown_functor_is_exit_2():
    code, r = _report("apply", "--functor", "bogus", "catalog:RS3")
    assert code == 2 and r["outcome"]["error"] == "UnknownFunctor"

def test_wrong_kind_is_exit_2():
    code, r = _report("apply", "--functor", "ab", "catalog:A4-S4-Z2")
    assert code == 2 and r["outcome"]["witness"]["found"] == "sequence"


# --- fiberwise and friends ---------------------------------------------------------------

def test_fiberwise_ab_success():
    code, r = _report("fiberwise", "--functor", "ab", "catalog:A4-S4-Z2")
    assert code == 0
    assert r["outcome"]["e_label"] == "RS3"
    assert all(r["outcome"]["checks"].values()) and len(r["outcome"]["checks"]) == 5

def test_fiberwise_pxz_failure():
    code, r = _report("fiberwise", "--functor", "pxz", "catalog:A4-S4-Z2")
    assert code == 1 and r["outcome"]["result"] == "failure"
    assert r["outcome"]["inclusion"] == {"displacement_order": 12, "target_order": 4}
    assert {"n2", "t1", "w"} <= set(r["outcome"]["witness"])

def test_fiberwise_trivial_n():
    code, r = _report("fiberwise", "--functor", "ab", "catalog:trivialN(RD8)")
    assert code == 0 and r["outcome"]["e_orders"] == [8, 8]

def test_fiberwise_i_is_not_regular_epi():
    code, r = _report("fiberwise", "--functor", "i", "catalog:wholeN(XZ2)")
    assert code == 1 and r["outcome"]["result"] == "not-regular-epi"

def test_check_normal():
    code, r = _report("check-normal", "--functor", "pxz", "catalog:A4-S4-Z2")
    assert code == 1
    assert r["outcome"]["displacement_order"] == 12 and r["outcome"]["target_order"] == 4
    assert r["outcome"]["conditions"] == {"1": True, "2": True, "3": False}
    code, _ = _report("check-normal", "--functor", "ab", "catalog:A4-S4-Z2")
    assert code == 0

def test_acyclic():
    code, r = _report("acyclic", "--functor", "pxz", "catalog:RD8")
    assert code == 1
    assert r["outcome"]["kernel_orders"] == [2, 8] and r["outcome"]["output_orders"] == [2, 1]
    code, _ = _report("acyclic", "--functor", "pxz", "catalog:XS3")
    assert code == 0


# --- compare -----------------------------------------------------------------------------

def test_hom_count():
    _, r = _report("hom-count", "catalog:Z2", "catalog:S3")
    assert r["outcome"] == {"kind": "group", "count": 4}
    _, r = _report("hom-count", "catalog:XZ2", "catalog:RS3")
    assert r["outcome"]["count"] == 4

def test_iso():
    code, r = _report("iso", "catalog:RS3", "catalog:RS3")
    assert code == 0 and r["outcome"]["isomorphic"]
    code, r = _report("iso", "catalog:Z4", "catalog:V4")
    assert code == 1 and "map" not in r["outcome"]

def test_mixed_kinds_rejected():
    code, _ = _report("iso", "catalog:S3", "catalog:RS3")
    assert code == 2


# --- flags and determinism ---------------------------------------------------------------

def test_timing_flag():
    _, r = _report("validate", "catalog:RS3")
    assert "wall_ms" not in r
    _, r = _report("validate", "catalog:RS3", "--timing")
    assert isinstance(r["wall_ms"], int)

def test_pretty_output_is_indented():
    code, out = _run("validate", "catalog:RS3", "--pretty")
    assert code == 0
    assert out.startswith("{\n  ")
    assert json.loads(out)["outcome"]["label"] == "RS3"

def test_output_is_byte_identical():
    args = ("fiberwise", "--functor", "pxz", "catalog:A4-S4-Z2")
    assert _run(*args) == _run(*args)

def test_max_order_applies_to_files():
    path = _write(to_dict(get_xmod("RS4")))
    try:
        code, r = _report("validate", path, "--max-order", "10")
        assert code == 1 and r["outcome"]["violation"]["error"] == "GroupTooLarge"
        code, r = _report("apply", "--functor", "ab", path, "--max-order", "10")
        assert code == 2 and r["outcome"]["error"] == "GroupTooLarge"
        code, _ = _report("validate", path)
        assert code == 0
    finally:
        os.remove(path)

def test_log_dir_receives_json_lines():
    log_dir = tempfile.mkdtemp()
    code, _ = _run("apply", "--functor", "ab", "catalog:RA4", "--log-dir", log_dir)
    assert code == 0
    files = os.listdir(log_dir)
    assert files
    with open(os.path.join(log_dir, sorted(files)[0]), encoding="utf-8") as f:
        lines = [json.loads(line) for line in f if line.strip()]
    assert lines and all("category" in line for line in lines)


if __name__ == "__main__":
    fns = [v for k, v in sorted(globals().items()) if k.startswith("test_") and callable(v)]
    passed = 0
    for fn in fns:
        try:
            fn(); print(f"PASS {fn.__name__}"); passed += 1
        except AssertionError as e:
            print(f"FAIL {fn.__name__}: {e}")
        except Exception as e:
            print(f"ERROR {fn.__name__}: {type(e).__name__}: {e}")
    print(f"\n{passed}/{len(fns)} cli tests passed")
    sys.exit(0 if passed == len(fns) else 1)
