#!/usr/bin/env python3
"""Command-line tests for qpi: golden files, schema, determinism and exit codes.

usage: qpi_cli_test.py MODE QPI SOURCE_DIR [--update]
MODE is one of golden, schema, determinism, exit-codes.
"""
import concurrent.futures
import json
import os
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def run(qpi, src, args, env=None):
    p = subprocess.run([qpi, *args], cwd=src, capture_output=True, env=env, timeout=600)
    return p.returncode, p.stdout, p.stderr


def load_cases(src):
    cases = []
    for line in (src / "tests/cli/cases.txt").read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, code, *args = line.split()
        cases.append((name, int(code), args))
    return cases


def golden_path(src, name):
    p = src / "tests/golden" / name
    return p if p.suffix in (".tex", ".txt") else p.with_name(p.name + ".json")


def validator(src):
    schema = json.loads((src / "schemas/qpi-report.schema.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


def schema_errors(v, text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        return [f"not JSON: {e}"]
    return [f"{'/'.join(map(str, e.path))}: {e.message}" for e in v.iter_errors(doc)]


def mode_golden(qpi, src, update):
    v = validator(src)
    cases = load_cases(src)
    failures = []

    def one(case):
        name, want, args = case
        code, out, err = run(qpi, src, args)
        msgs = []
        if code != want:
            msgs.append(f"exit {code}, expected {want}; stderr: {err.decode()[:300]}")
        path = golden_path(src, name)
        if path.suffix == ".json":
            msgs += [f"schema: {m}" for m in schema_errors(v, out)]
        if update:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(out)
        elif not path.exists():
            msgs.append(f"missing golden file {path.relative_to(src)}")
        elif path.read_bytes() != out:
            msgs.append(f"output differs from {path.relative_to(src)}")
        return name, msgs

    with concurrent.futures.ThreadPoolExecutor(max_workers=os.cpu_count() or 2) as pool:
        for name, msgs in pool.map(one, cases):
            status = "ok" if not msgs else "FAIL"
            print(f"{status:4} {name}")
            for m in msgs:
                print(f"     {m}")
                failures.append(name)
    # every subcommand needs a golden case for every built-in datum
    commands = ["validate", "upsilon", "theta", "theta-i", "idp", "module", "icb", "stabilize", "verify"]
    for datum in ["rank1", "b02", "b03", "km2"]:
        for cmd in commands:
            if not any(a[0] == cmd and a[a.index("--datum") + 1] == datum for _, _, a in cases):
                print(f"FAIL no golden case for {cmd} on {datum}")
                failures.append(f"{datum}/{cmd}")
    return not failures


def mode_schema(qpi, src, _update):
    v = validator(src)
    ok = True
    files = sorted((src / "tests/golden").rglob("*.json"))
    if not files:
        print("FAIL no golden JSON files")
        return False
    for f in files:
        errs = schema_errors(v, f.read_text())
        ok = ok and not errs
        print(f"{'ok' if not errs else 'FAIL':4} {f.relative_to(src)}")
        for e in errs:
            print(f"     {e}")
    # a fresh error report also conforms
    code, out, _ = run(qpi, src, ["icb", "--datum", "b02", "--lambda", "1,0"])
    errs = schema_errors(v, out)
    print(f"{'ok' if code == 1 and not errs else 'FAIL':4} fresh error report")
    ok = ok and code == 1 and not errs
    # and the schema is not vacuous
    good = json.loads((src / "tests/golden/rank1/upsilon.json").read_text())
    broken = [
        dict(good, parts={"x": good["parts"]["0"]}),
        dict(good, parts={"2": []}),
        {k: x for k, x in good.items() if k != "params"},
        dict(good, command="upsilonn"),
        {"command": "icb", "status": "error", "kind": "RankUnsupported"},
    ]
    for k, doc in enumerate(broken):
        rejected = bool(list(v.iter_errors(doc)))
        print(f"{'ok' if rejected else 'FAIL':4} malformed document {k} rejected")
        ok = ok and rejected
    return ok


def mode_determinism(qpi, src, _update):
    configs = [
        ["upsilon", "--datum", "b02", "--height", "4"],
        ["theta-i", "--datum", "rank1", "--height", "4", "--format", "tex"],
        ["icb", "--datum", "rank1", "--lambda", "2", "--mu", "1"],
        ["verify", "--datum", "rank1", "--height", "5", "--seed", "7"],
        ["verify", "--datum", "km2", "--height", "3", "--seed", "11", "--format", "text"],
    ]
    ok = True
    for args in configs:
        outs = []
        for threads in ["1", "4", "4"]:
            env = dict(os.environ, QPI_THREADS=threads)
            code, out, _ = run(qpi, src, args, env)
            outs.append((code, out))
        with tempfile.TemporaryDirectory() as tmp:
            target = pathlib.Path(tmp) / "report"
            code, out, _ = run(qpi, src, [*args, "--out", str(target)])
            file_ok = code == outs[0][0] and out == b"" and target.read_bytes() == outs[0][1]
        same = all(o == outs[0] for o in outs)
        print(f"{'ok' if same and file_ok else 'FAIL':4} {' '.join(args)}")
        ok = ok and same and file_ok
    return ok


def mode_exit_codes(qpi, src, _update):
    checks = [
        ([], 64),
        (["frobnicate"], 64),
        (["upsilon", "--datum", "rank1", "--format", "yaml"], 64),
        (["upsilon", "--datum", "rank1", "--pi", "2"], 64),
        (["upsilon", "--datum", "rank1", "--height", "-1"], 64),
        (["upsilon", "--datum", "rank1", "--no-such-flag"], 64),
        (["--help"], 0),
        (["verify", "--help"], 0),
        (["upsilon", "--datum", "tests/data/does_not_exist.json"], 74),
        (["upsilon", "--datum", "rank1", "--out", "/nonexistent-dir/out.json"], 74),
        (["upsilon", "--datum", "tests/cli/cases.txt"], 1),
        (["upsilon", "--datum", "rank1", "--varsigma", "q^"], 1),
        (["upsilon", "--datum", "rank1", "--varsigma", "0"], 1),
        (["upsilon", "--datum", "rank1", "--tau", "7"], 1),
        (["module", "--datum", "rank1"], 1),
        (["icb", "--datum", "rank1", "--lambda", "-1"], 1),
        (["validate", "--datum", "tests/data/bar_inconsistent.json"], 1),
        (["verify", "--datum", "rank1", "--height", "3", "--varsigma", "1"], 2),
        (["upsilon", "--datum", "rank1", "--height", "2"], 0),
    ]
    ok = True
    for args, want in checks:
        code, out, err = run(qpi, src, args)
        good = code == want
        if want == 64:
            good = good and b"Usage:" in err
        if want in (1, 2) and out:
            good = good and isinstance(json.loads(out), dict)
        if want in (64, 74):
            good = good and out == b""
        print(f"{'ok' if good else 'FAIL':4} exit {code} (want {want}): qpi {' '.join(args)}")
        ok = ok and good
    # the bar-consistency violation is named
    code, out, _ = run(qpi, src, ["validate", "--datum", "tests/data/bar_inconsistent.json"])
    named = b"bar-consistency" in out and json.loads(out)["violations"][0]["condition"] == "(e)"
    print(f"{'ok' if named else 'FAIL':4} validate names bar-consistency")
    # failure reports stay JSON in other formats
    code, out, _ = run(qpi, src, ["verify", "--datum", "rank1", "--height", "3", "--varsigma", "1", "--format", "tex"])
    report = code == 2 and json.loads(out)["ok"] is False
    code, out, _ = run(qpi, src, ["icb", "--datum", "km2", "--lambda", "1,0", "--format", "text"])
    report = report and code == 1 and json.loads(out)["kind"] == "RankUnsupported"
    print(f"{'ok' if report else 'FAIL':4} failure reports")
    # the TeX preamble
    code, out, _ = run(qpi, src, ["upsilon", "--datum", "rank1", "--format", "tex"])
    tex = out.decode()
    pre = code == 0 and tex.startswith("\\documentclass{article}\n\\usepackage{amsmath}\n\\usepackage{longtable}\n")
    pre = pre and tex.rstrip().endswith("\\end{document}") and "\\begin{longtable}" in tex
    print(f"{'ok' if pre else 'FAIL':4} TeX preamble")
    return ok and named and report and pre


def main():
    if len(sys.argv) < 4:
        print(__doc__)
        return 64
    mode, qpi, src = sys.argv[1], os.path.abspath(sys.argv[2]), pathlib.Path(sys.argv[3]).resolve()
    modes = {"golden": mode_golden, "schema": mode_schema, "determinism": mode_determinism, "exit-codes": mode_exit_codes}
    if mode not in modes:
        print(__doc__)
        return 64
    return 0 if modes[mode](qpi, src, "--update" in sys.argv[4:]) else 1


if __name__ == "__main__":
    sys.exit(main())
