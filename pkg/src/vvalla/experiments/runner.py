"""Corpus runner: executes one command over every declared ideal and persists the run.

Reports hold only deterministic content. Everything that varies between
executions (wall-clock, library versions) goes into the manifest, so a replay
of a manifest must reproduce the report files byte for byte.

Run directories are named by a digest of (document, command, config) and are
append-only: files are created once, atomically, and later executions of the
same run are logged to replays.jsonl instead of overwriting anything.
"""

import csv
import hashlib
import io
import json
import os
import platform
import sys
import tempfile
import time
from dataclasses import replace
from importlib import metadata

from ..blowup import depth_assoc_graded
from ..errors import SamplingError, UnstabilizedError, VVError
from ..lc_estimator import q_product
from ..superficial_vv import vv_module
from . import checks
from .checks import FAIL, PASS, SKIPPED, UNSTABLE, RunConfig, Session, verdict
from .corpus import parse_corpus
from .estimates import sample_seeds

COMMANDS = ("gb", "depth-g", "vv", "ann", "ar", "q", "powers", "verify-all")
SCHEMA = "vvalla.report/1"
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_UNSTABLE = 0, 1, 2, 3


# -- per-command entry results ---------------------------------------------
# Each returns (result dict, verdict list, csv rows).

def _cmd_gb(entry, session):
    h = entry.ideal.handle
    gb = [str(g) for g in h.groebner()]
    result = {
        "groebner_basis": gb,
        "minimal_generators": [str(g) for g in h.minimal_generators()],
        "relations": [str(r) for r in entry.model.relations],
        "colength": entry.ideal.colength,
        "N": entry.ideal.N,
        "fingerprint": h.fingerprint(),
    }
    rows = [[entry.key, k, g] for k, g in enumerate(gb)]
    return result, checks.check_kernel(entry, session), rows


def _cmd_depth(entry, session):
    rep = depth_assoc_graded(entry.ideal, session.config.strategy, session.config.seed)
    result = rep.to_dict()
    result["dim"] = entry.model.dim
    v = [verdict("depth_routes_agree", PASS, depth=rep.depth)] if rep.strategy == "both" else []
    return result, v, [[entry.key, rep.strategy, rep.depth, entry.model.dim]]


def _samples(entry, session, r):
    c = session.config
    out = []
    for sd in sample_seeds(c.seed, c.samples):
        from ..superficial_vv import sample_superficial_sequence

        seq = sample_superficial_sequence(entry.ideal, r, sd)
        rep = vv_module(seq.elements, entry.ideal, seed=sd)
        if not rep.stabilized:
            raise UnstabilizedError(f"VV module unstabilized for seed {sd}", sd)
        out.append((seq, rep))
    return out


def _cmd_vv(entry, session):
    result, rows = {"by_length": []}, []
    for r in session.lengths(entry):
        block = []
        for k, (seq, rep) in enumerate(_samples(entry, session, r), start=1):
            d = rep.to_dict()
            d["seed"] = str(rep.seed)
            d["superficial"] = [cert.to_dict() for cert in seq.certificates]
            block.append(d)
            rows.extend([entry.key, r, k, pc.n, pc.length] for pc in rep.pieces)
        result["by_length"].append({"r": r, "samples": block})
    return result, [], rows


def _cmd_ann(entry, session):
    result, rows, v = {"by_length": []}, [], []
    for r in session.lengths(entry):
        block = []
        for k, (_, rep) in enumerate(_samples(entry, session, r), start=1):
            block.append({"seed": str(rep.seed), "elements": [str(x) for x in rep.elements],
                          "annihilator": rep.annihilator.render(),
                          "verdict": rep.verdict.to_dict()})
            rows.append([entry.key, r, k, rep.annihilator.render(), rep.verdict.kind, rep.verdict.N])
        ok = all(b["verdict"]["kind"] in ("unit", "m-primary") for b in block)
        v.append(verdict("ann_unit_or_m_primary", PASS if ok else FAIL, r=r))
        result["by_length"].append({"r": r, "samples": block})
    return result, v, rows


def _cmd_ar(entry, session):
    result, rows, v = {"by_length": []}, [], []
    depth = depth_assoc_graded(entry.ideal, "resolution").depth
    for r in session.lengths(entry):
        est = session.ar(entry, r)
        d = est.to_dict()
        if depth >= r:
            d["warnings"] = d["warnings"] + [f"depth G = {depth} >= r = {r}: the unit ideal is expected"]
        qs = [session.q(entry, i) for i in range(r)]
        if all(q.status == "stable" for q in qs):
            d["lower_bound"] = q_product(qs, entry.ideal.handle.ring).render()
        else:
            d["lower_bound"] = None
        result["by_length"].append(d)
        if not est.stable:
            v.append(verdict("ar_estimate_stabilized", UNSTABLE, r=r, samples=est.samples,
                             window=session.config.window))
            continue
        rows.extend([entry.key, r, k, fp] for k, fp in enumerate(est.trace, start=1))
        expect = "m-primary" if depth < r else "unit"
        v.append(verdict("ar_estimate_kind", PASS if est.verdict.kind == expect else FAIL,
                         r=r, kind=est.verdict.kind, expected=expect))
    return result, v, rows


def _cmd_q(entry, session):
    result, rows, v = {"estimates": []}, [], []
    for i in range(entry.model.dim):
        q = session.q(entry, i)
        result["estimates"].append(q.to_dict())
        for pc in q.pieces:
            rows.append([entry.key, i, pc.n, pc.status, pc.dim if pc.usable else ""])
        if q.status != "stable":
            v.append(verdict("q_stable", UNSTABLE, i=i))
        else:
            ok = q.verdict.kind in ("unit", "m-primary")
            v.append(verdict("q_unit_or_m_primary", PASS if ok else FAIL, i=i))
    return result, v, rows


def _cmd_powers(entry, session):
    r = session.config.r or checks.deficient_length(entry, session) or entry.model.dim
    scan = session.powers(entry, r)
    result = scan.to_dict()
    rows = []
    for row in scan.rows:
        if row.error:
            rows.append([entry.key, row.l, "error", "", ""])
            continue
        rows.append([entry.key, row.l, row.ar.ideal.render(), row.running.render(),
                     row.running_verdict.kind])
    v = [x for x in checks.check_powers(entry, session) if x["status"] != SKIPPED]
    return result, v, rows


def _cmd_verify(entry, session):
    vs = checks.verify_entry(entry, session)
    summary = {}
    for x in vs:
        summary.setdefault(x["group"], []).append(x["status"])
    result = {"groups": {g: checks.summarize([{"status": s} for s in st]) for g, st in summary.items()}}
    rows = [[entry.key, x["group"], x["check"], x["status"]] for x in vs]
    return result, vs, rows


HANDLERS = {
    "gb": (_cmd_gb, ["entry", "index", "generator"]),
    "depth-g": (_cmd_depth, ["entry", "strategy", "depth", "dim"]),
    "vv": (_cmd_vv, ["entry", "r", "sample", "n", "length"]),
    "ann": (_cmd_ann, ["entry", "r", "sample", "annihilator", "kind", "N"]),
    "ar": (_cmd_ar, ["entry", "r", "sample", "fingerprint"]),
    "q": (_cmd_q, ["entry", "i", "n", "status", "dim"]),
    "powers": (_cmd_powers, ["entry", "l", "ar_estimate", "running_intersection", "running_kind"]),
    "verify-all": (_cmd_verify, ["entry", "group", "check", "status"]),
}


def run_entry(command, entry, session):
    fn, _ = HANDLERS[command]
    record = {"entry": entry.key, "ring": entry.model.describe(), "ideal": entry.ideal.render()}
    try:
        result, vs, rows = fn(entry, session)
        status = checks.summarize(vs)
    except UnstabilizedError as exc:
        result, vs, rows, status = None, [verdict(command, UNSTABLE, reason=str(exc))], [], UNSTABLE
    except (SamplingError, VVError) as exc:
        result, vs, rows = None, [verdict(command, FAIL, reason=f"{type(exc).__name__}: {exc}")], []
        status = FAIL
    record["status"] = status
    record["verdicts"] = vs
    record["result"] = result
    return record, rows


# -- serialization -----------------------------------------------------------

def dump_json(obj):
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def dump_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def overall_status(records):
    statuses = {r["status"] for r in records}
    if FAIL in statuses:
        return FAIL
    if UNSTABLE in statuses:
        return UNSTABLE
    return PASS


def exit_code(status):
    return {PASS: EXIT_OK, FAIL: EXIT_FAIL, UNSTABLE: EXIT_UNSTABLE}[status]


def run_digest(document_digest, command, config, fmt="json"):
    key = dump_json({"document": document_digest, "command": command, "config": config.to_dict(),
                     "format": fmt})
    return hashlib.sha256(key.encode()).hexdigest()[:16]


def execute(text, command, config, on_entry=None):
    """Run ``command`` over a document; returns (report dict, csv text, steps, incomplete)."""
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    corpus = parse_corpus(text)
    entries = corpus.entries
    if config.only:
        known = {e.key for e in entries}
        missing = [k for k in config.only if k not in known]
        if missing:
            from ..errors import InputError

            raise InputError(f"unknown entry {missing[0]!r}", "only")
        entries = [e for e in entries if e.key in config.only]
    session = Session(config)
    records, rows, steps = [], [], []
    incomplete = False
    try:
        for e in entries:
            t0 = time.perf_counter()
            rec, rr = run_entry(command, e, session)
            records.append(rec)
            rows.extend(rr)
            steps.append({"entry": e.key, "status": rec["status"],
                          "seconds": round(time.perf_counter() - t0, 3)})
            if on_entry:
                on_entry(rec)
    except KeyboardInterrupt:
        incomplete = True
    report = {
        "schema": SCHEMA,
        "command": command,
        "document_digest": corpus.digest,
        "config": config.to_dict(),
        "incomplete": incomplete,
        "status": overall_status(records) if records else UNSTABLE,
        "entries": records,
    }
    header = HANDLERS[command][1]
    return report, dump_csv(header, rows), steps, incomplete


# -- persistence -------------------------------------------------------------

def atomic_write(path, data):
    """Create ``path`` with ``data`` through a temp file and rename; never overwrites."""
    if os.path.exists(path):
        raise FileExistsError(path)
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def append_line(path, obj):
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(obj, sort_keys=True) + "\n")


def versions():
    from .. import __version__

    out = {"python": platform.python_version(), "vvalla": __version__}
    for dist in ("python-flint", "PyYAML"):
        try:
            out[dist] = metadata.version(dist)
        except metadata.PackageNotFoundError:
            out[dist] = None
    return out


def _outputs(report, csv_text, fmt):
    files = {}
    if fmt in ("json", "both"):
        files["report.json"] = dump_json(report)
    if fmt in ("csv", "both"):
        files["report.csv"] = csv_text
    return files


def run_corpus(text, command, config, out_dir, fmt="json", on_entry=None):
    """Execute and persist a run. Returns (run directory, report, exit status word)."""
    digest = run_digest(hashlib.sha256(text.encode("utf-8")).hexdigest(), command, config, fmt)
    run_dir = os.path.join(out_dir, digest)
    os.makedirs(run_dir, exist_ok=True)
    started = time.time()
    report, csv_text, steps, incomplete = execute(text, command, config, on_entry)
    finished = time.time()
    files = _outputs(report, csv_text, fmt)
    manifest = {
        "digest": digest,
        "document_digest": report["document_digest"],
        "command": command,
        "config": config.to_dict(),
        "format": fmt,
        "seeds": {"base": config.seed,
                  "samples": [str(s) for s in sample_seeds(config.seed, config.samples)]},
        "versions": versions(),
        "wall_clock": {"started": started, "finished": finished,
                       "seconds": round(finished - started, 3)},
        "steps": steps,
        "status": report["status"],
        "files": {name: hashlib.sha256(data.encode()).hexdigest() for name, data in files.items()},
    }
    doc_path = os.path.join(run_dir, "input.yaml")
    if not os.path.exists(doc_path):
        atomic_write(doc_path, text)
    if incomplete:
        # partial results only ever land under an explicit marker
        stamp = f"{int(started * 1000)}"
        for name, data in files.items():
            atomic_write(os.path.join(run_dir, f"INCOMPLETE-{stamp}-{name}"), data)
        return run_dir, report, "incomplete"
    if os.path.exists(os.path.join(run_dir, "manifest.json")):
        same = _compare(run_dir, files)
        append_line(os.path.join(run_dir, "replays.jsonl"),
                    {"finished": finished, "identical": same, "seconds": manifest["wall_clock"]["seconds"]})
        return run_dir, report, report["status"] if same else "mismatch"
    for name, data in files.items():
        atomic_write(os.path.join(run_dir, name), data)
    atomic_write(os.path.join(run_dir, "manifest.json"), dump_json(manifest))
    return run_dir, report, report["status"]


def _compare(run_dir, files):
    for name, data in files.items():
        path = os.path.join(run_dir, name)
        if not os.path.exists(path):
            return False
        with open(path, encoding="utf-8", newline="") as fh:
            if fh.read() != data:
                return False
    return True


def load_manifest(run_dir):
    with open(os.path.join(run_dir, "manifest.json"), encoding="utf-8") as fh:
        return json.load(fh)


def config_from_dict(d):
    d = dict(d)
    d["only"] = tuple(d.get("only") or ())
    return replace(RunConfig(), **d)


def replay(run_dir):
    """Re-execute a stored run and compare report bytes. Returns (identical, report)."""
    manifest = load_manifest(run_dir)
    with open(os.path.join(run_dir, "input.yaml"), encoding="utf-8", newline="") as fh:
        text = fh.read()
    config = config_from_dict(manifest["config"])
    report, csv_text, _, incomplete = execute(text, manifest["command"], config)
    files = _outputs(report, csv_text, manifest.get("format", "json"))
    same = not incomplete and _compare(run_dir, files)
    append_line(os.path.join(run_dir, "replays.jsonl"),
                {"finished": time.time(), "identical": same, "replay": True})
    return same, report


def echo(msg):
    print(msg, file=sys.stderr, flush=True)
