"""Command line: eval, check, report and oracle.

Exit codes: 0 success, 1 a check failed, 2 bad configuration, 3 contour pole,
4 I/O failure.  JSON output has a fixed key order, so identical invocations
print identical bytes.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass
from typing import Sequence

from . import gln, rank2
from .integrand import ContourPoleError, UnsupportedPoleError
from .qfield import RatFunc, cyclotomic_label, divides_power_of, parse_ratfunc
from .residue import enumerate_tree, integrate_torus
from .weyl import poincare

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_CONTOUR, EXIT_IO = 0, 1, 2, 3, 4

CSV_COLUMNS = [
    "group",
    "partition/levi",
    "value",
    "denominator",
    "divides_k",
    "regular_roots",
    "singular_roots",
    "oracle_max_relerr",
]

# c_M for the (2,2) cell as displayed in the worked example; the product formula gives 1/4 where this has 1/2
CM_22_DISPLAYED = "q^4(q-1)^2/(2(q+1)^2)"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    group: str | None = None
    partition: gln.LeviSpec | None = None
    all_partitions: int | None = None
    n: int | None = None
    levi: str | None = None
    trace_exp: tuple[int, ...] = (0,)
    rank: int = 1
    variant: str = "corrected"
    measure: str = "dz/z"
    oracle_q: tuple[float, ...] = ()
    tol: float = 1e-9
    grid: int = 1024
    fmt: str = "json"
    output: str | None = None
    trace_branches: bool = False
    shortcut: bool = True
    reorder: bool = False
    formal_degrees: bool = False

    def validate(self) -> None:
        if self.partition is not None and self.group != "gln":
            raise ConfigError("--partition needs --group gln")
        if self.levi is not None and self.group not in ("sp4", "g2"):
            raise ConfigError("--levi needs --group sp4 or g2")
        if self.group == "sp4" and self.levi not in (None, "Mh", "Ms"):
            raise ConfigError("Sp4 components are Mh and Ms")
        if self.group == "g2" and self.levi not in (None, "M1", "M2"):
            raise ConfigError("G2 components are M1 and M2")
        if self.rank < 1:
            raise ConfigError("--rank must be positive")
        if any(q <= 1 for q in self.oracle_q):
            raise ConfigError("oracle q values must exceed 1")


# ---------------------------------------------------------------------------
# argument parsing


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers, got %r" % text)


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers, got %r" % text)


def _partition(text: str) -> gln.LeviSpec:
    try:
        return gln.LeviSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iwahori-plancherel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--group", choices=["gln", "sp4", "g2"])
        p.add_argument("--partition", type=_partition, help="block sizes, e.g. 1,1,2")
        p.add_argument("--levi", help="Mh, Ms (sp4) or M1, M2 (g2)")
        p.add_argument("--trace-exp", type=_int_list, default=(0,), help="exponents e of the trace sum z^e")
        p.add_argument("--rank", type=int, default=1)
        p.add_argument("--variant", choices=["corrected", "printed"], default="corrected")
        p.add_argument("--measure", choices=["dz/z", "dz"], default="dz/z")
        p.add_argument("--oracle-q", type=_float_list, default=())
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--grid", type=int, default=1024)
        p.add_argument("--format", dest="fmt", choices=["json", "csv", "text"], default="json")
        p.add_argument("--trace", dest="trace_branches", action="store_true", help="emit residue branches")
        p.add_argument("--no-shortcut", dest="shortcut", action="store_false")
        p.add_argument("--reorder", action="store_true")

    p_eval = sub.add_parser("eval", help="evaluate one integral")
    common(p_eval)
    p_check = sub.add_parser("check", help="run verification checks")
    common(p_check)
    p_check.add_argument("--all-partitions", type=int, metavar="N")
    p_check.add_argument("--formal-degrees", action="store_true")
    p_report = sub.add_parser("report", help="write a table of results")
    common(p_report)
    p_report.add_argument("-n", type=int)
    p_report.add_argument("-o", "--output")
    p_report.add_argument("--formal-degrees", action="store_true")
    p_oracle = sub.add_parser("oracle", help="compare exact values with quadrature")
    common(p_oracle)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=args.command,
        group=args.group,
        partition=args.partition,
        all_partitions=getattr(args, "all_partitions", None),
        n=getattr(args, "n", None),
        levi=args.levi,
        trace_exp=args.trace_exp or (0,),
        rank=args.rank,
        variant=args.variant,
        measure=args.measure,
        oracle_q=args.oracle_q,
        tol=args.tol,
        grid=args.grid,
        fmt=args.fmt,
        output=getattr(args, "output", None),
        trace_branches=args.trace_branches,
        shortcut=args.shortcut,
        reorder=args.reorder,
        formal_degrees=getattr(args, "formal_degrees", False),
    )
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# GL_n


def _engine(f, cfg: RunConfig) -> RatFunc:
    return integrate_torus(f, shortcut=cfg.shortcut, reorder=cfg.reorder)


def gln_record(levi: gln.LeviSpec, cfg: RunConfig) -> dict:
    density = gln.density_integrand(levi)
    engine = _engine(density, cfg)
    closed = gln.closed_form_value(levi)
    cm = gln.c_M(levi)
    f = gln.fd1(levi, cfg.rank, engine)
    n = levi.n
    P = gln.poincare_sym(n)
    k = divides_power_of(f.den, P)
    sing = gln.singular_classes(f, n)
    record = {
        "n": n,
        "partition": levi.label(),
        "cM": cm.to_text(),
        "closed_form": closed.to_text(),
        "engine_value": engine.to_text(),
        "fd1": f.to_text(),
        "poincare": RatFunc.from_poly(P).to_text(),
        "divides": {"ok": k is not None and k <= n, "k": k},
        "singular_roots": [cyclotomic_label(d) for d in sing],
        "regular_roots": [cyclotomic_label(d) for d in range(2, n + 1) if d not in sing],
        "numerator_degree": gln.numerator_degree(f),
        "agreement": cm * closed == cm * engine,
    }
    if levi.blocks == (2, 2):
        record["cM_displayed"] = CM_22_DISPLAYED
    if cfg.trace_branches:
        record["branches"] = [b.to_json() for b in enumerate_tree(density)]
    if cfg.oracle_q:
        from .oracle import compare

        report = compare(engine, density, cfg.oracle_q, cfg.tol, cfg.grid)
        record["oracle"] = report.to_json()
    return record


def gln_failures(record: dict) -> list[str]:
    out = []
    if not record["agreement"]:
        out.append("closed form and engine disagree")
    if not record["divides"]["ok"]:
        out.append("fd1 denominator does not divide P^k with k <= n")
    if "oracle" in record and not record["oracle"]["passed"]:
        out.append("oracle relative error above tolerance")
    return out


# ---------------------------------------------------------------------------
# Sp4 and G2


def _trace(cfg: RunConfig) -> dict[int, int]:
    out: dict[int, int] = {}
    for e in cfg.trace_exp:
        out[e] = out.get(e, 0) + 1
    return out


def _single_exp(cfg: RunConfig) -> int | None:
    return cfg.trace_exp[0] if len(cfg.trace_exp) == 1 else None


def sp4_record(levi: str, cfg: RunConfig) -> dict:
    entry = rank2.density("Sp4", levi)
    value = rank2.sp4_component_integral(levi, _trace(cfg), cfg.measure)
    record = {
        "group": "Sp4",
        "levi": levi,
        "trace_exp": list(cfg.trace_exp),
        "measure": cfg.measure,
        "value": value.to_text(),
        "prefactor": entry.prefactor.to_text(),
        "multipliers": list(entry.multipliers),
        "divides": _divides(value, "C2"),
    }
    e = _single_exp(cfg)
    if e is not None:
        shown = rank2.sp4_mh_displayed(e) if levi == "Mh" else rank2.sp4_ms_displayed(e)
        diff = value - shown
        record["displayed_closed_form"] = shown.to_text()
        record["difference"] = diff.to_text()
        record["difference_is_laurent"] = diff.is_laurent()
        if levi == "Mh":
            record["matches_displayed"] = diff.is_zero() if e >= 0 else diff.is_laurent()
        else:
            record["matches_displayed"] = diff.is_laurent()
            record["residue_form"] = rank2.sp4_ms_residue_form(e).to_text()
    if cfg.oracle_q:
        record["oracle"] = _rank1_oracle(entry, value, cfg)
    return record


def g2_record(levi: str, cfg: RunConfig) -> dict:
    entry = rank2.density("G2", levi, cfg.variant)
    bare = rank2.g2_component_integral(levi, _trace(cfg), cfg.variant, with_prefactor=False, measure=cfg.measure)
    value = entry.prefactor * bare
    record = {
        "group": "G2",
        "levi": levi,
        "variant": cfg.variant,
        "trace_exp": list(cfg.trace_exp),
        "measure": cfg.measure,
        "value": value.to_text(),
        "residue_sum": bare.to_text(),
        "prefactor": entry.prefactor.to_text(),
        "zeta_free": value.is_zeta_free(),
        "coefficients_integral": rank2.integer_coefficients(bare),
        "divides": _divides(value, "G2"),
    }
    if cfg.oracle_q:
        record["oracle"] = _rank1_oracle(entry, bare, cfg)
    return record


def _divides(value: RatFunc, cartan: str) -> dict:
    k = divides_power_of(value.den, poincare(cartan))
    return {"ok": k is not None, "k": k}


def _rank1_oracle(entry: rank2.DensityEntry, value: RatFunc, cfg: RunConfig) -> dict:
    from .oracle import compare

    shift = -1 if cfg.measure == "dz/z" else 0
    terms = [entry.integrand.times_monomial((e + shift,)) for e in cfg.trace_exp]
    reports = [compare(value, terms[0], cfg.oracle_q, cfg.tol, cfg.grid)] if len(terms) == 1 else []
    if not reports:
        raise ConfigError("the oracle takes a single trace exponent")
    return reports[0].to_json()


def rank2_failures(record: dict) -> list[str]:
    out = []
    if not record["divides"]["ok"]:
        out.append("denominator does not divide a power of the Poincare polynomial")
    if record.get("matches_displayed") is False:
        out.append("engine value differs from the displayed closed form beyond a Laurent polynomial")
    if record["group"] == "G2" and not (record["zeta_free"] and record["coefficients_integral"]):
        out.append("value is not zeta-free with integer coefficients")
    if "oracle" in record and not record["oracle"]["passed"]:
        out.append("oracle relative error above tolerance")
    return out


# ---------------------------------------------------------------------------
# output helpers


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _emit(obj, cfg: RunConfig, out) -> None:
    if cfg.fmt == "text":
        out.write(_text(obj))
    elif cfg.fmt == "csv":
        rows = obj if isinstance(obj, list) else [obj]
        out.write(rows_to_csv([csv_row(r) for r in rows]))
    else:
        out.write(dump_json(obj))


def _text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, list):
        return "".join(_text(x, indent) for x in obj)
    if not isinstance(obj, dict):
        return pad + str(obj) + "\n"
    lines = []
    for k, v in obj.items():
        if isinstance(v, (dict, list)):
            lines.append("%s%s:\n%s" % (pad, k, _text(v, indent + 1)))
        else:
            lines.append("%s%s: %s\n" % (pad, k, v))
    return "".join(lines)


def csv_row(record: dict) -> dict:
    if "partition" in record:
        group, key, value = "GL%d" % record["n"], record["partition"], record["fd1"]
        regular, singular = record["regular_roots"], record["singular_roots"]
    elif "label" in record:
        group, key, value = record.get("weyl_type") or "", record["label"], record["value"]
        regular, singular = [], list(record.get("denominator_factors", {}))
    else:
        group, key, value = record["group"], "%s e=%s" % (record["levi"], ",".join(map(str, record["trace_exp"]))), record["value"]
        regular, singular = [], []
    den = parse_ratfunc(value).den if value else None
    oracle = record.get("oracle")
    divides = record.get("divides", {})
    return {
        "group": group,
        "partition/levi": key,
        "value": value,
        "denominator": RatFunc.from_poly(den).to_text() if den is not None else "",
        "divides_k": "" if divides.get("k") is None else divides["k"],
        "regular_roots": ";".join(regular),
        "singular_roots": ";".join(singular),
        "oracle_max_relerr": "" if oracle is None else "%.3e" % oracle["max_rel_error"],
    }


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def formal_degree_records() -> list[dict]:
    out = []
    for label, entry in rank2.load_catalog().items():
        check = rank2.check_formal_degree_poles(entry)
        record = {"label": label, "value": entry.value.to_text(), "source": entry.source}
        record.update(check.to_json())
        record["divides"] = {"ok": check.ok, "k": check.poincare_k}
        if entry.notes:
            record["notes"] = entry.notes
        out.append(record)
    return out


# ---------------------------------------------------------------------------
# commands


def _levis(cfg: RunConfig) -> list[str]:
    if cfg.levi:
        return [cfg.levi]
    return ["Mh", "Ms"] if cfg.group == "sp4" else ["M1", "M2"]


def cmd_eval(cfg: RunConfig, out=sys.stdout) -> int:
    if cfg.group == "gln":
        if cfg.partition is None:
            raise ConfigError("eval --group gln needs --partition")
        _emit(gln_record(cfg.partition, cfg), cfg, out)
    elif cfg.group in ("sp4", "g2"):
        build = sp4_record if cfg.group == "sp4" else g2_record
        records = [build(levi, cfg) for levi in _levis(cfg)]
        _emit(records[0] if len(records) == 1 else records, cfg, out)
    else:
        raise ConfigError("eval needs --group")
    return EXIT_OK


def cmd_check(cfg: RunConfig, out=sys.stdout) -> int:
    failures: list[dict] = []
    rows: list[dict] = []
    if cfg.formal_degrees:
        for record in formal_degree_records():
            rows.append({"label": record["label"], "ok": record["ok"], "denominator_factors": record["denominator_factors"]})
            if not record["ok"]:
                failures.append({"target": record["label"], "reason": "pole check failed"})
    if cfg.group == "gln":
        if cfg.all_partitions is not None:
            levis = list(gln.partitions(cfg.all_partitions))
        elif cfg.partition is not None:
            levis = [cfg.partition]
        else:
            raise ConfigError("check --group gln needs --partition or --all-partitions")
        for levi in levis:
            record = gln_record(levi, cfg)
            row = {"partition": record["partition"], "k": record["divides"]["k"], "agree": record["agreement"]}
            if "oracle" in record:
                row["oracle_max_relerr"] = record["oracle"]["max_rel_error"]
            rows.append(row)
            failures.extend({"target": levi.label(), "reason": r} for r in gln_failures(record))
    elif cfg.group in ("sp4", "g2"):
        build = sp4_record if cfg.group == "sp4" else g2_record
        for levi in _levis(cfg):
            record = build(levi, cfg)
            rows.append({"levi": levi, "trace_exp": record["trace_exp"], "value": record["value"]})
            failures.extend({"target": levi, "reason": r} for r in rank2_failures(record))
    elif not cfg.formal_degrees:
        raise ConfigError("check needs --group or --formal-degrees")
    out.write(dump_json({"ok": not failures, "rows": rows, "failures": failures}))
    return EXIT_OK if not failures else EXIT_FAILED


def cmd_report(cfg: RunConfig, out=sys.stdout) -> int:
    records: list[dict]
    summary: dict = {}
    if cfg.formal_degrees:
        records = formal_degree_records()
    elif cfg.group == "gln":
        if cfg.n is None:
            raise ConfigError("report --group gln needs -n")
        start = time.perf_counter()
        records = [gln_record(levi, cfg) for levi in gln.partitions(cfg.n)]
        measured = max(r["numerator_degree"] for r in records)
        summary = {
            "n": cfg.n,
            "cells": len(records),
            "max_numerator_degree": measured,
            "conjectured_numerator_degree": gln.conjectured_numerator_degree(cfg.n),
            "seconds": round(time.perf_counter() - start, 3),
        }
    elif cfg.group in ("sp4", "g2"):
        build = sp4_record if cfg.group == "sp4" else g2_record
        span = range(-2, 4) if cfg.group == "sp4" else range(-3, 4)
        records = []
        for levi in _levis(cfg):
            for e in span:
                sub = RunConfig(**{**cfg.__dict__, "trace_exp": (e,)})
                records.append(build(levi, sub))
    else:
        raise ConfigError("report needs --group or --formal-degrees")
    fmt = cfg.fmt
    if cfg.output and fmt == "json" and cfg.output.endswith(".csv"):
        fmt = "csv"
    if fmt == "csv":
        text = rows_to_csv([csv_row(r) for r in records])
    else:
        payload = {"summary": summary, "rows": records} if summary else {"rows": records}
        text = dump_json(payload)
    if cfg.output:
        try:
            with open(cfg.output, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            sys.stderr.write("cannot write %s: %s\n" % (cfg.output, exc))
            return EXIT_IO
        out.write(dump_json({"output": cfg.output, "rows": len(records), **({"summary": summary} if summary else {})}))
    else:
        out.write(text)
    return EXIT_OK


def cmd_oracle(cfg: RunConfig, out=sys.stdout) -> int:
    from .oracle import compare

    qs = cfg.oracle_q or (2.0, 3.0)
    cfg = RunConfig(**{**cfg.__dict__, "oracle_q": qs})
    if cfg.group == "gln":
        if cfg.partition is None:
            raise ConfigError("oracle --group gln needs --partition")
        density = gln.density_integrand(cfg.partition)
        report = compare(_engine(density, cfg), density, qs, cfg.tol, cfg.grid).to_json()
        reports = [dict(target=cfg.partition.label(), **report)]
    elif cfg.group in ("sp4", "g2"):
        build = sp4_record if cfg.group == "sp4" else g2_record
        reports = [dict(target=levi, **build(levi, cfg)["oracle"]) for levi in _levis(cfg)]
    else:
        raise ConfigError("oracle needs --group")
    out.write(dump_json(reports))
    return EXIT_OK if all(r["passed"] for r in reports) else EXIT_FAILED


COMMANDS = {"eval": cmd_eval, "check": cmd_check, "report": cmd_report, "oracle": cmd_oracle}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg, out)
    except (ConfigError, KeyError) as exc:
        sys.stderr.write("configuration error: %s\n" % exc)
        return EXIT_CONFIG
    except (ContourPoleError, UnsupportedPoleError) as exc:
        sys.stderr.write("contour pole: %s\n" % exc)
        return EXIT_CONTOUR
    except OSError as exc:
        sys.stderr.write("I/O error: %s\n" % exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
