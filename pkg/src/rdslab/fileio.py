"""File ingestion and emission.

Network files come in pairs: a whitespace-delimited edge list (two or,
uniformly, three columns when weighted) and a node attribute file mapping
node label to group token. Recruitment samples are CSV with the fixed
header ``respondent_id,wave,recruiter_id,group,reported_degree,
reported_n_A,reported_n_B``. Results tables are CSV with floats rendered
at six significant digits. All validation failures raise
:class:`ValidationError` naming the offending line.
"""

from __future__ import annotations

import csv
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ValidationError
from .netcore import Group, Network
from .rdssim import RdsSample

SAMPLE_HEADER = [
    "respondent_id",
    "wave",
    "recruiter_id",
    "group",
    "reported_degree",
    "reported_n_A",
    "reported_n_B",
]

RESULTS_HEADER = [
    "homophily",
    "activity_ratio",
    "p_a",
    "p_diff",
    "p_miss_a",
    "p_miss_b",
    "p_err_ab",
    "p_err_ba",
    "estimator",
    "truth",
    "mean",
    "bias",
    "sd",
    "rmse",
    "p_best",
    "n_undefined",
    "ci_coverage",
    "status",
]

ESTIMATES_HEADER = ["cell", "replication", "estimator", "estimate"]


def fmt6(value: Optional[float]) -> str:
    """Render a float at six significant digits; empty for missing."""
    if value is None:
        return ""
    if isinstance(value, float) and math.isnan(value):
        return ""
    return f"{value:.6g}"


def _data_lines(path: str) -> List[Tuple[int, List[str]]]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            out.append((lineno, stripped.split()))
    return out


def ingest_network(edge_path: str, attr_path: str) -> Tuple[Network, List[str]]:
    """Read an edge list and attribute file into a Network.

    Node labels are arbitrary tokens; they are assigned dense ids in
    attribute-file order and the label list is returned alongside.
    Self loops, duplicate edges, unknown labels, inconsistent column
    counts, nonpositive weights and nodes missing from either file are
    rejected with the offending location.
    """
    attr_lines = _data_lines(attr_path)
    if not attr_lines:
        raise ValidationError(f"{attr_path}: no node attributes found")
    labels: List[str] = []
    index: Dict[str, int] = {}
    groups: List[int] = []
    for lineno, tokens in attr_lines:
        if len(tokens) != 2:
            raise ValidationError(f"{attr_path}:{lineno}: expected 'node group'")
        label, gtok = tokens
        if label in index:
            raise ValidationError(f"{attr_path}:{lineno}: duplicate node {label!r}")
        index[label] = len(labels)
        labels.append(label)
        groups.append(int(Group.parse(gtok)))

    edge_lines = _data_lines(edge_path)
    if not edge_lines:
        raise ValidationError(f"{edge_path}: no edges found")
    arity = len(edge_lines[0][1])
    if arity not in (2, 3):
        raise ValidationError(
            f"{edge_path}:{edge_lines[0][0]}: expected 2 or 3 columns, got {arity}"
        )
    us: List[int] = []
    vs: List[int] = []
    ws: List[float] = []
    seen = set()
    touched = np.zeros(len(labels), dtype=bool)
    for lineno, tokens in edge_lines:
        if len(tokens) != arity:
            raise ValidationError(
                f"{edge_path}:{lineno}: expected {arity} columns, got {len(tokens)}"
            )
        for tok in tokens[:2]:
            if tok not in index:
                raise ValidationError(f"{edge_path}:{lineno}: unknown node {tok!r}")
        a = index[tokens[0]]
        b = index[tokens[1]]
        if a == b:
            raise ValidationError(f"{edge_path}:{lineno}: self loop on {tokens[0]!r}")
        key = (a, b) if a < b else (b, a)
        if key in seen:
            raise ValidationError(f"{edge_path}:{lineno}: duplicate edge {tokens[0]!r} {tokens[1]!r}")
        seen.add(key)
        if arity == 3:
            try:
                w = float(tokens[2])
            except ValueError:
                raise ValidationError(f"{edge_path}:{lineno}: bad weight {tokens[2]!r}") from None
            if not w > 0 or math.isnan(w) or math.isinf(w):
                raise ValidationError(f"{edge_path}:{lineno}: weight must be finite and positive")
            ws.append(w)
        us.append(a)
        vs.append(b)
        touched[a] = True
        touched[b] = True
    silent = np.flatnonzero(~touched)
    if silent.size:
        raise ValidationError(
            f"{attr_path}: node {labels[int(silent[0])]!r} appears in no edge"
        )
    edges = np.stack([np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64)], axis=1)
    weights = np.asarray(ws, dtype=np.float64) if arity == 3 else None
    net = Network.from_edges(len(labels), edges, np.asarray(groups, dtype=np.uint8), weights)
    return net, labels


def write_network(
    net: Network,
    edge_path: str,
    attr_path: str,
    labels: Optional[Sequence[str]] = None,
) -> None:
    """Emit the edge list (with weights when present) and attribute file."""
    if labels is None:
        labels = [str(i) for i in range(net.n)]
    if len(labels) != net.n:
        raise ValidationError("labels must cover every node")
    u, v, w = net.edge_list()
    with open(edge_path, "w", encoding="utf-8") as fh:
        for i in range(u.size):
            if w is not None:
                fh.write(f"{labels[int(u[i])]} {labels[int(v[i])]} {fmt6(float(w[i]))}\n")
            else:
                fh.write(f"{labels[int(u[i])]} {labels[int(v[i])]}\n")
    with open(attr_path, "w", encoding="utf-8") as fh:
        for i in range(net.n):
            fh.write(f"{labels[i]} {Group(int(net.groups[i])).name}\n")


def write_rds_sample(sample: RdsSample, path: str) -> None:
    """Emit a recruitment sample as CSV in recruitment order."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SAMPLE_HEADER)
        for i in range(sample.size):
            rec = int(sample.recruiter_index[i])
            writer.writerow(
                [
                    sample.label_of(i),
                    int(sample.wave[i]),
                    "" if rec < 0 else sample.label_of(rec),
                    Group(int(sample.true_group[i])).name,
                    int(sample.reported_degree[i]),
                    int(sample.reported_n_a[i]),
                    int(sample.reported_n_b[i]),
                ]
            )


def ingest_rds_data(path: str) -> RdsSample:
    """Read a recruitment sample CSV.

    Respondent ids are arbitrary tokens mapped to dense row ids; reported
    values double as the true ones since field data carries no ground
    truth. Recruiter references must point at an earlier row one wave
    down; seeds have an empty recruiter and wave zero.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file") from None
        if [h.strip() for h in header] != SAMPLE_HEADER:
            raise ValidationError(
                f"{path}: header must be {','.join(SAMPLE_HEADER)}"
            )
        labels: List[str] = []
        index: Dict[str, int] = {}
        waves: List[int] = []
        recs: List[int] = []
        groups: List[int] = []
        degs: List[int] = []
        nas: List[int] = []
        nbs: List[int] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(SAMPLE_HEADER):
                raise ValidationError(f"{path}:{lineno}: expected {len(SAMPLE_HEADER)} fields")
            rid, wave_s, rec_s, gtok, deg_s, na_s, nb_s = [f.strip() for f in row]
            if rid in index:
                raise ValidationError(f"{path}:{lineno}: duplicate respondent {rid!r}")
            try:
                wave = int(wave_s)
                deg = int(deg_s)
                na = int(na_s)
                nb = int(nb_s)
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: malformed integer field") from None
            if wave < 0:
                raise ValidationError(f"{path}:{lineno}: wave must be nonnegative")
            if deg < 1:
                raise ValidationError(f"{path}:{lineno}: reported degree must be at least 1")
            if na < 0 or nb < 0 or na + nb != deg:
                raise ValidationError(
                    f"{path}:{lineno}: reported tallies must be nonnegative and sum to the degree"
                )
            if rec_s == "":
                if wave != 0:
                    raise ValidationError(f"{path}:{lineno}: seeds must be wave 0")
                rec = -1
            else:
                if rec_s not in index:
                    raise ValidationError(
                        f"{path}:{lineno}: recruiter {rec_s!r} not seen on an earlier row"
                    )
                rec = index[rec_s]
                if wave != waves[rec] + 1:
                    raise ValidationError(
                        f"{path}:{lineno}: wave must be recruiter wave + 1"
                    )
            index[rid] = len(labels)
            labels.append(rid)
            waves.append(wave)
            recs.append(rec)
            groups.append(int(Group.parse(gtok)))
            degs.append(deg)
            nas.append(na)
            nbs.append(nb)
    if not labels:
        raise ValidationError(f"{path}: no respondents found")
    sample = RdsSample(
        node_id=np.arange(len(labels), dtype=np.int64),
        wave=np.asarray(waves, dtype=np.int64),
        recruiter_index=np.asarray(recs, dtype=np.int64),
        true_group=np.asarray(groups, dtype=np.uint8),
        true_degree=np.asarray(degs, dtype=np.int64),
        reported_degree=np.asarray(degs, dtype=np.int64),
        reported_n_a=np.asarray(nas, dtype=np.int64),
        reported_n_b=np.asarray(nbs, dtype=np.int64),
        complete=True,
        node_labels=labels,
    )
    sample.validate()
    return sample


def write_results_csv(rows: Sequence[Dict[str, object]], path: str) -> None:
    """Emit aggregate metric rows with a fixed column order."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULTS_HEADER)
        for row in rows:
            out = []
            for col in RESULTS_HEADER:
                val = row.get(col)
                if col in ("estimator", "status"):
                    out.append("" if val is None else str(val))
                elif col == "n_undefined":
                    out.append("" if val is None else str(int(val)))
                else:
                    out.append(fmt6(val if val is None else float(val)))
            writer.writerow(out)


def read_results_csv(path: str) -> List[Dict[str, object]]:
    """Parse a results CSV back into typed rows."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file") from None
        if header != RESULTS_HEADER:
            raise ValidationError(f"{path}: unexpected results header")
        rows: List[Dict[str, object]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(RESULTS_HEADER):
                raise ValidationError(f"{path}:{lineno}: expected {len(RESULTS_HEADER)} fields")
            parsed: Dict[str, object] = {}
            for col, val in zip(RESULTS_HEADER, row):
                if col in ("estimator", "status"):
                    parsed[col] = val
                elif col == "n_undefined":
                    parsed[col] = int(val) if val else None
                else:
                    parsed[col] = float(val) if val else None
            rows.append(parsed)
    return rows


def write_estimates_csv(rows: Sequence[Tuple[int, int, str, Optional[float]]], path: str) -> None:
    """Emit per-replication raw estimates (cell, replication, estimator)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ESTIMATES_HEADER)
        for cell, rep, name, est in rows:
            writer.writerow([cell, rep, name, fmt6(est)])


def read_estimates_csv(path: str) -> List[Tuple[int, int, str, Optional[float]]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file") from None
        if header != ESTIMATES_HEADER:
            raise ValidationError(f"{path}: unexpected estimates header")
        out = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ValidationError(f"{path}:{lineno}: expected 4 fields")
            cell, rep, name, est = row
            out.append((int(cell), int(rep), name, float(est) if est else None))
    return out
