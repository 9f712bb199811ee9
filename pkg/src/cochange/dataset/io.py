"""Dataset serialization: dataset.jsonl plus the tabular LtR text format."""

from pathlib import Path

from ..storage import format_instant, parse_instant, read_jsonl, write_jsonl
from .builder import Candidate, RankingList, WindowConfig
from .features import FEATURE_NAMES

ARTIFACT_NAME = "dataset"


def _window_dict(w: WindowConfig) -> dict:
    return {"t_s": format_instant(w.t_s), "t_d": format_instant(w.t_d), "t_e": format_instant(w.t_e)}


def _window_from(obj: dict) -> WindowConfig:
    return WindowConfig(
        t_s=parse_instant(obj["t_s"]),
        t_d=parse_instant(obj["t_d"]),
        t_e=parse_instant(obj["t_e"]),
    )


def dataset_rows(lists: list[RankingList]) -> list[dict]:
    rows = []
    for rlist in lists:
        rows.append(
            {
                "query": rlist.query,
                "window": _window_dict(rlist.window),
                "candidates": [
                    {"id": c.id, "features": dict(c.features), "label": c.label}
                    for c in rlist.candidates
                ],
            }
        )
    return rows


def lists_from_rows(rows: list[dict]) -> list[RankingList]:
    lists = []
    for row in rows:
        window = _window_from(row["window"])
        candidates = [
            Candidate(id=c["id"], features=dict(c["features"]), label=int(c["label"]))
            for c in row["candidates"]
        ]
        lists.append(RankingList(query=row["query"], window=window, candidates=candidates))
    return lists


def write_dataset(path, lists: list[RankingList], header: dict | None = None) -> None:
    write_jsonl(path, dataset_rows(lists), header=header)


def read_dataset(path) -> tuple[dict | None, list[RankingList]]:
    header, rows = read_jsonl(path, artifact=ARTIFACT_NAME)
    return header, lists_from_rows(rows)


def write_ltr_text(path, lists: list[RankingList], feature_names=FEATURE_NAMES) -> None:
    """`<label> qid:<q> 1:<f1> ... #<candidate-id>` rows, the established
    tabular interchange format for external rankers. Query ids are assigned
    in sorted query order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ordered = sorted(lists, key=lambda r: r.query)
    with open(path, "w", encoding="utf-8") as fh:
        for qid, rlist in enumerate(ordered, 1):
            for cand in rlist.candidates:
                feats = " ".join(
                    f"{i}:{float(cand.features[name]):g}"
                    for i, name in enumerate(feature_names, 1)
                )
                fh.write(f"{cand.label} qid:{qid} {feats} #{cand.id}\n")
