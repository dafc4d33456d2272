"""Raw call-log events to categorical context datasets."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import datetime, time
from pathlib import Path
from typing import Iterable, Literal

from .model import AttributeSchema, Dataset, ordered_classes

RAW_HEADER = ("timestamp", "direction", "duration_seconds", "counterpart", "location", "situation", "event_type")
DATASET_ATTRIBUTES = ("DayTime", "Location", "Situation", "Relationship")
UNSPECIFIED = "unspecified"
DAY_NAMES = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")
DAY_SECONDS = 24 * 3600


class CallLogError(ValueError):
    def __init__(self, line: int, field: str, message: str):
        super().__init__(f"line {line}: field {field!r}: {message}")
        self.line = line
        self.field = field


@dataclass(frozen=True)
class RawCallEvent:
    timestamp: datetime
    direction: Literal["incoming", "outgoing"]
    duration_seconds: int
    counterpart: str
    location: str | None = None
    situation: str | None = None
    event_type: Literal["call", "missed"] = "call"


def _parse_clock(text: str) -> int:
    hh, mm = text.strip().split(":")
    secs = int(hh) * 3600 + int(mm) * 60
    if not 0 <= secs <= DAY_SECONDS or not 0 <= int(mm) < 60:
        raise ValueError(f"bad time of day {text!r}")
    return secs


def _fmt_clock(secs: int) -> str:
    return f"{secs // 3600:02d}:{secs % 3600 // 60:02d}"


@dataclass(frozen=True)
class SegmentationConfig:
    """Fixed day segments.

    ``boundaries`` are the segment end points in seconds after midnight; the
    first segment starts at 00:00 and the last one must end at 24:00.
    """

    boundaries: tuple[int, ...] = (6 * 3600, 12 * 3600, 18 * 3600, DAY_SECONDS)
    day_granularity: Literal["day-of-week", "weekday/weekend"] = "day-of-week"

    def __post_init__(self) -> None:
        b = self.boundaries
        if not b or b[-1] != DAY_SECONDS:
            raise ValueError("the last boundary must be 24:00")
        if any(x >= y for x, y in zip((0,) + b, b)):
            raise ValueError("boundaries must be strictly increasing and after 00:00")
        if self.day_granularity not in ("day-of-week", "weekday/weekend"):
            raise ValueError(f"unknown day granularity {self.day_granularity!r}")

    @classmethod
    def parse(cls, text: str, day_granularity: str = "day-of-week") -> "SegmentationConfig":
        """From a comma list such as ``"06:00,12:00,18:00,24:00"``; 24:00 is appended if absent."""
        cuts = [_parse_clock(t) for t in text.split(",") if t.strip()]
        cuts = [c for c in cuts if c != 0]
        if not cuts or cuts[-1] != DAY_SECONDS:
            cuts.append(DAY_SECONDS)
        return cls(tuple(cuts), day_granularity)  # type: ignore[arg-type]

    def segments(self) -> list[tuple[int, int]]:
        return list(zip((0,) + self.boundaries[:-1], self.boundaries))


def segment_time(ts: datetime, config: SegmentationConfig = SegmentationConfig()) -> str:
    """Label such as ``Fri[09:00-11:00]``; segments are start-inclusive, end-exclusive."""
    secs = ts.hour * 3600 + ts.minute * 60 + ts.second
    for start, end in config.segments():
        if start <= secs < end:
            break
    if config.day_granularity == "day-of-week":
        day = DAY_NAMES[ts.weekday()]
    else:
        day = "Weekend" if ts.weekday() >= 5 else "Weekday"
    return f"{day}[{_fmt_clock(start)}-{_fmt_clock(end)}]"


def derive_behavior(event: RawCallEvent) -> str:
    if event.direction == "outgoing":
        return "Outgoing"
    if event.duration_seconds > 0:
        return "Accept"
    if event.event_type == "missed":
        return "Missed"
    return "Reject"


@dataclass
class RelationshipRegistry:
    """First-seen numbering of counterparts: Rel_1, Rel_2, ... (one registry per user)."""

    labels: dict[str, str] = field(default_factory=dict)

    def __call__(self, counterpart: str) -> str:
        return map_relationship(counterpart, self)

    def dumps(self) -> str:
        return "counterpart,label\n" + "".join(f"{c},{l}\n" for c, l in self.labels.items())


def map_relationship(counterpart: str, registry: RelationshipRegistry) -> str:
    label = registry.labels.get(counterpart)
    if label is None:
        label = f"Rel_{len(registry.labels) + 1}"
        registry.labels[counterpart] = label
    return label


def _parse_row(lineno: int, row: dict[str, str]) -> RawCallEvent:
    raw_ts = row["timestamp"]
    try:
        ts = datetime.fromisoformat(raw_ts)
    except (TypeError, ValueError):
        raise CallLogError(lineno, "timestamp", f"not an ISO-8601 date-time: {raw_ts!r}") from None
    direction = (row["direction"] or "").strip()
    if direction not in ("incoming", "outgoing"):
        raise CallLogError(lineno, "direction", f"expected incoming/outgoing, got {direction!r}")
    try:
        duration = int(row["duration_seconds"])
    except (TypeError, ValueError):
        raise CallLogError(lineno, "duration_seconds", f"not an integer: {row['duration_seconds']!r}") from None
    if duration < 0:
        raise CallLogError(lineno, "duration_seconds", f"negative duration {duration}")
    counterpart = (row["counterpart"] or "").strip()
    if not counterpart:
        raise CallLogError(lineno, "counterpart", "empty identifier")
    event_type = (row.get("event_type") or "call").strip() or "call"
    if event_type not in ("call", "missed"):
        raise CallLogError(lineno, "event_type", f"expected call/missed, got {event_type!r}")
    return RawCallEvent(ts, direction, duration, counterpart,  # type: ignore[arg-type]
                        (row.get("location") or "").strip() or None,
                        (row.get("situation") or "").strip() or None,
                        event_type)  # type: ignore[arg-type]


def parse_call_log(lines: Iterable[str] | str) -> list[RawCallEvent]:
    """Parse raw call-log text. The ``event_type`` column may be omitted."""
    if isinstance(lines, str):
        lines = io.StringIO(lines)
    reader = csv.reader(lines)
    header = next(reader, None)
    if header is None or not any(h.strip() for h in header):
        return []
    header = [h.strip() for h in header]
    if tuple(header) not in (RAW_HEADER, RAW_HEADER[:-1]):
        raise CallLogError(1, "header", f"expected {','.join(RAW_HEADER)}")
    events = []
    for lineno, fields in enumerate(reader, start=2):
        if not fields or not any(f.strip() for f in fields):
            continue
        if len(fields) > len(header) or len(fields) < 4:
            raise CallLogError(lineno, "row", f"expected up to {len(header)} fields, got {len(fields)}")
        row = dict(zip(header, fields))
        events.append(_parse_row(lineno, row))
    return events


def read_call_log(path: str | Path) -> list[RawCallEvent]:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_call_log(fh)


def build_dataset(events: Iterable[RawCallEvent], config: SegmentationConfig = SegmentationConfig(),
                  registry: RelationshipRegistry | None = None) -> Dataset:
    """One instance per event: (DayTime, Location, Situation, Relationship) -> behavior."""
    registry = RelationshipRegistry() if registry is None else registry
    rows, labels = [], []
    for ev in events:
        rows.append((
            segment_time(ev.timestamp, config),
            ev.location or UNSPECIFIED,
            ev.situation or UNSPECIFIED,
            map_relationship(ev.counterpart, registry),
        ))
        labels.append(derive_behavior(ev))
    domains = tuple(tuple(dict.fromkeys(r[a] for r in rows)) for a in range(len(DATASET_ATTRIBUTES)))
    schema = AttributeSchema(DATASET_ATTRIBUTES, domains, ordered_classes(labels))
    return Dataset(schema, tuple(rows), tuple(labels))
