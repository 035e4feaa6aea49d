"""Corpus-level benchmark assembly: generation, balancing, I/O and statistics."""

from __future__ import annotations

import hashlib
import io
import json
import random
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import IO, Iterable, Sequence

from .annotations import ActionPhrase, ActionVocabulary, VideoAnnotation, load_action_vocabulary
from .errors import EmptyCorpus, SchemaViolation, SinkFailure
from .language import (
    LETTERS,
    MCQ_ANSWER_SLOT,
    is_verb_led,
    render_boolean,
    render_mcq,
    sample_distractors,
    sample_negatives,
)
from .logic import DEFAULT_TAU_ADJ, TemporalCategory, classify_tuples
from .timeline import DEFAULT_THETA, build_instance_states

VARIANT_TARGETS = {"S": 2000, "L": 10000}

FIELDS = (
    "id",
    "dataset",
    "video_id",
    "category",
    "complexity",
    "qtype",
    "question",
    "answer",
    "choices",
    "provenance",
    "seed_lineage",
)


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from arbitrary printable parts."""
    digest = hashlib.sha256("\x1f".join(map(str, parts)).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


@dataclass(frozen=True)
class GenerationConfig:
    variant: str = "S"
    per_category_target: int | None = None
    boolean_fraction: float = 0.5
    theta: float = DEFAULT_THETA
    tau_adj: int = DEFAULT_TAU_ADJ
    global_seed: int = 0
    dataset_tag: str = "custom"

    def __post_init__(self):
        if self.variant not in VARIANT_TARGETS:
            raise ValueError(f"variant must be one of {sorted(VARIANT_TARGETS)}")
        if self.per_category_target is None:
            object.__setattr__(self, "per_category_target", VARIANT_TARGETS[self.variant])
        if self.per_category_target <= 0:
            raise ValueError("per_category_target must be positive")
        if not 0 < self.boolean_fraction < 1:
            raise ValueError("boolean_fraction must lie in (0, 1)")
        if not 0 <= self.theta <= 1:
            raise ValueError("theta must lie in [0, 1]")
        if self.tau_adj < 1:
            raise ValueError("tau_adj must be at least 1")

    def to_dict(self) -> dict:
        return asdict(self)


def _action_json(a: ActionPhrase) -> list[str]:
    return [a.actor, a.verb_phrase]


@dataclass(frozen=True)
class Provenance:
    actions: tuple[ActionPhrase, ...]
    polarity: str  # "positive" or "negative"
    distractors: tuple[ActionPhrase, ...] = ()

    def to_json(self) -> dict:
        out = {"actions": [_action_json(a) for a in self.actions], "polarity": self.polarity}
        if self.distractors:
            out["distractors"] = [_action_json(a) for a in self.distractors]
        return out


@dataclass(frozen=True)
class QAPair:
    id: str
    dataset: str
    video_id: str
    category: str
    complexity: int
    qtype: str  # "boolean" or "mcq"
    question: str
    answer: str
    choices: tuple[str, ...] | None
    provenance: Provenance
    seed_lineage: tuple[int, str, str, int]

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "dataset": self.dataset,
            "video_id": self.video_id,
            "category": self.category,
            "complexity": self.complexity,
            "qtype": self.qtype,
            "question": self.question,
            "answer": self.answer,
            "choices": list(self.choices) if self.choices is not None else None,
            "provenance": self.provenance.to_json(),
            "seed_lineage": list(self.seed_lineage),
        }


def make_id(dataset: str, category: str, qtype: str, video_id: str, provenance: Provenance, lineage) -> str:
    parts = [video_id, provenance.polarity]
    parts += [f"{a.actor}/{a.verb_phrase}" for a in provenance.actions]
    parts += [f"~{a.actor}/{a.verb_phrase}" for a in provenance.distractors]
    parts += [str(x) for x in lineage]
    digest = hashlib.sha1("\x1f".join(parts).encode("utf-8")).hexdigest()[:16]
    return f"{dataset}:{category}:{qtype}:{digest}"


@dataclass(frozen=True)
class Candidate:
    """A QA pair whose text has not been rendered yet.

    Generation produces many more candidates than a balanced benchmark keeps,
    so rendering is deferred until an item is selected.
    """

    id: str
    dataset: str
    video_id: str
    category: TemporalCategory
    qtype: str
    provenance: Provenance
    lineage: tuple
    mcq_seed: int = 0

    @property
    def pool(self) -> str:
        if self.qtype == "mcq":
            return "mcq"
        return "yes" if self.provenance.polarity == "positive" else "no"

    def render(self) -> QAPair:
        cat, prov = self.category, self.provenance
        lead = prov.actions[0].actor
        if self.qtype == "boolean":
            q = render_boolean(cat, lead, prov.actions, prov.polarity == "positive")
            question, answer, choices = q.question, q.answer, None
        else:
            slot = MCQ_ANSWER_SLOT[cat]
            correct = prov.actions[slot]
            context = prov.actions[:slot] + prov.actions[slot + 1:]
            item = render_mcq(cat, lead, context, correct, prov.distractors, self.mcq_seed)
            question, answer, choices = item.question, item.answer, item.choices
        return QAPair(
            self.id, self.dataset, self.video_id, cat.label, cat.complexity, self.qtype,
            question, answer, choices, prov, self.lineage,
        )


@dataclass
class _VideoResult:
    candidates: list[Candidate]
    positive_categories: set[str] = field(default_factory=set)
    negative_shortfall: Counter = field(default_factory=Counter)
    mcq_shortfall: Counter = field(default_factory=Counter)
    uninflected: set[str] = field(default_factory=set)


def _generate(annotation: VideoAnnotation, vocab: ActionVocabulary, config: GenerationConfig) -> _VideoResult:
    tl = build_instance_states(annotation)
    result = _VideoResult([])
    dataset, vid = config.dataset_tag, annotation.video_id
    pair_cache: dict = {}
    for a in tl.actions:
        if not is_verb_led(a.verb_phrase):
            result.uninflected.add(a.verb_phrase)

    for cat in TemporalCategory:
        positives, excluded = classify_tuples(tl, cat, config.theta, config.tau_adj, pair_cache=pair_cache)
        if not positives:
            continue
        result.positive_categories.add(cat.label)
        cat_seed = derive_seed(config.global_seed, vid, cat.label)
        negatives, short = sample_negatives(cat, positives, tl.actions, vocab.actions, len(positives), cat_seed, excluded)
        if short:
            result.negative_shortfall[cat.label] += short

        ordinal = 0

        def emit(qtype, prov, mcq_seed=0):
            nonlocal ordinal
            lineage = (config.global_seed, vid, cat.label, ordinal)
            ordinal += 1
            qid = make_id(dataset, cat.label, qtype, vid, prov, lineage)
            result.candidates.append(Candidate(qid, dataset, vid, cat, qtype, prov, lineage, mcq_seed))

        for tup in positives:
            emit("boolean", Provenance(tup, "positive"))
        for tup in negatives:
            emit("boolean", Provenance(tup, "negative"))

        # one MCQ per distinct context; the other correct answers are kept out of the choices
        slot = MCQ_ANSWER_SLOT[cat]
        by_context: dict[tuple, list[ActionPhrase]] = defaultdict(list)
        for tup in positives:
            by_context[tup[:slot] + tup[slot + 1:]].append(tup[slot])
        for context in sorted(by_context):
            answers = sorted(by_context[context])
            rng = random.Random(derive_seed(cat_seed, "mcq", *map(str, context)))
            correct = rng.choice(answers)
            distractors = sample_distractors(cat, context, answers, excluded, tl.actions, vocab.actions, rng)
            if len(distractors) < 3:
                result.mcq_shortfall[cat.label] += 1
                continue
            for a in distractors:
                if not is_verb_led(a.verb_phrase):
                    result.uninflected.add(a.verb_phrase)
            tup = context[:slot] + (correct,) + context[slot:]
            emit("mcq", Provenance(tup, "positive", tuple(distractors)), rng.getrandbits(63))
    return result


def generate_video_qas(annotation: VideoAnnotation, vocab: ActionVocabulary, config: GenerationConfig) -> list[QAPair]:
    """All candidate QA pairs for one video, rendered, before corpus-level balancing."""
    out, seen = [], set()
    for cand in _generate(annotation, vocab, config).candidates:
        item = cand.render()
        key = (item.category, item.qtype, item.question)
        if key not in seen:
            seen.add(key)
            out.append(item)
    return out


@dataclass(frozen=True)
class Benchmark:
    config: GenerationConfig | None
    items: tuple[QAPair, ...]
    skipped_categories: tuple[tuple[str, str], ...] = ()
    notes: tuple[str, ...] = ()
    # candidate counts per category before balancing: {"yes": n, "no": n, "mcq": n}
    pool_sizes: dict = field(default_factory=dict, compare=False, hash=False)

    def by_category(self) -> dict[str, list[QAPair]]:
        out = defaultdict(list)
        for it in self.items:
            out[it.category].append(it)
        return dict(out)


def balanced_counts(n_yes: int, n_no: int, n_mcq: int, target: int, boolean_fraction: float = 0.5) -> tuple[int, int]:
    """``(boolean, mcq)`` counts to keep for one category.

    Boolean items are split evenly between yes and no, the boolean/MCQ ratio
    follows ``boolean_fraction``, and the total never exceeds ``target``.
    When candidates are short, the category shrinks as a whole so the ratios
    still hold.
    """
    ratio = (1 - boolean_fraction) / boolean_fraction
    bool_cap = min(2 * round(target * boolean_fraction / 2), 2 * min(n_yes, n_no))
    n_bool = bool_cap - bool_cap % 2
    while n_bool > 0:
        n_mcq_needed = round(n_bool * ratio)
        if n_mcq_needed <= n_mcq and n_bool + n_mcq_needed <= target:
            return n_bool, n_mcq_needed
        # shrink to what the MCQ pool supports, keeping the boolean count even
        n_bool = min(n_bool - 2, int(n_mcq / ratio) // 2 * 2)
    return 0, 0


def _select(pool: dict[str, list[Candidate]], n_bool: int, n_mcq: int, rng: random.Random) -> dict[str, list[QAPair]]:
    """Seeded uniform draw without replacement, skipping duplicate question texts."""
    want = {"yes": n_bool // 2, "no": n_bool // 2, "mcq": n_mcq}
    seen = set()
    picked = {}
    for key in ("yes", "no", "mcq"):
        out = []
        for cand in rng.sample(pool[key], len(pool[key])):
            if len(out) == want[key]:
                break
            item = cand.render()
            dedup = (item.video_id, item.qtype, item.question)
            if dedup in seen:
                continue
            seen.add(dedup)
            out.append(item)
        picked[key] = out
    return picked


def _pool_worker(args):
    ann, vocab, config = args
    return _generate(ann, vocab, config)


def build_benchmark(
    corpus: Sequence[VideoAnnotation],
    config: GenerationConfig,
    vocab: ActionVocabulary | None = None,
    workers: int = 1,
) -> Benchmark:
    """Generate, pool and balance QA pairs for a whole corpus.

    The result depends only on the corpus content and ``config``; video order
    and ``workers`` do not matter.
    """
    if not corpus:
        raise EmptyCorpus("corpus contains no videos")
    corpus = sorted(corpus, key=lambda a: a.video_id)
    if vocab is None:
        vocab = load_action_vocabulary(list(corpus), dataset=config.dataset_tag)
    jobs = [(ann, vocab, config) for ann in corpus]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_pool_worker, jobs, chunksize=max(1, len(jobs) // (workers * 4))))
    else:
        results = [_pool_worker(j) for j in jobs]

    pools: dict[str, dict[str, list[Candidate]]] = defaultdict(lambda: {"yes": [], "no": [], "mcq": []})
    positive_cats, uninflected = set(), set()
    neg_short, mcq_short = Counter(), Counter()
    for res in results:
        positive_cats |= res.positive_categories
        uninflected |= res.uninflected
        neg_short.update(res.negative_shortfall)
        mcq_short.update(res.mcq_shortfall)
        for cand in res.candidates:
            pools[cand.category.label][cand.pool].append(cand)

    items, skipped, notes, sizes_out = [], [], [], {}
    target = config.per_category_target
    for cat in TemporalCategory:
        if cat.label not in positive_cats:
            skipped.append((cat.label, "no positive tuples in corpus"))
            continue
        pool = {k: sorted(v, key=lambda c: c.id) for k, v in pools[cat.label].items()}
        sizes = {k: len(v) for k, v in pool.items()}
        sizes_out[cat.label] = sizes
        n_bool, n_mcq = balanced_counts(sizes["yes"], sizes["no"], sizes["mcq"], target, config.boolean_fraction)
        if n_bool + n_mcq == 0:
            skipped.append((cat.label, f"no balanced candidates (yes={sizes['yes']}, no={sizes['no']}, mcq={sizes['mcq']})"))
            continue
        rng = random.Random(derive_seed(config.global_seed, "downsample", cat.label))
        picked = _select(pool, n_bool, n_mcq, rng)
        kept = len(picked["yes"]) + len(picked["no"]) + len(picked["mcq"])
        if (len(picked["yes"]), len(picked["no"]), len(picked["mcq"])) != (n_bool // 2, n_bool // 2, n_mcq):
            # rendered-text collisions shrank a pool; rebalance on what was found
            nb, nm = balanced_counts(len(picked["yes"]), len(picked["no"]), len(picked["mcq"]), target, config.boolean_fraction)
            picked = {"yes": picked["yes"][: nb // 2], "no": picked["no"][: nb // 2], "mcq": picked["mcq"][:nm]}
            kept = nb + nm
        for k in ("yes", "no", "mcq"):
            items += picked[k]
        if kept < target:
            notes.append(f"{cat.label}: shortfall {target - kept} of {target}")
    for label, n in sorted(neg_short.items()):
        notes.append(f"{label}: {n} negative tuple(s) unavailable across videos")
    for label, n in sorted(mcq_short.items()):
        notes.append(f"{label}: {n} multiple-choice context(s) lacked 3 distractors")
    if uninflected:
        notes.append("uninflected phrases: " + ", ".join(sorted(uninflected)))
    items.sort(key=lambda it: it.id)
    return Benchmark(config, tuple(items), tuple(skipped), tuple(notes), sizes_out)


def _dumps(item: QAPair) -> str:
    return json.dumps(item.to_json(), ensure_ascii=False, separators=(", ", ": "))


def write_benchmark(b: Benchmark, sink: IO[bytes]) -> int:
    """Write one JSON record per line, sorted by id; returns the number of lines."""
    count = 0
    try:
        for item in sorted(b.items, key=lambda it: it.id):
            sink.write((_dumps(item) + "\n").encode("utf-8"))
            count += 1
        sink.flush()
    except (OSError, ValueError) as exc:
        raise SinkFailure(str(exc)) from exc
    return count


def _action_from_json(value, line_no) -> ActionPhrase:
    if not (isinstance(value, list) and len(value) == 2 and all(isinstance(v, str) for v in value)):
        raise SchemaViolation(line_no, f"action must be [actor, verb_phrase], got {value!r}")
    try:
        return ActionPhrase(*value)
    except ValueError as exc:
        raise SchemaViolation(line_no, str(exc)) from None


def parse_record(obj: dict, line_no: int = 0) -> QAPair:
    """Validate one decoded benchmark record and turn it into a :class:`QAPair`."""
    if not isinstance(obj, dict):
        raise SchemaViolation(line_no, "record is not an object")
    missing = [k for k in FIELDS if k not in obj]
    if missing:
        raise SchemaViolation(line_no, f"missing field(s) {missing}")
    extra = sorted(set(obj) - set(FIELDS))
    if extra:
        raise SchemaViolation(line_no, f"unknown field(s) {extra}")
    for key in ("id", "dataset", "video_id", "category", "qtype", "question", "answer"):
        if not isinstance(obj[key], str) or not obj[key]:
            raise SchemaViolation(line_no, f"{key} must be a non-empty string")
    try:
        cat = TemporalCategory.from_label(obj["category"])
    except KeyError:
        raise SchemaViolation(line_no, f"unknown category {obj['category']!r}") from None
    if obj["complexity"] != cat.complexity:
        raise SchemaViolation(line_no, f"complexity {obj['complexity']!r} does not match {cat.label}")
    qtype, answer, choices = obj["qtype"], obj["answer"], obj["choices"]
    if qtype == "boolean":
        if choices is not None:
            raise SchemaViolation(line_no, "boolean item must not carry choices")
        if answer not in ("yes", "no"):
            raise SchemaViolation(line_no, f"boolean answer must be yes/no, got {answer!r}")
    elif qtype == "mcq":
        if not (isinstance(choices, list) and len(choices) == 4 and all(isinstance(c, str) and c for c in choices)):
            raise SchemaViolation(line_no, "mcq item needs exactly 4 non-empty choices")
        if len(set(choices)) != 4:
            raise SchemaViolation(line_no, "mcq choices must be distinct")
        if answer not in LETTERS:
            raise SchemaViolation(line_no, f"mcq answer must be one of a-d, got {answer!r}")
        choices = tuple(choices)
    else:
        raise SchemaViolation(line_no, f"unknown qtype {qtype!r}")

    prov = obj["provenance"]
    if not isinstance(prov, dict) or "actions" not in prov or prov.get("polarity") not in ("positive", "negative"):
        raise SchemaViolation(line_no, "provenance needs actions and a positive/negative polarity")
    if not isinstance(prov["actions"], list):
        raise SchemaViolation(line_no, "provenance actions must be a list")
    actions = tuple(_action_from_json(a, line_no) for a in prov["actions"])
    if len(actions) != cat.arity:
        raise SchemaViolation(line_no, f"{cat.label} provenance needs {cat.arity} action(s)")
    distractors = tuple(_action_from_json(a, line_no) for a in prov.get("distractors", []))
    if set(prov) - {"actions", "polarity", "distractors"}:
        raise SchemaViolation(line_no, "unknown provenance keys")

    lineage = obj["seed_lineage"]
    if not (
        isinstance(lineage, list)
        and len(lineage) == 4
        and isinstance(lineage[0], int)
        and isinstance(lineage[1], str)
        and isinstance(lineage[2], str)
        and isinstance(lineage[3], int)
    ):
        raise SchemaViolation(line_no, "seed_lineage must be [global_seed, video_id, category, ordinal]")
    return QAPair(
        obj["id"],
        obj["dataset"],
        obj["video_id"],
        cat.label,
        cat.complexity,
        qtype,
        obj["question"],
        answer,
        choices,
        Provenance(actions, prov["polarity"], distractors),
        tuple(lineage),
    )


def read_benchmark(source: IO[bytes] | IO[str], meta: dict | None = None) -> Benchmark:
    """Read a benchmark file written by :func:`write_benchmark`.

    ``meta`` is the optional sidecar record (see :func:`benchmark_metadata`)
    carrying the config snapshot, skipped categories and notes.
    """
    items = []
    for line_no, raw in enumerate(source, start=1):
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(line_no, f"invalid JSON: {exc.msg}") from None
        items.append(parse_record(obj, line_no))
    config, skipped, notes, pools = None, (), (), {}
    if meta:
        config = GenerationConfig(**meta["config"]) if meta.get("config") else None
        skipped = tuple(tuple(s) for s in meta.get("skipped_categories", ()))
        notes = tuple(meta.get("notes", ()))
        pools = dict(meta.get("pool_sizes", {}))
    return Benchmark(config, tuple(sorted(items, key=lambda it: it.id)), skipped, notes, pools)


def benchmark_metadata(b: Benchmark) -> dict:
    return {
        "config": b.config.to_dict() if b.config else None,
        "skipped_categories": [list(s) for s in b.skipped_categories],
        "notes": list(b.notes),
        "pool_sizes": b.pool_sizes,
    }


def dumps_benchmark(b: Benchmark) -> bytes:
    buf = io.BytesIO()
    write_benchmark(b, buf)
    return buf.getvalue()


@dataclass
class StatsReport:
    categories: dict[str, dict[str, int]]
    position_histogram: list[int]
    skipped_categories: list[tuple[str, str]]
    notes: list[str]
    total: int

    @property
    def mcq_count(self) -> int:
        return sum(self.position_histogram)

    def yes_ratio(self, category: str) -> float | None:
        c = self.categories[category]
        n = c["boolean_yes"] + c["boolean_no"]
        return c["boolean_yes"] / n if n else None

    @property
    def position_deviation(self) -> float:
        """Largest absolute gap between a position's share and 1/4."""
        n = self.mcq_count
        if not n:
            return 0.0
        return max(abs(h / n - 0.25) for h in self.position_histogram)

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "categories": self.categories,
            "yes_ratio": {c: self.yes_ratio(c) for c in self.categories},
            "position_histogram": dict(zip(LETTERS, self.position_histogram)),
            "position_deviation": self.position_deviation,
            "skipped_categories": [list(s) for s in self.skipped_categories],
            "notes": self.notes,
        }

    def render(self) -> str:
        head = f"{'category':<16}{'cx':>3}{'yes':>8}{'no':>8}{'mcq':>8}{'total':>8}"
        lines = [head, "-" * len(head)]
        for cat in TemporalCategory:
            c = self.categories.get(cat.label)
            if c is None:
                continue
            total = c["boolean_yes"] + c["boolean_no"] + c["mcq"]
            lines.append(f"{cat.label:<16}{cat.complexity:>3}{c['boolean_yes']:>8}{c['boolean_no']:>8}{c['mcq']:>8}{total:>8}")
        lines.append("-" * len(head))
        lines.append(f"{'total':<19}{'':>24}{self.total:>8}")
        hist = "  ".join(f"{l}={h}" for l, h in zip(LETTERS, self.position_histogram))
        lines.append(f"mcq answer positions: {hist}  (max deviation {self.position_deviation:.3f})")
        for label, reason in self.skipped_categories:
            lines.append(f"skipped {label}: {reason}")
        lines += self.notes
        return "\n".join(lines)


def benchmark_stats(b: Benchmark) -> StatsReport:
    cats: dict[str, dict[str, int]] = {}
    hist = [0, 0, 0, 0]
    for it in b.items:
        c = cats.setdefault(it.category, {"boolean_yes": 0, "boolean_no": 0, "mcq": 0, "positive": 0, "negative": 0})
        if it.qtype == "mcq":
            c["mcq"] += 1
            hist[LETTERS.index(it.answer)] += 1
        else:
            c["boolean_" + it.answer] += 1
        c[it.provenance.polarity] += 1
    return StatsReport(cats, hist, list(b.skipped_categories), list(b.notes), len(b.items))


def validate_benchmark(b: Benchmark) -> list[str]:
    """Invariant violations in ``b``; an empty list means the benchmark is sound."""
    problems = []
    ids = Counter(it.id for it in b.items)
    problems += [f"duplicate id {i}" for i, n in ids.items() if n > 1]
    keys = Counter((it.video_id, it.category, it.qtype, it.question) for it in b.items)
    problems += [f"duplicate question {k}" for k, n in keys.items() if n > 1]
    stats = benchmark_stats(b)
    target = b.config.per_category_target if b.config else None
    for label, c in stats.categories.items():
        if c["boolean_yes"] != c["boolean_no"]:
            problems.append(f"{label}: {c['boolean_yes']} yes vs {c['boolean_no']} no")
        total = c["boolean_yes"] + c["boolean_no"] + c["mcq"]
        if target is not None and total > target:
            problems.append(f"{label}: {total} items exceed target {target}")
    for it in b.items:
        expected = (it.answer == "yes") if it.qtype == "boolean" else True
        if (it.provenance.polarity == "positive") != expected:
            problems.append(f"{it.id}: polarity {it.provenance.polarity} disagrees with answer {it.answer}")
    return problems
