from __future__ import annotations

import json
import random

import numpy as np
import pytest

from oracles import topk_oracle
from pdfqa.chunking import Chunk
from pdfqa.embedding import MockEmbedder
from pdfqa.errors import DimensionMismatchError, EmptyIndexError, StoreError
from pdfqa.store import VectorStore


def make_chunk(i: int, doc: str = "doc", level: int = 0) -> Chunk:
    text = f"chunk body {i} of {doc}"
    start = i * 100
    return Chunk(
        chunk_id=f"{doc}#c{i:05d}",
        doc_id=doc,
        text=text,
        char_span=(start, start + len(text)) if level == 0 else None,
        level=level,
    )


def filled_store(rng: random.Random, n: int, dim: int = 16) -> VectorStore:
    store = VectorStore()
    for i in range(n):
        vec = np.array([rng.gauss(0, 1) for _ in range(dim)])
        store.add(make_chunk(i), vec)
    return store


def test_add_and_get():
    store = VectorStore()
    chunk = make_chunk(0)
    store.add(chunk, np.ones(8))
    assert len(store) == 1
    assert chunk.chunk_id in store
    assert store.get(chunk.chunk_id) is chunk
    assert store.dim == 8
    with pytest.raises(StoreError, match="unknown chunk_id"):
        store.get("missing")


def test_duplicate_ids_rejected():
    store = VectorStore()
    store.add(make_chunk(1), np.ones(4))
    with pytest.raises(StoreError, match="duplicate chunk_id"):
        store.add(make_chunk(1), np.ones(4))


def test_dimension_fixed_by_first_insert():
    store = VectorStore()
    store.add(make_chunk(0), np.ones(4))
    with pytest.raises(DimensionMismatchError):
        store.add(make_chunk(1), np.ones(5))
    explicit = VectorStore(dim=3)
    with pytest.raises(DimensionMismatchError):
        explicit.add(make_chunk(0), np.ones(4))


def test_search_empty_and_bad_k():
    store = VectorStore()
    with pytest.raises(EmptyIndexError, match="index empty"):
        store.search(np.ones(4), k=1)
    store.add(make_chunk(0), np.ones(4))
    with pytest.raises(ValueError, match="k must be"):
        store.search(np.ones(4), k=0)


def test_self_query_ranks_first_with_unit_score():
    emb = MockEmbedder(dim=64)
    store = VectorStore()
    texts = ["turbine assembly", "coolant flow rate", "sensor drift report"]
    for i, text in enumerate(texts):
        store.add(
            Chunk(chunk_id=f"d#c{i:05d}", doc_id="d", text=text, char_span=None),
            emb.embed(text),
        )
    for i, text in enumerate(texts):
        hits = store.search(emb.embed(text), k=1)
        assert hits[0][0].chunk_id == f"d#c{i:05d}"
        assert abs(hits[0][1] - 1.0) < 1e-9


def test_search_matches_full_sort_oracle():
    rng = random.Random(606)
    for trial in range(30):
        n = rng.randint(1, 60)
        store = filled_store(rng, n, dim=12)
        query = np.array([rng.gauss(0, 1) for _ in range(12)])
        k = rng.randint(1, n + 3)

        entries = [
            (c.chunk_id, vec.tolist())
            for c, vec, _ in store._entries.values()
        ]
        want = topk_oracle(entries, query.tolist(), k)
        got = store.search(query, k=k)
        assert [c.chunk_id for c, _ in got] == [cid for cid, _ in want], f"trial {trial}"
        for (_, score), (_, ref) in zip(got, want):
            assert abs(score - ref) < 1e-9


def test_ties_break_on_chunk_id():
    store = VectorStore()
    vec = np.array([1.0, 0.0])
    for cid in ("d#c00002", "d#c00000", "d#c00001"):
        store.add(Chunk(chunk_id=cid, doc_id="d", text="same", char_span=None), vec)
    hits = store.search(np.array([2.0, 0.0]), k=3)
    assert [c.chunk_id for c, _ in hits] == ["d#c00000", "d#c00001", "d#c00002"]


def test_topk_is_a_prefix_of_topn():
    rng = random.Random(77)
    store = filled_store(rng, 40)
    query = np.array([rng.gauss(0, 1) for _ in range(16)])
    full = store.search(query, k=40)
    for k in (1, 3, 10, 39):
        assert store.search(query, k=k) == full[:k]


def test_k_larger_than_store_returns_everything():
    rng = random.Random(12)
    store = filled_store(rng, 5)
    assert len(store.search(np.ones(16), k=50)) == 5


def test_delete_doc():
    store = VectorStore()
    for i in range(3):
        store.add(make_chunk(i, doc="a"), np.ones(4) + i)
    for i in range(2):
        store.add(make_chunk(i, doc="b"), np.ones(4) - 0.5 * i)
    assert store.doc_ids() == {"a", "b"}
    assert store.delete_doc("a") == 3
    assert store.doc_ids() == {"b"}
    assert len(store) == 2
    assert store.delete_doc("a") == 0


def test_save_load_round_trip(tmp_path):
    rng = random.Random(2)
    store = filled_store(rng, 25)
    store.add(
        Chunk(chunk_id="doc#s1-000", doc_id="doc", text="a summary", char_span=None, level=1),
        np.array([rng.gauss(0, 1) for _ in range(16)]),
    )
    path = tmp_path / "store.jsonl"
    store.save(path)

    loaded = VectorStore.load(path)
    assert len(loaded) == len(store)
    assert loaded.dim == store.dim
    for cid, (chunk, vec, _) in store._entries.items():
        other = loaded.get(cid)
        assert (other.text, other.doc_id, other.level, other.char_span) == (
            chunk.text, chunk.doc_id, chunk.level, chunk.char_span,
        )
    # identical queries rank identically
    query = np.array([rng.gauss(0, 1) for _ in range(16)])
    assert [c.chunk_id for c, _ in loaded.search(query, k=10)] == [
        c.chunk_id for c, _ in store.search(query, k=10)
    ]


def test_export_is_canonical(tmp_path):
    rng = random.Random(3)
    store = filled_store(rng, 8)
    p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    store.save(p1)
    VectorStore.load(p1).save(p2)
    assert p1.read_bytes() == p2.read_bytes()

    lines = p1.read_text(encoding="utf-8").splitlines()
    assert lines == sorted(lines)  # sorted by chunk_id, and ids prefix the lines
    row = json.loads(lines[0])
    assert list(row) == ["chunk_id", "doc_id", "level", "char_span", "text", "vector"]


def test_empty_store_saves_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    VectorStore().save(path)
    assert path.read_text(encoding="utf-8") == ""
    loaded = VectorStore.load(path)
    assert len(loaded) == 0


def test_load_missing_file(tmp_path):
    with pytest.raises(StoreError, match="no index at"):
        VectorStore.load(tmp_path / "absent.jsonl")


def test_load_corrupt_line_reports_line_number(tmp_path):
    store = VectorStore()
    store.add(make_chunk(0), np.ones(4))
    path = tmp_path / "store.jsonl"
    store.save(path)
    good = path.read_text(encoding="utf-8")

    path.write_text(good + "{broken\n", encoding="utf-8")
    with pytest.raises(StoreError, match="corrupt index line 2"):
        VectorStore.load(path)

    missing_field = json.dumps({"chunk_id": "x", "doc_id": "d"})
    path.write_text(good + missing_field + "\n", encoding="utf-8")
    with pytest.raises(StoreError, match="corrupt index line 2"):
        VectorStore.load(path)

    # a second line with a different vector width is corrupt, not fatal-free
    row = json.loads(good)
    row["chunk_id"] = "doc#c99999"
    row["vector"] = [1.0, 2.0]
    path.write_text(good + json.dumps(row) + "\n", encoding="utf-8")
    with pytest.raises(StoreError, match="corrupt index line 2"):
        VectorStore.load(path)


def test_concurrent_adds_are_serialized():
    import threading

    store = VectorStore()
    errors: list[Exception] = []

    def worker(base: int) -> None:
        try:
            for i in range(50):
                store.add(make_chunk(base * 100 + i, doc=f"d{base}"), np.ones(4) * (i + 1))
        except Exception as exc:  # pragma: no cover - only on failure
            errors.append(exc)

    threads = [threading.Thread(target=worker, args=(b,)) for b in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    assert len(store) == 200
