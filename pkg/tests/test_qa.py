from __future__ import annotations

import pytest

from pdfqa.chunking import Chunk
from pdfqa.embedding import MockEmbedder
from pdfqa.errors import AnswerError, PromptError
from pdfqa.llm import (
    CitingLlm,
    EchoTopChunkLlm,
    FirstSentenceAnswerLlm,
    QuestionGenLlm,
)
from pdfqa.prompts import (
    ANSWER_GEN_TEMPLATE,
    CANONICAL_INSTRUCTION,
    CHUNK_HEADER_FORMAT,
    EMPTY_CONTEXT,
    QA_PROMPT_TEMPLATE,
    QUESTION_GEN_TEMPLATE,
    fill_template,
    validate_template,
)
from pdfqa.qa import (
    AssetCatalog,
    QAResult,
    Query,
    answer,
    build_prompt,
    recover_media,
    retrieve,
)
from pdfqa.store import VectorStore


def chunk(i: int, text: str, doc: str = "doc") -> Chunk:
    return Chunk(chunk_id=f"{doc}#c{i:05d}", doc_id=doc, text=text, char_span=None)


def small_index(texts: list[str], dim: int = 64) -> tuple[VectorStore, MockEmbedder]:
    emb = MockEmbedder(dim=dim)
    store = VectorStore()
    for i, text in enumerate(texts):
        store.add(chunk(i, text), emb.embed(text))
    return store, emb


class BoomLlm:
    def complete(self, prompt: str, max_tokens: int = 512) -> str:
        raise RuntimeError("boom")


# --- prompt templates -------------------------------------------------


def test_templates_share_one_instruction():
    assert ANSWER_GEN_TEMPLATE == QA_PROMPT_TEMPLATE
    assert QA_PROMPT_TEMPLATE.startswith(CANONICAL_INSTRUCTION)
    validate_template(QA_PROMPT_TEMPLATE)
    validate_template(QUESTION_GEN_TEMPLATE, slots=("num_questions", "context"))


def test_validate_template_counts_slots():
    with pytest.raises(PromptError, match="found 0"):
        validate_template("no slots at all")
    with pytest.raises(PromptError, match="found 2"):
        validate_template("{context} {context} {question}")


def test_fill_template_basic():
    out = fill_template("Q: {question}\nC: {context}", question="why", context="because")
    assert out == "Q: why\nC: because"


def test_fill_template_missing_value():
    with pytest.raises(PromptError, match="question"):
        fill_template("{question}")


def test_fill_template_does_not_rescan_values():
    # braces inside substituted text must come through untouched
    tricky = '[table_1] {"columns":["{question}"],"rows":[]}'
    out = fill_template(
        QA_PROMPT_TEMPLATE, context=tricky, question="what is in the table?"
    )
    assert tricky in out
    assert out.count("what is in the table?") == 1


def test_query_trims_and_validates():
    q = Query(text="  what now?  ")
    assert q.text == "what now?"
    assert q.k == 10
    with pytest.raises(ValueError):
        Query(text="   ")
    with pytest.raises(ValueError):
        Query(text="x", k=0)


def test_build_prompt_layout():
    chunks = [chunk(0, "first body"), chunk(1, "second body")]
    prompt = build_prompt("what?", chunks)
    header1 = CHUNK_HEADER_FORMAT.format(rank=1)
    header2 = CHUNK_HEADER_FORMAT.format(rank=2)
    assert f"Context:\n{header1}\nfirst body\n{header2}\nsecond body\n\nQuestion: what?" in prompt
    assert prompt.endswith("\n\nAnswer:")
    assert prompt.startswith(CANONICAL_INSTRUCTION)


def test_build_prompt_empty_context():
    prompt = build_prompt("anything?", [])
    assert EMPTY_CONTEXT in prompt


def test_build_prompt_validates_custom_template():
    with pytest.raises(PromptError):
        build_prompt("q", [], template="only {context} here")


# --- offline llms -----------------------------------------------------


def test_echo_llm_returns_rank1_only():
    chunks = [chunk(0, "alpha text"), chunk(1, "beta text")]
    prompt = build_prompt("q?", chunks)
    out = EchoTopChunkLlm().complete(prompt)
    assert out == "alpha text"


def test_echo_llm_single_chunk_prompt():
    prompt = build_prompt("q?", [chunk(0, "only line one\nonly line two")])
    assert EchoTopChunkLlm().complete(prompt) == "only line one\nonly line two"


def test_echo_llm_without_context():
    out = EchoTopChunkLlm().complete("Question: hi\n\nAnswer:")
    assert out == "No context was retrieved for this question."


def test_citing_llm_cites_rank1_media():
    text = (
        "intro line\n"
        "![image_4](image_4.png)\n"
        "Caption [image_4.png]: a cutaway diagram.\n"
        '[table_2] {"columns":["a"],"rows":[["1"]]}\n'
        "closing line"
    )
    prompt = build_prompt("q?", [chunk(0, text), chunk(1, "[image_9.png] elsewhere")])
    out = CitingLlm().complete(prompt)
    lines = out.split("\n")
    assert lines[0] == "Based on the retrieved context:"
    assert lines[1] == "[image_4.png]"
    assert lines[2] == '[table_2] {"columns":["a"],"rows":[["1"]]}'
    assert len(lines) == 3  # nothing cited from rank 2


def test_citing_llm_without_media():
    prompt = build_prompt("q?", [chunk(0, "plain prose only")])
    assert "cites no figures or tables" in CitingLlm().complete(prompt)


def test_question_gen_llm_count_and_shape():
    prompt = fill_template(
        QUESTION_GEN_TEMPLATE,
        num_questions="4",
        context="the reactor manifold needs inspection before startup",
    )
    out = QuestionGenLlm().complete(prompt)
    lines = out.splitlines()
    assert len(lines) == 4
    assert all(line.endswith("?") for line in lines)


def test_first_sentence_answer_llm():
    prompt = build_prompt("q?", [chunk(0, "The fix works. More detail follows.")])
    out = FirstSentenceAnswerLlm().complete(prompt)
    assert out.endswith(".")
    assert "fix works" in out


# --- retrieval --------------------------------------------------------


def test_retrieve_returns_scored_chunks():
    store, emb = small_index(["turbine blade wear", "coolant loop pressure", "spare parts list"])
    hits = retrieve(Query(text="coolant loop pressure", k=2), store, emb)
    assert len(hits) == 2
    assert hits[0][0].text == "coolant loop pressure"
    assert hits[0][1] > hits[1][1]


# --- asset catalog and media recovery ---------------------------------


@pytest.fixture
def asset_root(tmp_path):
    for doc, images in (("doca", ("image_1", "image_2")), ("docb", ("image_1",))):
        d = tmp_path / doc / "images"
        d.mkdir(parents=True)
        for name in images:
            (d / f"{name}.png").write_bytes(f"{doc}/{name}".encode())
    return tmp_path


def test_catalog_indexes_per_document(asset_root):
    catalog = AssetCatalog(asset_root)
    assert len(catalog) == 3
    assert catalog.resolve_image("image_2.png").name == "image_2.png"
    assert catalog.resolve_image("image_9.png") is None


def test_catalog_prefers_retrieved_docs(asset_root):
    catalog = AssetCatalog(asset_root)
    assert "docb" in str(catalog.resolve_image("image_1.png", preferred_docs=("docb",)))
    assert "doca" in str(catalog.resolve_image("image_1.png", preferred_docs=("missing",)))
    # ties outside the preference fall to the lowest doc id
    assert "doca" in str(catalog.resolve_image("image_1.png"))


def test_recover_media_resolves_images(asset_root):
    catalog = AssetCatalog(asset_root)
    text, images, tables = recover_media(
        "See [image_1.png] and again [image_1.png].", catalog, preferred_docs=("docb",)
    )
    assert len(images) == 1
    image_id, path = images[0]
    assert image_id == "image_1.png"
    assert text == f"See ![image_1]({path}) and again ![image_1]({path})."
    assert tables == []


def test_recover_media_leaves_unresolved_refs(asset_root, caplog):
    catalog = AssetCatalog(asset_root)
    with caplog.at_level("WARNING", logger="pdfqa.qa"):
        text, images, _ = recover_media("Missing [image_7.png] here.", catalog)
    assert text == "Missing [image_7.png] here."
    assert images == []
    assert "unresolved image reference" in caplog.text


def test_recover_media_without_catalog(caplog):
    with caplog.at_level("WARNING", logger="pdfqa.qa"):
        text, images, _ = recover_media("Cite [image_1.png].")
    assert text == "Cite [image_1.png]."
    assert images == []


def test_recover_media_expands_tables():
    line = '[table_3] {"columns":["part","qty"],"rows":[["bolt","4"]]}'
    text, _, tables = recover_media(f"Per the data:\n{line}\ndone.")
    assert tables == ["table_3"]
    assert "| part | qty |" in text
    assert "| bolt | 4 |" in text
    assert line not in text


def test_recover_media_keeps_malformed_table_lines(caplog):
    bad = "[table_3] {not json}"
    with caplog.at_level("WARNING", logger="pdfqa.qa"):
        text, _, tables = recover_media(bad)
    assert text == bad
    assert tables == []
    assert "left as-is" in caplog.text


def test_recover_media_is_idempotent(asset_root):
    catalog = AssetCatalog(asset_root)
    raw = (
        "Answer with [image_2.png] and\n"
        '[table_1] {"columns":["a"],"rows":[["1"]]}\n'
        "and [image_7.png] unresolved."
    )
    once, img1, tab1 = recover_media(raw, catalog)
    twice, img2, tab2 = recover_media(once, catalog)
    assert twice == once
    assert img2 == []
    # the already-expanded table parses as markdown, not a record line
    assert tab2 == []


# --- end to end answer() ----------------------------------------------


def test_answer_full_path(asset_root):
    target = "The assembly is shown in [image_1.png]."
    store, emb = small_index([target, "unrelated filler text", "more filler"])
    result = answer(
        Query(text=target, k=2),
        store,
        emb,
        EchoTopChunkLlm(),
        catalog=AssetCatalog(asset_root),
    )
    assert isinstance(result, QAResult)
    assert result.raw_answer == target
    assert result.answer_text.startswith("The assembly is shown in ![image_1](")
    assert result.resolved_images[0][0] == "image_1.png"
    assert len(result.retrieved) == 2
    assert result.retrieved[0][0] == "doc#c00000"
    assert result.retrieved[0][1] == pytest.approx(1.0)


def test_answer_prefers_retrieved_documents(asset_root):
    # the hit comes from docb, so image_1.png resolves to docb's file
    emb = MockEmbedder(dim=64)
    store = VectorStore()
    store.add(chunk(0, "refer to [image_1.png] for the housing", doc="docb"), emb.embed("refer to [image_1.png] for the housing"))
    store.add(chunk(0, "unrelated words entirely", doc="doca"), emb.embed("unrelated words entirely"))
    result = answer(
        Query(text="refer to the housing image", k=1),
        store,
        emb,
        EchoTopChunkLlm(),
        catalog=AssetCatalog(asset_root),
    )
    assert "docb" in result.resolved_images[0][1]


def test_answer_wraps_llm_failures():
    store, emb = small_index(["alpha", "beta"])
    with pytest.raises(AnswerError, match="LLM call failed") as err:
        answer(Query(text="alpha"), store, emb, BoomLlm())
    assert len(err.value.retrieved) == 2
    assert all(isinstance(cid, str) for cid, _ in err.value.retrieved)


def test_qa_result_to_dict_round_trips_json():
    import json

    result = QAResult(
        answer_text="a",
        raw_answer="b",
        retrieved=[("c1", 0.5)],
        resolved_images=[("image_1.png", "/x/image_1.png")],
        resolved_tables=["table_1"],
    )
    blob = json.dumps(result.to_dict())
    assert json.loads(blob)["retrieved"] == [["c1", 0.5]]
