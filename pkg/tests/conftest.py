import pytest

from factacc.corpus import AnnotatedDocument, KnowledgeBase
from factacc.facts import EntityRef, EntityType, RelationId, Schema


@pytest.fixture
def tiny_schema():
    return Schema([
        RelationId("R0", "no-relation"),
        RelationId("born-in", "born in"),
        RelationId("profession", "profession"),
    ])


@pytest.fixture
def barack_doc():
    """The two-sentence biography with dates, locations, and people."""
    tokens = (
        "Barack was born on August 4 , 1961 in Honolulu . "
        "He married Michelle on October 3 , 1992 in Chicago ."
    ).split()
    mentions = (
        EntityRef("per:barack", "Barack", EntityType.PERSON, (0, 1)),
        EntityRef("date:1961-08-04", "August 4 , 1961", EntityType.DATE, (4, 8)),
        EntityRef("loc:honolulu", "Honolulu", EntityType.LOCATION, (9, 10)),
        EntityRef("per:michelle", "Michelle", EntityType.PERSON, (13, 14)),
        EntityRef("date:1992-10-03", "October 3 , 1992", EntityType.DATE, (15, 19)),
        EntityRef("loc:chicago", "Chicago", EntityType.LOCATION, (20, 21)),
    )
    return AnnotatedDocument(
        doc_id="barack",
        subject=EntityRef("per:barack", "Barack", EntityType.PERSON),
        tokens=tuple(tokens),
        sentence_bounds=((0, 11), (11, 22)),
        mentions=mentions,
    )


@pytest.fixture
def person_city_doc():
    tokens = "Person1 was born in City1 . Person1 also knows City2 .".split()
    mentions = (
        EntityRef("per:p1", "Person1", EntityType.PERSON, (0, 1)),
        EntityRef("loc:c1", "City1", EntityType.LOCATION, (4, 5)),
        EntityRef("per:p1", "Person1", EntityType.PERSON, (6, 7)),
        EntityRef("loc:c2", "City2", EntityType.LOCATION, (9, 10)),
    )
    return AnnotatedDocument(
        doc_id="p1",
        subject=EntityRef("per:p1", "Person1", EntityType.PERSON),
        tokens=tuple(tokens),
        sentence_bounds=((0, 6), (6, 11)),
        mentions=mentions,
    )


@pytest.fixture
def person_city_kb(tiny_schema):
    kb = KnowledgeBase()
    kb.add("per:p1", tiny_schema.get("born-in"), "loc:c1")
    return kb
