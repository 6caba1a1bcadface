"""Deterministic synthetic template corpora with a matching knowledge base.

Articles are short biographies assembled from fixed sentence templates over
small entity pools, so a desk-scale extractor can actually learn them, while
the paired knowledge base makes every article's true fact set known. Used by
the corruption experiment, the training benchmarks, and the example fixtures.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import AnnotatedDocument, KnowledgeBase
from .facts import EntityRef, EntityType, RelationId, Schema

RELATIONS = (
    ("date_of_birth", "date of birth"),
    ("place_of_birth", "place of birth"),
    ("occupation", "occupation"),
    ("spouse", "spouse"),
    ("educated_at", "educated at"),
    ("employer", "employer"),
    ("residence", "residence"),
    ("country_of_citizenship", "country of citizenship"),
    ("member_of", "member of"),
    ("date_of_death", "date of death"),
)

FIRST_NAMES = (
    "Roland", "Marta", "Ivo", "Celia", "Dmitri", "Yuki", "Amara", "Lucas",
    "Nadia", "Oscar", "Petra", "Quentin", "Rosa", "Stefan", "Talia", "Umberto",
    "Vera", "Walter", "Ximena", "Yannick", "Zelda", "Anders", "Bianca", "Casper",
    "Dalia", "Elias", "Fiona", "Gunnar", "Helena", "Ingmar", "Jolanda", "Kerstin",
    "Leopold", "Miriam", "Nestor", "Odile", "Pavel", "Ramona", "Sigrid", "Tobias",
)
LAST_NAMES = (
    "Vance", "Kline", "Okafor", "Strand", "Morell", "Takeda", "Bexley", "Crane",
    "Dvorak", "Eriksen", "Falk", "Giraud", "Hewitt", "Iversen", "Jansen", "Kovacs",
    "Lindqvist", "Moravec", "Norgaard", "Ostrom", "Pires", "Quist", "Rask", "Soler",
    "Tamm", "Ulvaeus", "Vidal", "Wexler", "Ybarra", "Zettel", "Abramov", "Brandt",
    "Calloway", "Dunmore", "Ekholm", "Fontaine", "Grieg", "Halvorsen", "Ibsen", "Juhl",
)
CITIES = (
    "Oslo", "Lagos", "Quito", "Pune", "Tartu", "Leipzig", "Maribor", "Cusco",
    "Bergen", "Dakar", "Ghent", "Hobart", "Izmir", "Jaipur", "Kaunas", "Lille",
    "Malmo", "Nantes", "Odense", "Porto", "Quebec", "Riga", "Seville", "Tromso",
    "Utrecht", "Verona", "Windhoek", "Xalapa", "Yerevan", "Zagreb", "Arhus", "Brno",
)
COUNTRIES = (
    "Norway", "Chile", "Estonia", "Senegal", "Belgium", "Austria", "Peru",
    "Latvia", "Portugal", "Slovenia", "Denmark", "Morocco", "Uruguay", "Finland",
    "Georgia", "Iceland", "Jordan", "Kenya", "Laos", "Malta",
)
OCCUPATIONS = (
    "painter", "architect", "botanist", "cartographer", "engineer", "historian",
    "journalist", "composer", "sculptor", "linguist", "astronomer", "chemist",
    "geologist", "novelist", "photographer", "violinist", "economist", "surgeon",
)
ORG_HEADS = (
    "Harwick", "Granite", "Argyle", "Beacon", "Corvid", "Drummond", "Elmwood",
    "Foxglove", "Gilder", "Hollis", "Ironwood", "Juniper", "Kestrel", "Larkspur",
)
ORG_TAILS = ("University", "Institute", "College", "Works", "Society", "Foundry", "Atelier")
MONTHS = (
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
)
DISTRACTORS = (
    "The archive from that period is remarkably complete .",
    "Several letters from those years were later published .",
    "Little else is recorded about that decade .",
    "The estate passed through many hands afterwards .",
    "Contemporary accounts disagree on minor details .",
    "Much of the correspondence survives only in fragments .",
    "The family papers were donated to a public collection .",
    "A commemorative plaque was unveiled many years later .",
)


def schema() -> Schema:
    rels = [RelationId("R0", "no-relation")]
    rels.extend(RelationId(rid, label) for rid, label in RELATIONS)
    return Schema(rels)


@dataclass
class _Draft:
    """Token stream under construction, with mention tracking."""

    tokens: list[str]
    bounds: list[tuple[int, int]]
    mentions: list[EntityRef]

    def sentence(self, parts: list[str | tuple[str, str, EntityType]]) -> None:
        """Append one sentence. Plain strings contribute literal tokens; a
        (surface, canonical_id, type) triple also records a mention."""
        start = len(self.tokens)
        for part in parts:
            if isinstance(part, str):
                self.tokens.extend(part.split(" "))
            else:
                surface, canonical_id, etype = part
                words = surface.split(" ")
                span = (len(self.tokens), len(self.tokens) + len(words))
                self.tokens.extend(words)
                self.mentions.append(EntityRef(canonical_id, surface, etype, span))
        self.bounds.append((start, len(self.tokens)))


def _date(rng: random.Random, used: set[tuple[str, int]], lo: int, hi: int) -> tuple[str, str]:
    while True:
        month, day = rng.choice(MONTHS), rng.randint(1, 28)
        if (month, day) not in used:
            used.add((month, day))
            break
    year = rng.randint(lo, hi)
    surface = f"{month} {day} , {year}"
    return surface, f"date:{year}-{month}-{day}"


def make_corpus(
    n_articles: int,
    seed: int = 0,
    distractor_rate: float = 0.0,
    subject_style: str = "name",
    optional_fact_prob: float = 0.55,
) -> tuple[list[AnnotatedDocument], KnowledgeBase, Schema]:
    """Build ``n_articles`` template biographies plus their knowledge base.

    ``subject_style`` controls how often the subject is named in the text:
    "name" repeats the full name in every fact sentence (every fact is then
    visible to sentence-level classifiers), "pronoun" names the subject only
    in the opening and closing sentences, which keeps entity-surface counts
    balanced for corruption experiments. ``distractor_rate`` appends that
    fraction of mention-free filler sentences.
    """
    if subject_style not in ("name", "pronoun"):
        raise ValueError(f"unknown subject_style {subject_style!r}")
    sch = schema()
    rel = {rid: sch.get(rid) for rid, _ in RELATIONS}
    rng = random.Random(seed)
    kb = KnowledgeBase()
    docs: list[AnnotatedDocument] = []

    for i in range(n_articles):
        first, last = rng.choice(FIRST_NAMES), rng.choice(LAST_NAMES)
        name = f"{first} {last}"
        # ids carry the article index: same-name subjects of different
        # articles must not share knowledge-base entries
        subject_id = f"per:{first}_{last}_{i}".lower()
        pronoun = rng.choice(("He", "She"))
        used_dates: set[tuple[str, int]] = set()
        cities = rng.sample(CITIES, 4)
        subject = EntityRef(subject_id, name, EntityType.PERSON)

        def subj_part(position: str) -> list:
            if subject_style == "name" or position in ("open", "close"):
                return [(name, subject_id, EntityType.PERSON)]
            return [pronoun]

        draft = _Draft([], [], [])
        facts: list[tuple[RelationId, str]] = []
        insert_prob = min(1.0, distractor_rate / (1.0 - distractor_rate)) if distractor_rate < 1 else 1.0

        def maybe_distract() -> None:
            if distractor_rate > 0 and rng.random() < insert_prob:
                draft.sentence([rng.choice(DISTRACTORS)])

        birth_date, birth_date_id = _date(rng, used_dates, 1880, 1990)
        birth_city = cities[0]
        draft.sentence(subj_part("open") + [
            "was born on", (birth_date, birth_date_id, EntityType.DATE),
            "in", (birth_city, f"loc:{birth_city}".lower(), EntityType.LOCATION), ".",
        ])
        facts.append((rel["date_of_birth"], birth_date_id))
        facts.append((rel["place_of_birth"], f"loc:{birth_city}".lower()))

        maybe_distract()
        occupation = rng.choice(OCCUPATIONS)
        draft.sentence(subj_part("mid") + [
            "worked as a", (occupation, f"occ:{occupation}", EntityType.OTHER), ".",
        ])
        facts.append((rel["occupation"], f"occ:{occupation}"))

        if rng.random() < optional_fact_prob:
            maybe_distract()
            while True:
                s_first, s_last = rng.choice(FIRST_NAMES), rng.choice(LAST_NAMES)
                if (s_first, s_last) != (first, last):
                    break
            spouse = f"{s_first} {s_last}"
            spouse_id = f"per:{s_first}_{s_last}".lower()
            wed_date, wed_date_id = _date(rng, used_dates, 1900, 2010)
            draft.sentence(subj_part("mid") + [
                "married", (spouse, spouse_id, EntityType.PERSON),
                "on", (wed_date, wed_date_id, EntityType.DATE), ".",
            ])
            facts.append((rel["spouse"], spouse_id))

        if rng.random() < optional_fact_prob:
            maybe_distract()
            org = f"{rng.choice(ORG_HEADS)} {rng.choice(('University', 'Institute', 'College'))}"
            draft.sentence(subj_part("mid") + [
                "studied at", (org, f"org:{org}".lower().replace(" ", "_"), EntityType.OTHER), ".",
            ])
            facts.append((rel["educated_at"], f"org:{org}".lower().replace(" ", "_")))

        if rng.random() < optional_fact_prob:
            maybe_distract()
            org = f"{rng.choice(ORG_HEADS)} {rng.choice(('Works', 'Foundry', 'Atelier'))}"
            draft.sentence(subj_part("mid") + [
                "was employed by", (org, f"org:{org}".lower().replace(" ", "_"), EntityType.OTHER), ".",
            ])
            facts.append((rel["employer"], f"org:{org}".lower().replace(" ", "_")))

        if rng.random() < optional_fact_prob:
            maybe_distract()
            home = cities[1]
            draft.sentence(subj_part("mid") + [
                "lived in", (home, f"loc:{home}".lower(), EntityType.LOCATION), ".",
            ])
            facts.append((rel["residence"], f"loc:{home}".lower()))

        if rng.random() < optional_fact_prob:
            maybe_distract()
            country = rng.choice(COUNTRIES)
            draft.sentence(subj_part("mid") + [
                "was a citizen of", (country, f"loc:{country}".lower(), EntityType.LOCATION), ".",
            ])
            facts.append((rel["country_of_citizenship"], f"loc:{country}".lower()))

        if rng.random() < optional_fact_prob:
            maybe_distract()
            org = f"{rng.choice(ORG_HEADS)} Society"
            draft.sentence(subj_part("mid") + [
                "joined the", (org, f"org:{org}".lower().replace(" ", "_"), EntityType.OTHER), ".",
            ])
            facts.append((rel["member_of"], f"org:{org}".lower().replace(" ", "_")))

        if rng.random() < optional_fact_prob:
            maybe_distract()
            death_date, death_date_id = _date(rng, used_dates, 1950, 2040)
            death_city = cities[2]
            draft.sentence(subj_part("mid") + [
                "died on", (death_date, death_date_id, EntityType.DATE),
                "in", (death_city, f"loc:{death_city}".lower(), EntityType.LOCATION), ".",
            ])
            facts.append((rel["date_of_death"], death_date_id))

        # a mentioned entity with no supporting fact: a natural negative pair
        maybe_distract()
        visited = cities[3]
        draft.sentence(subj_part("close") + [
            "later visited", (visited, f"loc:{visited}".lower(), EntityType.LOCATION), ".",
        ])

        for relation, object_id in facts:
            kb.add(subject_id, relation, object_id)

        docs.append(AnnotatedDocument(
            doc_id=f"synth-{i:05d}",
            subject=subject,
            tokens=tuple(draft.tokens),
            sentence_bounds=tuple(draft.bounds),
            mentions=tuple(draft.mentions),
        ))

    return docs, kb, sch
