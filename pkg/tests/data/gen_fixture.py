"""Regenerates reviews_fixture.jsonl (20 synthetic reviews).

Every extraction and filtering rule is exercised by at least one review:
the Main-Results cut and its fallback, each summary heading substring,
each long-form keyword with the two-sentence window, the single-paragraph
rule, both ratio bounds (including exact boundaries), and the token cap.
Run from the repository root:  python3 tests/data/gen_fixture.py
"""

import json
from pathlib import Path

from plainscore.textstats import tokenize_words

OUT = Path(__file__).parent / "reviews_fixture.jsonl"

FIVE = "Results improved in most people."  # 5 word tokens
FOUR = "The trial showed benefit."  # 4 word tokens


def sentence_block(sentence, count):
    return " ".join([sentence] * count)


def sec(heading, text):
    return {"heading": heading, "text": text}


def review(rid, abstract, pls_kind, pls):
    return {"id": rid, "abstract": abstract, "pls_kind": pls_kind, "pls": pls}


def build_reviews():
    reviews = []

    # r01: standard abstract format, summary cut at "Study characteristics"
    reviews.append(
        review(
            "r01",
            [
                sec("Background", "Chronic disease burden keeps growing worldwide."),
                sec("Objectives", "To assess the intervention against usual care."),
                sec("Search Methods", "We searched registries and databases."),
                sec(
                    "Main Results",
                    "We included 12 trials with 3400 participants. "
                    "The intervention reduced admissions. "
                    + sentence_block(FIVE, 6),
                ),
                sec("Authors' Conclusions", "Moderate-certainty evidence supports use."),
            ],
            "sectioned",
            [
                sec("Review question", "Does the intervention help adults?"),
                sec("Study characteristics", "Seven studies with 900 adults were found. " + FIVE),
                sec("Key results", "Admissions fell. Side effects were mild."),
            ],
        )
    )

    # r02: single Main Results section; "evidence" matches the first heading
    reviews.append(
        review(
            "r02",
            [sec("Main Results", "Three trials reported outcomes. " + sentence_block(FOUR, 3))],
            "sectioned",
            [sec("What evidence did we find?", "We found three small trials. They were short.")],
        )
    )

    # r03: no Main Results heading and no summary substring -> both flagged
    reviews.append(
        review(
            "r03",
            [
                sec("Background", "An uncommon condition with sparse data."),
                sec("Results Summary", "Two cohorts suggested modest gains. " + FIVE),
            ],
            "sectioned",
            [
                sec("Background", "Little is known about treatment."),
                sec("Conclusions", "More research is needed soon."),
            ],
        )
    )

    # r04: long-form, keyword in second paragraph's first sentence
    reviews.append(
        review(
            "r04",
            [sec("Main Results", "Seven trials enrolled 1839 participants. " + sentence_block(FOUR, 4))],
            "longform",
            [
                "This condition affects many newborns each year.",
                "We found seven studies involving 1839 participants. They compared home care with hospital care.",
                "More milk led to faster weight gain overall.",
            ],
        )
    )

    # r05: one-paragraph long-form summary kept whole despite no keyword
    reviews.append(
        review(
            "r05",
            [sec("Main Results", "One trial reported partial outcomes. " + FOUR)],
            "longform",
            ["Treatment may help but the result is very uncertain."],
        )
    )

    # r06: keyword appears only in the third sentence -> flagged, kept whole
    reviews.append(
        review(
            "r06",
            [sec("Main Results", "Analysis pooled two small trials. " + sentence_block(FOUR, 3))],
            "longform",
            [
                "Care differs widely. Guidance is inconsistent. The trial evidence is thin.",
                "Outcomes were measured at one year.",
            ],
        )
    )

    # r07: ratio below 0.2 -> ratio_low (abstract 100 tokens, summary 10)
    reviews.append(
        review(
            "r07",
            [sec("Main Results", sentence_block(FIVE, 20))],
            "sectioned",
            [sec("Key results", sentence_block(FIVE, 2))],
        )
    )

    # r08: ratio above 1.3 -> ratio_high (abstract 20 tokens, summary 40)
    reviews.append(
        review(
            "r08",
            [sec("Main Results", sentence_block(FIVE, 4))],
            "longform",
            ["We found one study today. " + sentence_block(FIVE, 7)],
        )
    )

    # r09: abstract beyond the 1024-token cap -> too_long
    reviews.append(
        review(
            "r09",
            [sec("Main Results", sentence_block(FOUR, 257))],
            "sectioned",
            [sec("Key results", sentence_block(FIVE, 160))],
        )
    )

    # r10: summary beyond the cap -> too_long
    reviews.append(
        review(
            "r10",
            [sec("Main Results", sentence_block(FIVE, 210))],
            "longform",
            ["We found one large study. " + sentence_block(FIVE, 210)],
        )
    )

    # r11..r14: remaining heading substrings
    reviews.append(
        review(
            "r11",
            [sec("Main Results", "Five trials reported falls. " + FOUR)],
            "sectioned",
            [
                sec("Background", "Falls are common in older adults."),
                sec("What did we find?", "Exercise reduced falls. Walking improved."),
            ],
        )
    )
    reviews.append(
        review(
            "r12",
            [sec("Main Results", "Four trials assessed pain relief. " + FOUR)],
            "sectioned",
            [
                sec("Search date", "The evidence is current to June 2019."),
                sec("Key findings", "Pain scores dropped by two points."),
            ],
        )
    )
    reviews.append(
        review(
            "r13",
            [sec("Main Results", "Six trials compared both doses. " + sentence_block(FOUR, 2))],
            "sectioned",
            [
                sec("Background", "Dosing practice varies a lot."),
                sec("Quality of the evidence", "Certainty was low to moderate overall."),
                sec("Conclusions", "Higher doses may help some adults."),
            ],
        )
    )
    reviews.append(
        review(
            "r14",
            [sec("Main Results", "Two trials followed infants closely. " + FOUR)],
            "sectioned",
            [
                sec("Review question", "Which feed volume is best?"),
                sec("What does this tell us?", "Bigger volumes seem safe for most infants."),
            ],
        )
    )

    # r15..r17: remaining long-form keywords and the two-sentence window
    reviews.append(
        review(
            "r15",
            [sec("Main Results", "Nine trials contributed data. " + sentence_block(FOUR, 3))],
            "longform",
            [
                "One journal article summarized the field well. It framed the open questions.",
                "Effects were consistent across settings.",
            ],
        )
    )
    reviews.append(
        review(
            "r16",
            [sec("Main Results", "Pooled analysis covered 2100 adults. " + sentence_block(FOUR, 2))],
            "longform",
            [
                "Screening uptake varies widely between regions.",
                "Recent studies enrolled 2100 adults. Results favored screening.",
            ],
        )
    )
    reviews.append(
        review(
            "r17",
            [sec("Main Results", "A single center reported outcomes. " + sentence_block(FOUR, 2))],
            "longform",
            [
                "Recovery takes months for many people.",
                "Care teams differ in approach. One study tracked recovery for a year.",
            ],
        )
    )

    # r18: ratio exactly 0.2 (100 vs 20 tokens) -> accepted, unflagged
    reviews.append(
        review(
            "r18",
            [sec("Main Results", sentence_block(FIVE, 20))],
            "sectioned",
            [sec("What we found", sentence_block(FIVE, 4))],
        )
    )

    # r19: ratio exactly 1.3 (10 vs 13 tokens) -> accepted
    reviews.append(
        review(
            "r19",
            [sec("Main Results", sentence_block(FIVE, 2))],
            "longform",
            ["We found that it helped slightly more overall. " + FIVE],
        )
    )

    # r20: decimals and abbreviations flow through extraction unchanged
    reviews.append(
        review(
            "r20",
            [
                sec("Objectives", "To measure growth under high-volume feeds."),
                sec(
                    "Main Results",
                    "Mean difference 6.20 g/kg/d was found (95% CI 2.71 to 9.69). "
                    "Dr. Smith et al. reported no harm. " + FIVE,
                ),
            ],
            "sectioned",
            [
                sec("Study characteristics", "We found four trials of feed volumes. " + FOUR),
            ],
        )
    )
    return reviews


def main():
    reviews = build_reviews()
    assert len(reviews) == 20
    # sanity-check the token counts that drive filtering decisions
    def count(text):
        return len(tokenize_words(text))

    assert count(sentence_block(FIVE, 20)) == 100
    assert count(sentence_block(FIVE, 2)) == 10
    assert count(sentence_block(FOUR, 257)) == 1028
    assert count("We found that it helped slightly more overall. " + FIVE) == 13
    with OUT.open("w", encoding="utf-8") as fout:
        for record in reviews:
            fout.write(json.dumps(record, ensure_ascii=True) + "\n")
    print(f"wrote {len(reviews)} reviews to {OUT}")


if __name__ == "__main__":
    main()
