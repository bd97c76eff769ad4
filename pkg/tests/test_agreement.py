import math
import random
from fractions import Fraction

import pytest

from lexsev.agreement import (
    MetricCase,
    case_severity,
    hatefulness,
    inter_agreement,
    intra_agreement,
    occurring_terms,
    offensiveness,
    outer_join,
    relativeness,
    severe_list,
    summary_n_hate_terms,
    term_class_stats,
    top_terms,
    TermClassStats,
)
from lexsev.corpus import ClassLabel, ClassMap, LabeledCorpus, NormalizedTerm, TermList
from lexsev.textnorm import NormalizationConfig

CFG = NormalizationConfig()
CMAP = ClassMap.parse({"h": "Hate", "r": "RelativeHate", "n": "NoHate"})

H, R, N = ClassLabel.HATE, ClassLabel.RELATIVE_HATE, ClassLabel.NO_HATE


@pytest.fixture()
def corpus():
    return LabeledCorpus.from_records("t", [
        ("f*ck you", "h"),
        ("white tr*sh f*ck f*ck", "h"),
        ("tr*sh day f*ck", "r"),
        ("tr*sh pickup", "n"),
        ("clean", "n"),
    ], CMAP, CFG)


@pytest.fixture()
def term_list():
    return TermList.from_terms("lex", ["f*ck", "tr*sh", "white tr*sh", "zebra"], CFG)


def stats_from_counts(lines, freq=None, sizes=None):
    """Build TermClassStats directly from per-class line counts."""
    lines = {lab: lines.get(lab, 0) for lab in ClassLabel}
    freq = {lab: (freq or lines).get(lab, 0) for lab in ClassLabel}
    sizes = sizes or {lab: max(1, lines[lab]) for lab in ClassLabel}
    return TermClassStats(term=NormalizedTerm("x", ("x",)), freq=freq,
                          line_count=lines, class_sizes=sizes)


def test_term_class_stats_counts(corpus, term_list):
    table = term_class_stats(corpus, term_list)
    assert [rec.term.text for rec in table] == ["f*ck", "tr*sh", "white tr*sh"]
    assert [t.text for t in table.absent] == ["zebra"]

    by_text = {rec.term.text: rec for rec in table}
    fck = by_text["f*ck"]
    assert fck.freq == {H: 3, R: 1, N: 0}
    assert fck.line_count == {H: 2, R: 1, N: 0}
    assert fck.class_sizes == {H: 2, R: 1, N: 2}
    # "white tr*sh" consumes its tokens, so bare tr*sh never matches in Hate
    assert by_text["tr*sh"].freq == {H: 0, R: 1, N: 1}
    assert by_text["white tr*sh"].line_count == {H: 1, R: 0, N: 0}
    assert fck.total_freq == 4
    assert fck.percent_lines(H) == Fraction(100)
    assert by_text["tr*sh"].percent_lines(N) == Fraction(50)


def test_percent_lines_none_for_empty_class():
    stats = stats_from_counts({H: 1}, sizes={H: 4, R: 0, N: 0})
    assert stats.percent_lines(H) == Fraction(25)
    assert stats.percent_lines(R) is None


def test_top_terms_ranking(corpus, term_list):
    table = term_class_stats(corpus, term_list)
    assert [(t.text, f) for t, f in top_terms(table, H, 2)] == [
        ("f*ck", 3), ("white tr*sh", 1)]
    # only occurring-in-class terms are ranked
    assert [(t.text, f) for t, f in top_terms(table, N, 10)] == [("tr*sh", 1)]
    with pytest.raises(ValueError):
        top_terms(table, H, 0)


def test_top_terms_tie_is_lexicographic(corpus):
    tlist = TermList.from_terms("lex", ["tr*sh", "you", "day"], CFG)
    table = term_class_stats(corpus, tlist)
    ranked = top_terms(table, R, 3)
    assert [(t.text, f) for t, f in ranked] == [("dai", 1), ("tr*sh", 1)]


def test_outer_join_missing_cells(corpus, term_list):
    rows = {row.term.text: row.cells for row in
            outer_join(term_class_stats(corpus, term_list))}
    assert rows["f*ck"] == {H: 3, R: 1}  # NoHate cell missing, not 0
    assert rows["tr*sh"] == {R: 1, N: 1}
    assert rows["white tr*sh"] == {H: 1}

    percent = {row.term.text: row.cells for row in
               outer_join(term_class_stats(corpus, term_list), "percent_lines")}
    assert percent["f*ck"] == {H: Fraction(100), R: Fraction(100)}
    assert percent["tr*sh"] == {R: Fraction(100), N: Fraction(50)}
    with pytest.raises(ValueError):
        outer_join([], "frequency")


def test_hatefulness_uses_lines_in_positive_classes():
    assert hatefulness(stats_from_counts({H: 2, N: 5}), MetricCase.HATE_ONLY) == 1
    assert hatefulness(stats_from_counts({R: 1}), MetricCase.HATE_ONLY) == 0
    assert hatefulness(stats_from_counts({R: 1}), MetricCase.HATE_PLUS_RELATIVE) == 1
    assert hatefulness(stats_from_counts({}), MetricCase.HATE_PLUS_RELATIVE) == 0


def test_relativeness_ratio_bounded():
    assert relativeness(stats_from_counts({H: 249, N: 1}), MetricCase.HATE_ONLY) \
        == Fraction(249, 250)
    assert relativeness(stats_from_counts({H: 106, N: 680}), MetricCase.HATE_ONLY) \
        == Fraction(106, 786)
    assert relativeness(stats_from_counts({H: 300, R: 237, N: 1}),
                        MetricCase.HATE_PLUS_RELATIVE) == Fraction(537, 538)
    assert relativeness(stats_from_counts({R: 5}), MetricCase.HATE_ONLY) is None
    assert relativeness(stats_from_counts({N: 1}), MetricCase.HATE_ONLY) == 0


def test_relativeness_prose_mode():
    stats = stats_from_counts({}, freq={H: 3, R: 1, N: 0})
    assert relativeness(stats, MetricCase.HATE_ONLY, "prose") == Fraction(3, 1)
    assert relativeness(stats, MetricCase.HATE_PLUS_RELATIVE, "prose") == math.inf
    none_side = stats_from_counts({}, freq={})
    assert relativeness(none_side, MetricCase.HATE_ONLY, "prose") is None
    only_neg = stats_from_counts({}, freq={N: 4})
    assert relativeness(only_neg, MetricCase.HATE_ONLY, "prose") == 0
    with pytest.raises(ValueError):
        relativeness(stats, MetricCase.HATE_ONLY, "bounded")


def test_offensiveness_harmonic():
    assert offensiveness(1, Fraction(996, 1000)) == Fraction(2 * 996, 1996)
    assert offensiveness(1, Fraction(1)) == 1
    assert offensiveness(0, Fraction(1, 2)) == 0
    assert offensiveness(1, Fraction(0)) == 0
    assert offensiveness(0, Fraction(0)) is None
    assert offensiveness(1, None) is None
    assert offensiveness(0, None) is None
    assert offensiveness(1, math.inf) == 2  # limit of 2r/(1+r)


def test_offensiveness_geometric():
    assert offensiveness(1, Fraction(1, 4), "geometric") == 0.5
    assert offensiveness(0, Fraction(0), "geometric") == 0.0
    assert offensiveness(0, None, "geometric") is None
    assert offensiveness(1, math.inf, "geometric") == math.inf
    assert offensiveness(0, math.inf, "geometric") == 0.0
    with pytest.raises(ValueError):
        offensiveness(1, Fraction(1), "arithmetic")


def test_offensiveness_betweenness_and_monotonicity():
    rng = random.Random(7)
    previous = None
    for r_num in sorted(rng.sample(range(1, 1000), 50)):
        r = Fraction(r_num, 1000)
        o = offensiveness(1, r)
        assert min(1, r) <= o <= max(1, r)
        assert o == 2 * r / (1 + r)  # exact, not just within tolerance
        if previous is not None:
            assert o > previous  # strictly increasing in r for h=1
        previous = o


def test_intra_agreement_records(corpus, term_list):
    records = intra_agreement(corpus, term_list)
    assert [rec.term.text for rec in records] == ["f*ck", "tr*sh", "white tr*sh"]
    trash = next(r for r in records if r.term.text == "tr*sh")
    hate_only = trash.for_case(MetricCase.HATE_ONLY)
    assert (hate_only.hatefulness, hate_only.relativeness) == (0, 0)
    assert hate_only.offensiveness is None  # h + r = 0
    both = trash.for_case(MetricCase.HATE_PLUS_RELATIVE)
    assert (both.hatefulness, both.relativeness) == (1, Fraction(1, 2))
    assert both.offensiveness == Fraction(2, 3)
    assert (both.positive_lines, both.negative_lines) == (1, 1)
    with pytest.raises(KeyError):
        records[0].for_case("nope")


def test_inter_agreement_membership_and_union(corpus):
    lists = [TermList.from_terms("A", ["f*ck", "zebra"], CFG),
             TermList.from_terms("B", ["f*ck", "tr*sh"], CFG)]
    records = inter_agreement(corpus, lists)
    assert [rec.term.text for rec in records] == ["f*ck", "zebra", "tr*sh"]
    by_text = {rec.term.text: rec for rec in records}
    assert by_text["f*ck"].membership == ("A", "B")
    assert by_text["zebra"].membership == ("A",)
    # absent term: undefined on both sides
    zebra = by_text["zebra"].for_case(MetricCase.HATE_ONLY)
    assert (zebra.hatefulness, zebra.relativeness, zebra.offensiveness) == (0, None, None)
    with pytest.raises(ValueError):
        inter_agreement(corpus, [])


def test_inter_agreement_degenerates_to_intra(corpus, term_list):
    intra = {r.term.text: r for r in intra_agreement(corpus, term_list)}
    inter = inter_agreement(corpus, [term_list])
    for rec in inter:
        assert rec.membership == ("lex",)
        if rec.term.text in intra:
            assert rec.cases == intra[rec.term.text].cases


def test_undefined_offensiveness_iff_invariant(corpus):
    rng = random.Random(31)
    for _ in range(300):
        stats = stats_from_counts({
            H: rng.randint(0, 3), R: rng.randint(0, 3), N: rng.randint(0, 3)})
        for case in MetricCase:
            sev = case_severity(stats, case)
            undefined = sev.relativeness is None or \
                sev.hatefulness + sev.relativeness == 0
            assert (sev.offensiveness is None) == undefined


def test_severe_list_strict_threshold_and_order(corpus, term_list):
    records = inter_agreement(corpus, [term_list])
    severe = severe_list(records, MetricCase.HATE_ONLY, 0.5)
    assert severe.name == "Offensiveness(Hate)(0.5)"
    # f*ck and white tr*sh both score 1; ties resolve on term text
    assert [t.text for t in severe] == ["f*ck", "white tr*sh"]
    assert severe.report.read == len(records)
    assert severe.report.kept == 2

    assert len(severe_list(records, MetricCase.HATE_ONLY, 1.0)) == 0
    named = severe_list(records, MetricCase.HATE_PLUS_RELATIVE, 0.25, name="custom")
    assert named.name == "custom"


def test_severe_list_excludes_exact_threshold():
    # one hate line, two NoHate lines: r = 1/3, harmonic o = exactly 1/2
    corpus = LabeledCorpus.from_records("t", [
        ("zork", "h"), ("zork", "n"), ("zork", "n")], CMAP, CFG)
    records = inter_agreement(corpus, [TermList.from_terms("L", ["zork"], CFG)])
    assert records[0].for_case(MetricCase.HATE_ONLY).offensiveness == Fraction(1, 2)
    assert len(severe_list(records, MetricCase.HATE_ONLY, 0.5)) == 0
    assert [t.text for t in severe_list(records, MetricCase.HATE_ONLY, 0.499)] == ["zork"]


def test_severe_list_antitone_in_threshold():
    rng = random.Random(47)
    for _ in range(100):
        corpus_rows = []
        for label in ("h", "r", "n"):
            for _ in range(rng.randint(1, 4)):
                corpus_rows.append((" ".join(
                    rng.choice(["aa", "bb", "cc", "dd"])
                    for _ in range(rng.randint(1, 4))), label))
        corpus = LabeledCorpus.from_records("t", corpus_rows, CMAP,
                                            NormalizationConfig(stemmer="none"))
        tlist = TermList.from_terms("L", ["aa", "bb", "cc", "dd"],
                                    NormalizationConfig(stemmer="none"))
        records = inter_agreement(corpus, [tlist])
        t1, t2 = sorted(rng.uniform(0, 1) for _ in range(2))
        case = rng.choice(list(MetricCase))
        low = {t.text for t in severe_list(records, case, t1)}
        high = {t.text for t in severe_list(records, case, t2)}
        assert high <= low


def test_summary_n_hate_terms(corpus):
    tlist = TermList.from_terms("L", ["f*ck"], CFG)
    rows = summary_n_hate_terms([corpus], [tlist])
    as_tuples = [(r.class_label, r.n, r.line_count, r.total_lines) for r in rows]
    assert as_tuples == [
        (H, 1, 1, 2), (H, 2, 1, 2),
        (R, 1, 1, 1),
        (N, 0, 2, 2),
    ]
    assert rows[0].percent == Fraction(50)
    assert rows[2].percent == Fraction(100)
    assert rows[0].corpus == "t" and rows[0].list_name == "L"


def test_summary_percentages_sum_to_100(corpus, term_list):
    rows = summary_n_hate_terms([corpus], [term_list])
    totals = {}
    for row in rows:
        key = (row.corpus, row.class_label, row.list_name)
        totals[key] = totals.get(key, Fraction(0)) + row.percent
    assert totals and all(total == 100 for total in totals.values())


def test_occurring_terms(corpus, term_list):
    occ = occurring_terms(term_list, corpus)
    assert occ.name == "lex@t"
    assert [t.text for t in occ] == ["f*ck", "tr*sh", "white tr*sh"]
    assert occ.report.read == 4 and occ.report.kept == 3


def test_metric_case_parse():
    assert MetricCase.parse("HateOnly") is MetricCase.HATE_ONLY
    assert MetricCase.parse("hate") is MetricCase.HATE_ONLY
    assert MetricCase.parse("Hate+Relative") is MetricCase.HATE_PLUS_RELATIVE
    assert MetricCase.parse("hate_plus_relative") is MetricCase.HATE_PLUS_RELATIVE
    with pytest.raises(ValueError):
        MetricCase.parse("all")
    assert MetricCase.HATE_ONLY.display == "Hate"
    assert MetricCase.HATE_PLUS_RELATIVE.display == "Hate+Relative"
    assert MetricCase.HATE_ONLY.positive_labels == (H,)
    assert MetricCase.HATE_PLUS_RELATIVE.positive_labels == (H, R)
