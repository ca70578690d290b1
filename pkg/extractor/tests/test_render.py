import pytest

from egem_extract import RelationError, parse_relation, render


@pytest.mark.parametrize(
    "relation,expected,pred_words",
    [
        ("(join.1,join.2)#person#organization", "person join organization", ["join"]),
        ("(give.2,give.to.2)#medicine#person", "give medicine to person", ["give", "to"]),
        (
            "(export.1,export.to.2)#location_1#location_2",
            "location_1 export to location_2",
            ["export", "to"],
        ),
    ],
)
def test_templates(relation, expected, pred_words):
    sentence = render(parse_relation(relation))
    assert sentence.text == expected
    assert [sentence.text[a:b] for a, b in sentence.predicate_char_spans] == pred_words


def test_char_spans_never_cover_type_words():
    sentence = render(parse_relation("(give.2,give.to.2)#medicine#person"))
    covered = {i for a, b in sentence.predicate_char_spans for i in range(a, b)}
    for arg in ("medicine", "person"):
        start = sentence.text.index(arg)
        assert not covered & set(range(start, start + len(arg)))


def test_canonicalization_matches_equal_types():
    a = parse_relation("(export.1,export.to.2)#location#location")
    b = parse_relation("(export.1,export.to.2)#location_1#location_2")
    assert a.relation == b.relation == "(export.1,export.to.2)#location_1#location_2"


def test_rejects_malformed():
    for bad in ["join", "(join.1)#a#b", "(join.1,join.9)#a#b", "(join.1,join.2)#a"]:
        with pytest.raises(RelationError):
            parse_relation(bad)
